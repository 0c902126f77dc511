"""Concatenating approximating sequences into one convergent sequence.

Source ``j`` is a sequence realizing the measure ``mu_j`` with error constant
``C_j``.  The merged sequence consists of the first ``r_1`` terms of source
1, then the first ``r_2`` terms of source 2, and so on, with
``r_j >= max(j**2, j * (C_1 + ... + C_{j+1}))``.
"""

from __future__ import annotations

import bisect
import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from itertools import islice
from typing import Any

import numpy as np

from .errors import SourceExhaustedError, ValidationError


@dataclass(frozen=True)
class BlockPlan:
    constants: tuple[float, ...]
    lengths: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "constants", tuple(float(c) for c in self.constants))
        object.__setattr__(self, "lengths", tuple(int(r) for r in self.lengths))
        if any(c < 0 for c in self.constants):
            raise ValidationError("constants must be nonnegative")
        if any(r <= 0 for r in self.lengths):
            raise ValidationError("block lengths must be positive")

    @property
    def offsets(self) -> tuple[int, ...]:
        """``offsets[j] = r_1 + ... + r_j`` with ``offsets[0] = 0``."""
        out = [0]
        for r in self.lengths:
            out.append(out[-1] + r)
        return tuple(out)

    @property
    def total(self) -> int:
        return sum(self.lengths)

    def locate(self, n: int) -> tuple[int, int]:
        """Decompose ``n = r_1 + ... + r_{j-1} + s`` with ``0 < s <= r_j``."""
        offsets = self.offsets
        if not 1 <= n <= offsets[-1]:
            raise ValidationError(f"position {n} outside plan of total length {offsets[-1]}")
        j = bisect.bisect_left(offsets, n)
        return j, n - offsets[j - 1]

    def is_admissible(self) -> bool:
        return all(r >= required_length(self.constants, j) for j, r in enumerate(self.lengths, 1))

    def to_dict(self) -> dict:
        return {"constants": list(self.constants), "lengths": list(self.lengths)}

    @classmethod
    def from_dict(cls, d: dict) -> "BlockPlan":
        unknown = set(d) - {"constants", "lengths", "offsets"}
        if unknown:
            raise ValidationError(f"unknown plan fields: {sorted(unknown)}")
        plan = cls(d["constants"], d["lengths"])
        if "offsets" in d and list(d["offsets"]) != list(plan.offsets[1:]):
            raise ValidationError("plan offsets inconsistent with lengths")
        return plan


def required_length(constants: Sequence[float], j: int) -> int:
    """Minimal admissible ``r_j = max(j**2, ceil(j * (C_1 + ... + C_{j+1})))``."""
    if len(constants) < j + 1:
        raise ValidationError(f"block {j} needs constants C_1..C_{j + 1}, have {len(constants)}")
    return max(j * j, math.ceil(j * sum(constants[: j + 1])))


def make_plan(constants: Sequence[float], J: int) -> BlockPlan:
    """Plan with the minimal admissible lengths ``r_1..r_J``."""
    constants = [float(c) for c in constants]
    if J < 1:
        raise ValidationError("J must be positive")
    lengths = [required_length(constants, j) for j in range(1, J + 1)]
    return BlockPlan(tuple(constants), tuple(lengths))


class _Source:
    """Lazily consumed, cached source sequence."""

    def __init__(self, j: int, iterable: Iterable):
        self.j = j
        self._it = iter(iterable)
        self.cache: list = []

    def get(self, s: int) -> Any:
        if s > len(self.cache):
            self.cache.extend(islice(self._it, s - len(self.cache)))
            if s > len(self.cache):
                raise SourceExhaustedError(
                    f"source {self.j} ended after {len(self.cache)} terms; position {s} requested"
                )
        return self.cache[s - 1]


class MergedSequence:
    """Block concatenation of sources ``j = 1, 2, ...``.

    ``sources`` is a callable ``j -> iterable`` or a sequence of iterables;
    ``constants`` a callable ``j -> C_j`` or a sequence.  If ``plan`` is given
    its lengths are used first; afterwards the plan is extended with minimal
    admissible lengths as long as constants are available.
    """

    def __init__(
        self,
        sources: Callable[[int], Iterable] | Sequence[Iterable],
        constants: Callable[[int], float] | Sequence[float] | None = None,
        plan: BlockPlan | None = None,
    ):
        if constants is None and plan is None:
            raise ValidationError("need constants or a plan")
        self._source_fn = sources if callable(sources) else None
        self._source_list = None if callable(sources) else list(sources)
        self._constants_fn = constants if callable(constants) else None
        given = list(plan.constants) if plan is not None else []
        if constants is not None and not callable(constants):
            given = [float(c) for c in constants]
        self._constants = given
        self._lengths = list(plan.lengths) if plan is not None else []
        self._offsets = [0]
        for r in self._lengths:
            self._offsets.append(self._offsets[-1] + r)
        self._sources: dict[int, _Source] = {}

    # -- plan -------------------------------------------------------------

    def _constant(self, j: int) -> float:
        while len(self._constants) < j:
            if self._constants_fn is None:
                raise ValidationError(f"constant C_{j} not available; plan cannot be extended")
            self._constants.append(float(self._constants_fn(len(self._constants) + 1)))
        return self._constants[j - 1]

    def _extend_to(self, n: int) -> None:
        while self._offsets[-1] < n:
            j = len(self._lengths) + 1
            self._constant(j + 1)
            r = required_length(self._constants, j)
            self._lengths.append(r)
            self._offsets.append(self._offsets[-1] + r)

    @property
    def plan(self) -> BlockPlan:
        return BlockPlan(tuple(self._constants), tuple(self._lengths))

    def locate(self, n: int) -> tuple[int, int]:
        if int(n) != n or n < 1:
            raise ValidationError(f"position must be a positive integer, got {n!r}")
        self._extend_to(n)
        j = bisect.bisect_left(self._offsets, n)
        return j, n - self._offsets[j - 1]

    # -- elements ---------------------------------------------------------

    def _source(self, j: int) -> _Source:
        if j not in self._sources:
            if self._source_fn is not None:
                it = self._source_fn(j)
            elif j <= len(self._source_list):
                it = self._source_list[j - 1]
            else:
                raise SourceExhaustedError(f"no source sequence for block {j}")
            self._sources[j] = _Source(j, it)
        return self._sources[j]

    def element(self, n: int) -> Any:
        j, s = self.locate(n)
        return self._source(j).get(s)

    def prefix(self, N: int) -> list:
        self._extend_to(N)
        out: list = []
        j = 1
        while len(out) < N:
            take = min(self._lengths[j - 1], N - len(out))
            src = self._source(j)
            src.get(take)
            out.extend(src.cache[:take])
            j += 1
        return out

    def block_sizes(self, N: int) -> list[int]:
        """``r_1, ..., r_k, s`` for ``N = r_1 + ... + r_k + s`` with ``0 < s <= r_{k+1}``."""
        j, s = self.locate(N)
        return self._lengths[: j - 1] + [s]

    def summability_row(self, N: int) -> list[float]:
        if N <= self._first_length():
            raise ValidationError(f"summability rows are defined for N > r_1 = {self._first_length()}")
        return [r / N for r in self.block_sizes(N)]

    def _first_length(self) -> int:
        self._extend_to(1)
        return self._lengths[0]

    def averaged_functional(self, f: Callable[[Any], float], N: int) -> float:
        return float(np.mean([f(x) for x in self.prefix(N)]))


def merged_element(ms: MergedSequence, n: int) -> Any:
    """Element at global position ``n``: ``x_{j,s}`` for ``n = r_0 + ... + r_{j-1} + s``."""
    return ms.element(n)


def summability_row(ms: MergedSequence, N: int) -> list[float]:
    """Row ``(r_1/N, ..., r_k/N, s/N)`` of the averaging matrix; requires ``N > r_1``."""
    return ms.summability_row(N)


def averaged_functional(ms: MergedSequence, f: Callable[[Any], float], N: int) -> float:
    """``(1/N) sum_{n <= N} f(x_n)`` over the merged sequence."""
    return ms.averaged_functional(f, N)
