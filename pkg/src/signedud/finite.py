"""Sequences realizing finitely supported probability measures.

The scheduler is greedy on deficits: at step ``n + 1`` it emits the atom
maximizing ``(n + 1) * mu({x}) - count_x(n)``, ties going to the lowest atom
index.  Every deficit stays above ``-1``, so the positive deficits sum to
less than ``m - 1`` and the subset discrepancy obeys the ``C(mu) / N`` bound
with ``C(mu) = (m - 1) * floor(m / 2)``.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .measures import FiniteSignedMeasure, _atom_values, _frozen


def c_constant(m: int) -> int:
    """Error constant ``(m - 1) * floor(m / 2)`` for a support of size ``m``."""
    if int(m) != m or m < 1:
        raise ValidationError(f"support size must be a positive integer, got {m!r}")
    m = int(m)
    return (m - 1) * (m // 2)


@dataclass(frozen=True, eq=False)
class AtomSequence:
    """A generated prefix ``y_1, ..., y_N`` given as atom indices."""

    measure: FiniteSignedMeasure
    indices: np.ndarray

    def __post_init__(self):
        idx = _frozen(self.indices, dtype=np.int64)
        if idx.ndim != 1 or np.any((idx < 0) | (idx >= self.measure.size)):
            raise ValidationError("indices must refer to atoms of the measure")
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return self.indices.size

    @property
    def labels(self) -> list:
        locs = self.measure.locations
        return [locs[i] for i in self.indices]

    @property
    def counts(self) -> np.ndarray:
        return self.counts_at(len(self))

    def counts_at(self, N: int) -> np.ndarray:
        _check_prefix(self, N)
        return np.bincount(self.indices[:N], minlength=self.measure.size)

    def count_matrix(self) -> np.ndarray:
        """Row ``n - 1`` holds the per-atom counts of the prefix of length ``n``."""
        onehot = np.zeros((len(self), self.measure.size), dtype=np.int64)
        onehot[np.arange(len(self)), self.indices] = 1
        return np.cumsum(onehot, axis=0)

    def to_dict(self) -> dict:
        return {
            "atoms": [{"x": x, "w": float(w)} for x, w in zip(self.measure.locations, self.measure.weights)],
            "indices": [int(i) for i in self.indices],
        }


def _check_prefix(seq: AtomSequence, N: int) -> None:
    if int(N) != N or not 1 <= N <= len(seq):
        raise ValidationError(f"N must be in 1..{len(seq)}, got {N!r}")


def iter_finite(mu: FiniteSignedMeasure) -> Iterator[int]:
    """Endless greedy largest-deficit sequence of atom indices for ``mu``."""
    mu.require_probability()
    w = mu.weights
    counts = np.zeros(w.size)
    n = 0
    if w.size == 1:
        while True:
            yield 0
    while True:
        n += 1
        i = int(np.argmax(n * w - counts))
        counts[i] += 1
        yield i


def generate_finite(mu: FiniteSignedMeasure, N: int) -> AtomSequence:
    """First ``N`` terms of the greedy sequence for the probability measure ``mu``."""
    if int(N) != N or N < 1:
        raise ValidationError(f"N must be a positive integer, got {N!r}")
    it = iter_finite(mu)
    return AtomSequence(mu, np.fromiter((next(it) for _ in range(int(N))), dtype=np.int64, count=int(N)))


def subset_discrepancy_trace(seq: AtomSequence) -> np.ndarray:
    """Subset discrepancy of every prefix length ``1..len(seq)``.

    ``sup_M |count_M / N - mu(M)|`` equals half the l1 distance between the
    empirical and target weights because the deviations sum to zero.
    """
    N = np.arange(1, len(seq) + 1, dtype=float)[:, None]
    dev = seq.count_matrix() / N - seq.measure.weights[None, :]
    return 0.5 * np.abs(dev).sum(axis=1)


def subset_discrepancy(seq: AtomSequence, N: int) -> float:
    """``sup`` over all subsets ``M`` of ``|(1/N) sum chi_M(y_k) - mu(M)|``."""
    _check_prefix(seq, N)
    dev = seq.counts_at(N) / N - seq.measure.weights
    return float(0.5 * np.abs(dev).sum())


def mean_vs_integral(seq: AtomSequence, f, N: int) -> tuple[float, float, float]:
    """Empirical mean of ``f`` over the first ``N`` terms, its integral, and the gap.

    ``f`` is a callable on atom locations or an array of per-atom values.
    """
    _check_prefix(seq, N)
    vals = _atom_values(seq.measure, f)
    mean = float(vals[seq.indices[:N]].mean())
    integral = float(np.dot(vals, seq.measure.weights))
    return mean, integral, abs(mean - integral)


def gap_trace(seq: AtomSequence, values: np.ndarray) -> np.ndarray:
    """Gaps ``|mean_N f - int f dmu|`` for every ``N``; ``values`` is ``(m,)`` or ``(m, F)``."""
    values = np.asarray(values, dtype=float)
    N = np.arange(1, len(seq) + 1, dtype=float)
    counts = seq.count_matrix()
    integral = seq.measure.weights @ values
    means = (counts @ values) / (N[:, None] if values.ndim == 2 else N)
    return np.abs(means - integral)


def mean_error_bounds(m: int, N) -> tuple[np.ndarray, np.ndarray]:
    """The two mean-error bounds ``2C/N`` (for +-1 valued f) and ``2(1+C)/N``."""
    C = c_constant(m)
    N = np.asarray(N, dtype=float)
    return 2.0 * C / N, 2.0 * (1.0 + C) / N


def generate_signed_finite(mu: FiniteSignedMeasure, N: int) -> tuple[AtomSequence, np.ndarray]:
    """Points and signs whose signed averages reproduce a unit-norm signed ``mu``.

    Points follow the greedy sequence for ``|mu|``; the sign of each point is
    the sign of its atom.
    """
    if not mu.is_unit():
        raise ValidationError(f"expected a signed measure of norm 1, got {mu.norm!r}")
    seq = generate_finite(mu.total_variation_measure(), N)
    signs = mu.signs()[seq.indices]
    return AtomSequence(mu.total_variation_measure(), seq.indices), signs
