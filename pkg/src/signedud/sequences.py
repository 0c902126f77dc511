"""Point-and-sign sequences on a compact interval.

- :func:`van_der_corput` and :func:`generalized_inverse` give the classical
  low-discrepancy sequence for a continuous increasing distribution function.
- :func:`signed_sequence_polygonal` attaches signs ``eps_n = h(x_n)`` to the
  sequence for the variation function of a PLJ target.
- :class:`DiagonalSequence` runs the full construction for an arbitrary BV
  oracle: polygonal approximants, an arrangement schedule certified by an
  a-priori discrepancy bound, and the diagonal listing of the first ``m``
  terms of the ``m``-th arranged sequence.
- :func:`iid_sampler` is the random alternative (inverse transform of a
  seeded counter-based uniform stream).
"""

from __future__ import annotations

import bisect
import math
import warnings
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMeasureError, ValidationError
from .measures import (
    BVOracle,
    PLJFunction,
    PolygonalApproximation,
    SignDensity,
    _frozen,
    normalize,
    polygonal_approximation,
    sign_density,
    total_variation,
)

UNIT_TOL = 1e-9

# ---------------------------------------------------------------------------
# Van der Corput and generalized inverse
# ---------------------------------------------------------------------------


def van_der_corput(n: int) -> float:
    """Base-2 radical inverse of ``n >= 1``."""
    if int(n) != n or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    x, scale = 0.0, 0.5
    while n:
        if n & 1:
            x += scale
        n >>= 1
        scale *= 0.5
    return x


def van_der_corput_array(start: int, stop: int) -> np.ndarray:
    """Radical inverses of ``start, ..., stop - 1`` (integers below ``2**53``)."""
    n = np.arange(start, stop, dtype=np.uint64)
    out = np.zeros(n.size)
    scale = 0.5
    while np.any(n):
        out += scale * (n & np.uint64(1))
        n >>= np.uint64(1)
        scale *= 0.5
    return out


def _clamp_unit(t: np.ndarray) -> np.ndarray:
    bad = (t < 0.0) | (t > 1.0)
    if np.any(bad):
        warnings.warn(f"generalized_inverse: clamped {int(bad.sum())} value(s) to [0, 1]", stacklevel=3)
        t = np.clip(t, 0.0, 1.0)
    return t


def _inverse_plj(g: PLJFunction, t: np.ndarray) -> np.ndarray:
    # Completed graph of g: vertices (t_i, left_i), (t_i, right_i); y is nondecreasing.
    xs = np.repeat(g.t, 2)
    ys = np.empty(xs.size)
    ys[0::2] = g.left
    ys[1::2] = g.right
    ys = np.maximum.accumulate(ys)
    j = np.searchsorted(ys, t, side="left")
    out = np.empty(t.shape)
    first = j == 0
    beyond = j >= xs.size
    out[first] = xs[0]
    out[beyond] = xs[-1]
    mid = ~(first | beyond)
    jm = j[mid]
    y0, y1, x0, x1 = ys[jm - 1], ys[jm], xs[jm - 1], xs[jm]
    tm = t[mid]
    frac = (tm - y0) / (y1 - y0)
    x = np.where(tm == y1, x1, np.clip(x0 + frac * (x1 - x0), x0, x1))
    out[mid] = x
    return out


def _inverse_callable(g: Callable, t: np.ndarray, domain: tuple[float, float]) -> np.ndarray:
    a, b = domain
    lo = np.full(t.shape, a)
    hi = np.full(t.shape, b)
    at_a = np.asarray(g(lo)) >= t
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if np.all((mid == lo) | (mid == hi)):
            break
        up = np.asarray(g(mid)) >= t
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
    return np.where(at_a, a, hi)


def generalized_inverse(g, t, domain: tuple[float, float] | None = None):
    """``inf{x in [a, b] : g(x) >= t}`` for nondecreasing ``g`` with ``g(a) = 0``, ``g(b) = 1``.

    ``g`` is a :class:`PLJFunction` (exact breakpoint scan) or a vectorized
    callable on ``domain`` (bisection to machine precision).  Values of ``t``
    outside ``[0, 1]`` are clamped with a warning.
    """
    ta = _clamp_unit(np.asarray(t, dtype=float))
    flat = np.atleast_1d(ta)
    if isinstance(g, PLJFunction):
        out = _inverse_plj(g, flat)
    else:
        if domain is None:
            raise ValidationError("a callable g needs an explicit domain")
        out = _inverse_callable(g, flat, domain)
    return float(out[0]) if ta.ndim == 0 else out.reshape(ta.shape)


# ---------------------------------------------------------------------------
# Prefixes and streams
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SignedPrefix:
    """Materialized prefix ``(x_1, eps_1), ..., (x_N, eps_N)``."""

    points: np.ndarray
    signs: np.ndarray
    domain: tuple[float, float]

    def __post_init__(self):
        x = _frozen(self.points)
        e = _frozen(self.signs, dtype=np.int8)
        a, b = self.domain
        if x.ndim != 1 or e.shape != x.shape:
            raise ValidationError("points and signs must be 1-d of equal length")
        if np.any((x < a) | (x > b)) or np.any(np.isnan(x)):
            raise ValidationError(f"points must lie in {self.domain}")
        if np.any(np.abs(e) != 1):
            raise ValidationError("signs must be +1 or -1")
        object.__setattr__(self, "points", x)
        object.__setattr__(self, "signs", e)
        object.__setattr__(self, "domain", (float(a), float(b)))

    @classmethod
    def unsigned(cls, points, domain=(0.0, 1.0)) -> "SignedPrefix":
        points = np.asarray(points, dtype=float)
        return cls(points, np.ones(points.size, dtype=np.int8), domain)

    def __len__(self) -> int:
        return self.points.size

    def head(self, N: int) -> "SignedPrefix":
        if not 1 <= N <= len(self):
            raise ValidationError(f"N must be in 1..{len(self)}")
        return SignedPrefix(self.points[:N], self.signs[:N], self.domain)


class SignedSequence:
    """Lazily generated infinite stream of ``(point, sign)`` pairs.

    ``chunks`` is an iterator of ``(points, signs)`` array pairs; generated
    terms are cached so repeated :meth:`take` calls are consistent.
    """

    def __init__(self, chunks: Iterator[tuple[np.ndarray, np.ndarray]], domain):
        self._chunks = chunks
        self.domain = (float(domain[0]), float(domain[1]))
        self._x: list[np.ndarray] = []
        self._e: list[np.ndarray] = []
        self._n = 0

    def _fill(self, N: int) -> None:
        while self._n < N:
            x, e = next(self._chunks)
            self._x.append(np.asarray(x, dtype=float))
            self._e.append(np.asarray(e, dtype=np.int8))
            self._n += len(x)
        if len(self._x) > 1:
            self._x = [np.concatenate(self._x)]
            self._e = [np.concatenate(self._e)]

    def take(self, N: int) -> SignedPrefix:
        """The first ``N`` terms."""
        if int(N) != N or N < 1:
            raise ValidationError(f"N must be a positive integer, got {N!r}")
        self._fill(int(N))
        return SignedPrefix(self._x[0][:N], self._e[0][:N], self.domain)

    def __iter__(self):
        i = 0
        while True:
            self._fill(i + 1)
            yield float(self._x[0][i]), int(self._e[0][i])
            i += 1


def _require_unit(phi: PLJFunction) -> None:
    if abs(phi.variation() - 1.0) > UNIT_TOL:
        raise ValidationError(f"expected unit total variation, got {phi.variation()!r}; normalize first")
    if abs(phi.value(phi.a)) > UNIT_TOL:
        raise ValidationError(f"expected phi(a) = 0, got {phi.value(phi.a)!r}")


def _check_increasing_plj(phi: PLJFunction) -> None:
    if not phi.is_continuous:
        raise ValidationError("distribution function has jumps")
    if not phi.is_nondecreasing():
        raise ValidationError("distribution function is not nondecreasing")
    if abs(phi.value(phi.a)) > UNIT_TOL or abs(phi.value(phi.b) - 1.0) > UNIT_TOL:
        raise ValidationError("distribution function must run from 0 to 1")


def ud_continuous_increasing(phi, N: int, domain: tuple[float, float] = (0.0, 1.0)) -> np.ndarray:
    """``x_n = phi^-(vdc(n))``, ``n = 1..N``, for continuous nondecreasing ``phi``.

    Every prefix has star discrepancy at most ``log(N + 1) / (N log 2)``
    with respect to ``phi``.  ``phi`` is a :class:`PLJFunction`, a
    :class:`BVOracle` of an increasing function, or a vectorized callable on
    ``domain``.
    """
    if int(N) != N or N < 1:
        raise ValidationError(f"N must be a positive integer, got {N!r}")
    u = van_der_corput_array(1, int(N) + 1)
    if isinstance(phi, PLJFunction):
        _check_increasing_plj(phi)
        return generalized_inverse(phi, u)
    if isinstance(phi, BVOracle):
        domain, phi = phi.domain, phi.eval_phi
    a, b = domain
    grid = np.linspace(a, b, 1025)
    vals = np.asarray(phi(grid), dtype=float)
    if abs(vals[0]) > UNIT_TOL or abs(vals[-1] - 1.0) > UNIT_TOL or np.any(np.diff(vals) < -UNIT_TOL):
        raise ValidationError("distribution function must be nondecreasing from 0 to 1")
    return generalized_inverse(phi, u, domain)


def polygonal_stream(phi: PLJFunction, chunk: int = 4096) -> SignedSequence:
    """Signed van der Corput stream for a unit-variation PLJ target."""
    _require_unit(phi)
    ups = total_variation(phi) / phi.variation()
    h = sign_density(phi)

    def chunks():
        n = 1
        while True:
            x = generalized_inverse(ups, van_der_corput_array(n, n + chunk))
            yield x, h(x)
            n += chunk

    return SignedSequence(chunks(), phi.domain)


def signed_sequence_polygonal(phi: PLJFunction, N: int) -> SignedPrefix:
    """First ``N`` points for ``|mu|`` with signs ``eps_n = h(x_n)``.

    Points are the van der Corput sequence mapped through the generalized
    inverse of the variation function; a jump of ``phi`` absorbs a whole
    interval of uniforms, so its location becomes an atom with the jump's sign.
    """
    return polygonal_stream(phi, chunk=max(1, int(N))).take(N)


# ---------------------------------------------------------------------------
# Arrangement schedule
# ---------------------------------------------------------------------------


def schedule_bound(B: int, m) -> np.ndarray | float:
    """A-priori bound ``2 (B + 1) log(m + 1) / (m log 2)`` on ``D*_m``.

    Valid for the signed sequence of a continuous approximant whose sign
    density changes ``B`` times.
    """
    m = np.asarray(m, dtype=float)
    out = 2.0 * (B + 1) * np.log(m + 1) / (m * math.log(2.0))
    return float(out) if out.ndim == 0 else out


def threshold(B: int, k: int, after: int = 0) -> int:
    """Smallest ``m > after`` with ``schedule_bound(B, m) <= 1/k`` (the bound decreases in ``m``)."""
    target = 1.0 / k
    lo = after + 1
    if schedule_bound(B, lo) <= target:
        return lo
    hi = 2 * lo
    while schedule_bound(B, hi) > target:
        lo, hi = hi, 2 * hi
    # invariant: bound(lo) > target >= bound(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if schedule_bound(B, mid) <= target:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class ArrangementSchedule:
    """Thresholds ``N_1 < N_2 < ...`` and the block-to-approximant map.

    Block ``m`` is assigned approximant ``K(m) = 1`` for ``m < N_1`` and
    ``K(m) = k`` for ``N_{k-1} <= m < N_k``.
    """

    thresholds: tuple[int, ...]
    breakpoint_counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.thresholds) != len(self.breakpoint_counts):
            raise ValidationError("one threshold per approximant")
        if any(b <= a for a, b in zip(self.thresholds, self.thresholds[1:])) or (
            self.thresholds and self.thresholds[0] < 1
        ):
            raise ValidationError("thresholds must be strictly increasing positive integers")

    @property
    def K_max(self) -> int:
        return len(self.thresholds)

    def assignment(self, m: int) -> int:
        k = bisect.bisect_right(self.thresholds, m) + 1
        if k > self.K_max:
            raise ValidationError(f"block {m} lies beyond the schedule (N_{self.K_max} = {self.thresholds[-1]})")
        return k

    def bound_at_threshold(self, k: int) -> float:
        return schedule_bound(self.breakpoint_counts[k - 1], self.thresholds[k - 1])

    def to_dict(self) -> dict:
        return {"thresholds": list(self.thresholds), "breakpoint_counts": list(self.breakpoint_counts)}

    @classmethod
    def from_dict(cls, d: dict) -> "ArrangementSchedule":
        return cls(tuple(int(x) for x in d["thresholds"]), tuple(int(x) for x in d["breakpoint_counts"]))


def arrangement_schedule(breakpoint_counts: Sequence[int], K_max: int | None = None) -> ArrangementSchedule:
    """Schedule for approximants ``1..K_max`` with sign-change counts ``B_k``."""
    B = [int(b) for b in breakpoint_counts]
    K_max = len(B) if K_max is None else int(K_max)
    if K_max > len(B) or K_max < 1:
        raise ValidationError(f"need breakpoint counts for k = 1..{K_max}")
    thresholds: list[int] = []
    for k in range(1, K_max + 1):
        thresholds.append(threshold(B[k - 1], k, thresholds[-1] if thresholds else 0))
    return ArrangementSchedule(tuple(thresholds), tuple(B[:K_max]))


# ---------------------------------------------------------------------------
# Diagonal construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Approximant:
    """Normalized continuous approximant ``Phi_k`` with its variation and sign density."""

    k: int
    source_k: int
    polygonal: PolygonalApproximation
    phi: PLJFunction
    upsilon: PLJFunction
    h: SignDensity

    @property
    def sign_changes(self) -> int:
        return self.h.sign_changes()

    def terms(self, m: int) -> tuple[np.ndarray, np.ndarray]:
        """First ``m`` terms of the signed sequence for ``Phi_k``."""
        x = generalized_inverse(self.upsilon, van_der_corput_array(1, m + 1))
        return x, self.h(x)


def _check_unit_oracle(oracle: BVOracle) -> None:
    a, b = oracle.domain
    v = float(oracle.eval_upsilon(np.float64(b)))
    if not v > 0.0:
        raise DegenerateMeasureError("oracle has zero total variation")
    if abs(v - 1.0) > UNIT_TOL:
        raise ValidationError(f"oracle total variation is {v!r}; normalize upstream")
    if abs(float(oracle.eval_phi(np.float64(a)))) > UNIT_TOL:
        raise ValidationError("oracle must satisfy phi(a) = 0")


class DiagonalSequence(SignedSequence):
    """Signed sequence converging at every point of ``[a, b]`` for a unit-variation BV oracle.

    Block ``m`` (of length ``m``) lists the first ``m`` terms of the signed
    sequence of approximant ``K(m)``.  Approximant ``k`` is the polygonal
    approximation of level ``k`` rescaled to unit variation; a degenerate level
    (zero variation) is replaced by the next nondegenerate one.
    """

    def __init__(self, oracle: BVOracle):
        _check_unit_oracle(oracle)
        self.oracle = oracle
        self._approximants: dict[int, Approximant] = {}
        self._thresholds: list[int] = []
        self._counts: list[int] = []
        self._block_k: list[int] = []
        super().__init__(self._blocks(), oracle.domain)

    def approximant(self, k: int) -> Approximant:
        if k not in self._approximants:
            level = k
            while True:
                poly = polygonal_approximation(self.oracle, level)
                try:
                    phi = normalize(poly.phi)
                    break
                except DegenerateMeasureError:
                    level += 1
                    if level > k + 64:
                        raise
            self._approximants[k] = Approximant(
                k, level, poly, phi, total_variation(phi), sign_density(phi)
            )
        return self._approximants[k]

    def _extend_schedule(self, m: int) -> None:
        while not self._thresholds or self._thresholds[-1] <= m:
            k = len(self._thresholds) + 1
            B = self.approximant(k).sign_changes
            self._thresholds.append(threshold(B, k, self._thresholds[-1] if self._thresholds else 0))
            self._counts.append(B)

    @property
    def schedule(self) -> ArrangementSchedule:
        return ArrangementSchedule(tuple(self._thresholds), tuple(self._counts))

    def assignment(self, m: int) -> int:
        self._extend_schedule(m)
        return bisect.bisect_right(self._thresholds, m) + 1

    def _blocks(self):
        m = 1
        while True:
            k = self.assignment(m)
            self._block_k.append(k)
            yield self.approximant(k).terms(m)
            m += 1

    def governing_indices(self, N: int) -> np.ndarray:
        """Approximant index ``K(m)`` of the block containing each of the first ``N`` terms."""
        self.take(N)
        return np.repeat(np.array(self._block_k), np.arange(1, len(self._block_k) + 1))[:N]


def diagonal_signed_sequence(oracle: BVOracle) -> DiagonalSequence:
    """Infinite signed stream realizing the oracle's unit-variation BV function."""
    return DiagonalSequence(oracle)


# ---------------------------------------------------------------------------
# Random sampler
# ---------------------------------------------------------------------------


def philox_uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """Uniforms ``k * 2**-53`` from the top 53 bits of Philox-4x64 outputs.

    The key is derived from ``seed`` via :class:`numpy.random.SeedSequence`;
    output ``i`` of the stream depends only on ``(seed, i)``.
    """
    bg = np.random.Philox(np.random.SeedSequence(seed))
    if start:
        bg.advance(start // 4)
        skip = start % 4
    else:
        skip = 0
    raw = bg.random_raw(count + skip)[skip:]
    return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53


def iid_sampler(phi: PLJFunction, seed: int, chunk: int = 65536) -> SignedSequence:
    """i.i.d. points from ``|mu|`` with signs ``h(x)``, reproducible per ``seed``."""
    _require_unit(phi)
    ups = total_variation(phi) / phi.variation()
    h = sign_density(phi)

    def chunks():
        # Philox advances in blocks of four 64-bit outputs, so chunk is a multiple of 4.
        start = 0
        size = 4 * max(1, chunk // 4)
        while True:
            x = generalized_inverse(ups, philox_uniforms(seed, start, size))
            yield x, h(x)
            start += size

    return SignedSequence(chunks(), phi.domain)
