"""Finite signed measures and piecewise-linear-with-jumps BV functions.

A signed Borel measure on ``[a, b]`` is represented through its distribution
function ``phi`` with ``mu((y, x]) = phi(x) - phi(y)``.  The computable class
used throughout the package is :class:`PLJFunction`: finitely many nodes,
linear pieces between them and a jump allowed at every node.  For such
functions the total, positive and negative variations and the sign density
``h = d mu / d|mu|`` are available in closed form.  Anything outside this
class (smooth or singular parts) enters through a :class:`BVOracle`.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Hashable, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import DegenerateMeasureError, OracleInconsistencyError, ValidationError

#: Tolerance used for the algebraic identities (sums of weights, Jordan identities).
IDENTITY_TOL = 1e-12


def _frozen(a: Any, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# Finite signed measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FiniteSignedMeasure:
    """Finitely many atoms ``(location, weight)`` with nonzero weights.

    Locations are arbitrary hashable labels (strings, integers, reals).
    """

    locations: tuple
    weights: np.ndarray

    def __init__(self, locations: Sequence[Hashable], weights: Sequence[float]):
        locations = tuple(locations)
        w = _frozen(weights)
        if w.ndim != 1 or len(locations) != w.size:
            raise ValidationError("locations and weights must be 1-d of equal length")
        if w.size == 0:
            raise ValidationError("a finite measure needs at least one atom")
        if not np.all(np.isfinite(w)):
            raise ValidationError("weights must be finite")
        if np.any(w == 0.0):
            raise ValidationError("atom weights must be nonzero")
        if len(set(locations)) != len(locations):
            raise ValidationError("atom locations must be pairwise distinct")
        object.__setattr__(self, "locations", locations)
        object.__setattr__(self, "weights", w)

    @classmethod
    def probability(cls, locations, weights) -> "FiniteSignedMeasure":
        mu = cls(locations, weights)
        mu.require_probability()
        return mu

    def __len__(self) -> int:
        return self.weights.size

    @property
    def size(self) -> int:
        """Cardinality of the support."""
        return self.weights.size

    @property
    def norm(self) -> float:
        """Total variation ``|mu|(X)``."""
        return float(np.abs(self.weights).sum())

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    def is_probability(self, tol: float = IDENTITY_TOL) -> bool:
        return bool(np.all(self.weights > 0) and abs(self.mass - 1.0) <= tol)

    def require_probability(self) -> None:
        if not self.is_probability():
            raise ValidationError(
                "expected a probability measure (positive weights summing to 1), "
                f"got total mass {self.mass!r}"
            )

    def is_unit(self, tol: float = IDENTITY_TOL) -> bool:
        return abs(self.norm - 1.0) <= tol

    def total_variation_measure(self) -> "FiniteSignedMeasure":
        return FiniteSignedMeasure(self.locations, np.abs(self.weights))

    def signs(self) -> np.ndarray:
        """Radon-Nikodym derivative ``d mu / d|mu|`` on the atoms."""
        return np.where(self.weights > 0, 1, -1)

    def normalized(self) -> "FiniteSignedMeasure":
        return FiniteSignedMeasure(self.locations, self.weights / self.norm)

    def integrate(self, f) -> float:
        """``sum_x f(x) mu({x})``; ``f`` is a callable on locations or a value array."""
        return float(np.dot(_atom_values(self, f), self.weights))


def _atom_values(mu: FiniteSignedMeasure, f) -> np.ndarray:
    if callable(f):
        return np.array([f(x) for x in mu.locations], dtype=float)
    vals = np.asarray(f, dtype=float)
    if vals.shape != (mu.size,):
        raise ValidationError("function values must match the number of atoms")
    return vals


# ---------------------------------------------------------------------------
# Piecewise-linear-with-jumps functions
# ---------------------------------------------------------------------------


class PLJFunction:
    """Piecewise linear function with jumps on ``[a, b]``.

    Stored as nodes ``t_0 = a < ... < t_M = b`` and, at every node, the left
    limit ``left[i]`` and right limit ``right[i]``.  Between ``t_i`` and
    ``t_{i+1}`` the function is the segment from ``right[i]`` to ``left[i+1]``.

    Conventions: ``phi(a) = left[0]`` and ``phi(a+) = right[0]``; at interior
    nodes and at ``b`` the value is the right value, so ``phi`` is right
    continuous on ``(a, b)`` and ``phi(b) = right[M]``.  The jump at node ``i``
    is ``right[i] - left[i]``.
    """

    __slots__ = ("t", "left", "right")

    def __init__(self, t, left, right):
        t = _frozen(t)
        left = _frozen(left)
        right = _frozen(right)
        if t.ndim != 1 or t.size < 2:
            raise ValidationError("need at least two nodes")
        if left.shape != t.shape or right.shape != t.shape:
            raise ValidationError("left/right values must have one entry per node")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(left)) and np.all(np.isfinite(right))):
            raise ValidationError("nodes and values must be finite")
        if np.any(np.diff(t) <= 0):
            raise ValidationError("nodes must be strictly increasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    def __setattr__(self, name, value):
        raise AttributeError("PLJFunction is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def polygon(cls, t, y) -> "PLJFunction":
        """Continuous polygonal function through ``(t_i, y_i)``."""
        y = np.asarray(y, dtype=float)
        return cls(t, y, y)

    @classmethod
    def linear(cls, domain=(0.0, 1.0), slope=1.0, intercept=0.0) -> "PLJFunction":
        a, b = domain
        return cls.polygon([a, b], [intercept + slope * a, intercept + slope * b])

    @classmethod
    def from_slopes(cls, t, slopes, jumps=None, start=0.0) -> "PLJFunction":
        """Build from piece slopes and node jumps, with ``phi(a) = start``.

        ``jumps`` has one entry per node (``jumps[0]`` is the jump at ``a``).
        """
        t = np.asarray(t, dtype=float)
        slopes = np.asarray(slopes, dtype=float)
        if slopes.shape != (t.size - 1,):
            raise ValidationError("need one slope per piece")
        jumps = np.zeros(t.size) if jumps is None else np.asarray(jumps, dtype=float)
        if jumps.shape != t.shape:
            raise ValidationError("need one jump per node")
        left = np.empty(t.size)
        right = np.empty(t.size)
        left[0] = start
        right[0] = start + jumps[0]
        for i in range(t.size - 1):
            left[i + 1] = right[i] + slopes[i] * (t[i + 1] - t[i])
            right[i + 1] = left[i + 1] + jumps[i + 1]
        return cls(t, left, right)

    @classmethod
    def step(cls, domain, locations, heights, base=0.0) -> "PLJFunction":
        """Right-continuous step function: ``base`` plus jumps at ``locations``."""
        a, b = domain
        locations = np.asarray(locations, dtype=float)
        heights = np.asarray(heights, dtype=float)
        if locations.shape != heights.shape:
            raise ValidationError("one height per jump location")
        if np.any((locations < a) | (locations > b)):
            raise ValidationError("jump locations must lie in the domain")
        t = np.unique(np.concatenate([[a, b], locations]))
        jumps = np.zeros(t.size)
        for loc, h in zip(locations, heights):
            jumps[np.searchsorted(t, loc)] += h
        return cls.from_slopes(t, np.zeros(t.size - 1), jumps, start=base)

    # -- basic structure ----------------------------------------------------

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.t[0]), float(self.t[-1])

    @property
    def a(self) -> float:
        return float(self.t[0])

    @property
    def b(self) -> float:
        return float(self.t[-1])

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.t)

    @property
    def slopes(self) -> np.ndarray:
        return (self.left[1:] - self.right[:-1]) / np.diff(self.t)

    @property
    def increments(self) -> np.ndarray:
        """Change of the function across each open piece."""
        return self.left[1:] - self.right[:-1]

    @property
    def jumps(self) -> np.ndarray:
        return self.right - self.left

    @property
    def is_continuous(self) -> bool:
        return bool(np.all(self.jumps == 0.0))

    def is_nondecreasing(self, tol: float = 0.0) -> bool:
        return bool(np.all(self.increments >= -tol) and np.all(self.jumps >= -tol))

    def __repr__(self) -> str:
        return f"PLJFunction(domain={self.domain}, nodes={self.t.size})"

    def equals(self, other: "PLJFunction") -> bool:
        """Bit-exact equality of the representation."""
        return (
            np.array_equal(self.t, other.t)
            and np.array_equal(self.left, other.left)
            and np.array_equal(self.right, other.right)
        )

    # -- evaluation ---------------------------------------------------------

    def _check_in_domain(self, x: np.ndarray) -> None:
        if np.any((x < self.t[0]) | (x > self.t[-1])) or np.any(np.isnan(x)):
            raise ValidationError(f"evaluation point outside domain {self.domain}")

    def _interior(self, x: np.ndarray) -> np.ndarray:
        # Linear interpolation on the piece containing x (right-closed convention).
        i = np.clip(np.searchsorted(self.t, x, side="right") - 1, 0, self.t.size - 2)
        return self.right[i] + self.slopes[i] * (x - self.t[i])

    def _on_node(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        j = np.clip(np.searchsorted(self.t, x, side="left"), 0, self.t.size - 1)
        return j, self.t[j] == x

    def value(self, x):
        """``phi(x)`` with the node conventions described on the class."""
        xa = np.asarray(x, dtype=float)
        self._check_in_domain(xa)
        out = self._interior(xa)
        j, hit = self._on_node(xa)
        out = np.where(hit, np.where(j == 0, self.left[0], self.right[j]), out)
        return float(out) if out.ndim == 0 else out

    __call__ = value

    def left_limit(self, x):
        """``phi(x-)``; at ``a`` this is ``phi(a)``."""
        xa = np.asarray(x, dtype=float)
        self._check_in_domain(xa)
        out = self._interior(xa)
        j, hit = self._on_node(xa)
        out = np.where(hit, self.left[j], out)
        return float(out) if out.ndim == 0 else out

    def right_limit(self, x):
        """``phi(x+)``; at ``b`` this is ``phi(b)``."""
        xa = np.asarray(x, dtype=float)
        self._check_in_domain(xa)
        out = self._interior(xa)
        j, hit = self._on_node(xa)
        out = np.where(hit, self.right[j], out)
        return float(out) if out.ndim == 0 else out

    # -- algebra ------------------------------------------------------------

    def refine(self, nodes) -> "PLJFunction":
        """Same function on the node set ``self.t`` union ``nodes``."""
        nodes = np.asarray(nodes, dtype=float)
        self._check_in_domain(nodes)
        t = np.union1d(self.t, nodes)
        if t.size == self.t.size:
            return self
        left = self.left_limit(t)
        right = self.right_limit(t)
        left[0] = self.left[0]
        return PLJFunction(t, left, right)

    def _binary(self, other, op) -> "PLJFunction":
        if isinstance(other, PLJFunction):
            if other.domain != self.domain:
                raise ValidationError("domains differ")
            f, g = self.refine(other.t), other.refine(self.t)
            return PLJFunction(f.t, op(f.left, g.left), op(f.right, g.right))
        c = float(other)
        return PLJFunction(self.t, op(self.left, c), op(self.right, c))

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return PLJFunction(self.t, -self.left, -self.right)

    def __mul__(self, c):
        c = float(c)
        return PLJFunction(self.t, self.left * c, self.right * c)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / float(c))

    def variation(self) -> float:
        """Exact total variation ``V_a^b phi``."""
        return float(np.abs(self.increments).sum() + np.abs(self.jumps).sum())

    # -- (de)serialization --------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "domain": [self.a, self.b],
            "nodes": [
                {"t": float(t), "left": float(l), "right": float(r)}
                for t, l, r in zip(self.t, self.left, self.right)
            ],
            "slopes": [float(s) for s in self.slopes],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PLJFunction":
        try:
            nodes = d["nodes"]
            t = [n["t"] for n in nodes]
            left = [n["left"] for n in nodes]
            right = [n["right"] for n in nodes]
            domain = d["domain"]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed PLJ function: missing {exc}") from None
        phi = cls(t, left, right)
        if len(domain) != 2 or (float(domain[0]), float(domain[1])) != phi.domain:
            raise ValidationError("'domain' must equal the first and last node")
        if "slopes" in d:
            s = np.asarray(d["slopes"], dtype=float)
            if s.shape != phi.slopes.shape or not np.allclose(s, phi.slopes, rtol=1e-9, atol=1e-12):
                raise ValidationError("'slopes' inconsistent with node values")
        return phi


# ---------------------------------------------------------------------------
# Variation, Jordan decomposition, sign density
# ---------------------------------------------------------------------------


def _cumulative(phi: PLJFunction, piece: np.ndarray, jump: np.ndarray) -> PLJFunction:
    left = np.empty_like(phi.t)
    right = np.empty_like(phi.t)
    left[0] = 0.0
    right[0] = jump[0]
    acc = right[0]
    for i in range(phi.t.size - 1):
        acc += piece[i]
        left[i + 1] = acc
        acc += jump[i + 1]
        right[i + 1] = acc
    return PLJFunction(phi.t, left, right)


def total_variation(phi: PLJFunction) -> PLJFunction:
    """Variation function ``x -> V_a^x phi`` as a PLJ function on the same nodes."""
    return _cumulative(phi, np.abs(phi.increments), np.abs(phi.jumps))


@dataclass(frozen=True, eq=False)
class JordanDecomposition:
    """Total, positive and negative variation functions of a PLJ function."""

    upsilon: PLJFunction
    p: PLJFunction
    n: PLJFunction

    def probe_points(self) -> np.ndarray:
        t = self.upsilon.t
        return np.concatenate([t, 0.5 * (t[1:] + t[:-1])])

    def check(self, phi: PLJFunction, tol: float = IDENTITY_TOL) -> None:
        """Raise ``AssertionError`` unless the Jordan identities hold at probe points."""
        x = self.probe_points()
        scale = max(1.0, self.upsilon.right[-1])
        for f in (self.upsilon, self.p, self.n):
            assert f.value(f.a) == 0.0
            assert f.is_nondecreasing()
        for ev in ("value", "left_limit", "right_limit"):
            u, p, n, f = (getattr(g, ev)(x) for g in (self.upsilon, self.p, self.n, phi))
            assert np.all(np.abs(u - (p + n)) <= tol * scale)
            assert np.all(np.abs((f - phi.value(phi.a)) - (p - n)) <= tol * scale)


def jordan(phi: PLJFunction) -> JordanDecomposition:
    """Jordan decomposition ``phi - phi(a) = p - n`` with ``upsilon = p + n``.

    ``p`` and ``n`` are accumulated from the positive and negative parts of
    the piece increments and jumps, which equals
    ``p = (upsilon + phi - phi(a)) / 2`` and keeps them exactly monotone.
    """
    inc, jmp = phi.increments, phi.jumps
    return JordanDecomposition(
        upsilon=total_variation(phi),
        p=_cumulative(phi, np.maximum(inc, 0.0), np.maximum(jmp, 0.0)),
        n=_cumulative(phi, np.maximum(-inc, 0.0), np.maximum(-jmp, 0.0)),
    )


@dataclass(frozen=True, eq=False)
class SignDensity:
    """Sign density ``h = d mu / d|mu|`` of a PLJ function.

    ``edges`` are the parent's nodes; piece ``i`` is ``[edges[i], edges[i+1])``
    (the last piece is closed) and carries ``piece_signs[i]``.  Nodes with a
    nonzero jump carry ``atom_signs`` and override the piece sign there.
    """

    edges: np.ndarray
    piece_signs: np.ndarray
    atom_locations: np.ndarray
    atom_signs: np.ndarray

    @property
    def pieces(self) -> list[tuple[tuple[float, float], int]]:
        return [
            ((float(lo), float(hi)), int(s))
            for lo, hi, s in zip(self.edges[:-1], self.edges[1:], self.piece_signs)
        ]

    @property
    def atoms(self) -> list[tuple[float, int]]:
        return [(float(x), int(s)) for x, s in zip(self.atom_locations, self.atom_signs)]

    def __call__(self, x):
        xa = np.asarray(x, dtype=float)
        i = np.clip(np.searchsorted(self.edges, xa, side="right") - 1, 0, self.piece_signs.size - 1)
        out = self.piece_signs[i]
        if self.atom_locations.size:
            j = np.clip(np.searchsorted(self.atom_locations, xa), 0, self.atom_locations.size - 1)
            out = np.where(self.atom_locations[j] == xa, self.atom_signs[j], out)
        return int(out) if out.ndim == 0 else out.astype(int)

    def sign_changes(self) -> int:
        """Number of sign changes between consecutive pieces."""
        return int(np.count_nonzero(np.diff(self.piece_signs)))

    def to_dict(self) -> dict:
        return {
            "pieces": [{"lo": lo, "hi": hi, "sign": s} for (lo, hi), s in self.pieces],
            "atoms": [{"x": x, "sign": s} for x, s in self.atoms],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SignDensity":
        pieces = d["pieces"]
        edges = [p["lo"] for p in pieces] + [pieces[-1]["hi"]]
        return cls(
            _frozen(edges),
            _frozen([p["sign"] for p in pieces], dtype=int),
            _frozen([a["x"] for a in d["atoms"]]),
            _frozen([a["sign"] for a in d["atoms"]], dtype=int),
        )


def _negligible(values: np.ndarray, scale: float) -> np.ndarray:
    return np.abs(values) <= 1e-14 * scale


def sign_density(phi: PLJFunction) -> SignDensity:
    """Sign of ``phi``'s slope on each piece and of each jump.

    Pieces with zero slope are ``|mu|``-null and get sign ``+1``.  Increments
    and jumps below ``1e-14`` times the total variation count as zero.
    """
    scale = max(phi.variation(), np.finfo(float).tiny)
    inc, jmp = phi.increments, phi.jumps
    signs = np.where((inc < 0) & ~_negligible(inc, scale), -1, 1)
    has_atom = ~_negligible(jmp, scale)
    return SignDensity(
        edges=phi.t,
        piece_signs=_frozen(signs, dtype=int),
        atom_locations=_frozen(phi.t[has_atom]),
        atom_signs=_frozen(np.where(jmp[has_atom] > 0, 1, -1), dtype=int),
    )


def measure_of_interval(phi: PLJFunction, y: float, x: float) -> float:
    """``mu((y, x]) = phi(x) - phi(y)``."""
    a, b = phi.domain
    if not (a <= y < x <= b):
        raise ValidationError(f"need a <= y < x <= b, got y={y!r}, x={x!r} on {phi.domain}")
    return float(phi.value(x) - phi.value(y))


def normalize(phi: PLJFunction) -> PLJFunction:
    """Scale ``phi`` to unit total variation."""
    v = phi.variation()
    if not v > 0.0:
        raise DegenerateMeasureError("cannot normalize a function of zero total variation")
    return phi / v


# ---------------------------------------------------------------------------
# Oracles and polygonal approximation
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BVOracle:
    """Black-box access to a BV function on ``domain``.

    ``eval_phi`` and ``eval_upsilon`` are vectorized callables; ``jumps_exceeding``
    maps a threshold to ``[(location, jump_size), ...]`` for all points where
    the variation function jumps by more than the threshold.  ``breakpoints``
    optionally lists nodes that should be included in partitions.  ``positive``
    and ``negative`` optionally evaluate ``p`` and ``n`` directly; otherwise
    they are derived from ``phi`` and ``upsilon``.
    """

    domain: tuple[float, float]
    eval_phi: Callable
    eval_upsilon: Callable
    jumps_exceeding: Callable = field(default=lambda threshold: [])
    breakpoints: np.ndarray | None = None
    positive: Callable | None = None
    negative: Callable | None = None

    @classmethod
    def from_plj(cls, phi: PLJFunction) -> "BVOracle":
        ups = total_variation(phi)
        jumps = np.abs(phi.jumps)

        def exceeding(threshold: float):
            # Endpoints are always partition nodes; only interior jumps matter.
            mask = jumps > threshold
            mask[0] = mask[-1] = False
            return [(float(x), float(j)) for x, j in zip(phi.t[mask], jumps[mask])]

        jd = jordan(phi)
        return cls(phi.domain, phi.value, ups.value, exceeding, phi.t, jd.p.value, jd.n.value)

    @classmethod
    def increasing(cls, f: Callable, domain=(0.0, 1.0)) -> "BVOracle":
        """Oracle for a continuous nondecreasing ``f``."""
        a = domain[0]
        fa = float(f(np.float64(a)))
        return cls(tuple(map(float, domain)), f, lambda x: np.asarray(f(x)) - fa)

    def eval_p(self, x):
        if self.positive is not None:
            return self.positive(x)
        a = self.domain[0]
        return 0.5 * (np.asarray(self.eval_upsilon(x)) + self.eval_phi(x) - self.eval_phi(np.float64(a)))

    def eval_n(self, x):
        if self.negative is not None:
            return self.negative(x)
        a = self.domain[0]
        return 0.5 * (np.asarray(self.eval_upsilon(x)) - self.eval_phi(x) + self.eval_phi(np.float64(a)))


@dataclass(frozen=True, eq=False)
class PolygonalApproximation:
    """Output of :func:`polygonal_approximation`.

    ``phi`` equals ``g - h`` where ``g`` and ``h`` interpolate the positive and
    negative variation of the target at the partition ``nodes``; ``jordan`` is
    the exact Jordan decomposition of ``phi`` itself.
    """

    k: int
    nodes: np.ndarray
    g: PLJFunction
    h: PLJFunction
    phi: PLJFunction
    jordan: JordanDecomposition

    def __iter__(self):
        yield self.phi
        yield self.jordan


def grid_cells(k: int, length: float) -> int:
    """Number of uniform cells used by partition ``P_k``.

    The smallest power of two exceeding ``k**2 * length``: the mesh is below
    ``1/k**2 <= 1/k`` and the grids are nested in ``k``.
    """
    return 1 << max(0, math.floor(math.log2(k * k * length)) + 1)


def partition(oracle: BVOracle, k: int) -> np.ndarray:
    """Partition ``P_k``: nested dyadic grid, large jumps, and (few) breakpoints."""
    if k < 1:
        raise ValidationError("k must be a positive integer")
    a, b = oracle.domain
    cells = grid_cells(k, b - a)
    nodes = [a + (b - a) * np.arange(cells + 1) / cells]
    big = [x for x, _ in oracle.jumps_exceeding(1.0 / k) if a < x < b]
    nodes.append(np.asarray(big, dtype=float))
    if oracle.breakpoints is not None and len(oracle.breakpoints) <= 10 * k:
        nodes.append(np.asarray(oracle.breakpoints, dtype=float))
    t = np.unique(np.concatenate(nodes))
    t[0], t[-1] = a, b
    return t


def polygonal_approximation(oracle: BVOracle, k: int) -> PolygonalApproximation:
    """Continuous polygonal approximant ``phi_k = g_k - h_k`` of the oracle's function.

    ``g_k``/``h_k`` interpolate ``p``/``n`` linearly at the nodes of ``P_k``,
    so ``g_k(t) = p(t)`` and ``h_k(t) = n(t)`` at every node.
    Raises :class:`OracleInconsistencyError` if the sampled ``upsilon``, ``p``
    or ``n`` decrease.
    """
    t = partition(oracle, k)
    ups = np.asarray(oracle.eval_upsilon(t), dtype=float)
    p = np.asarray(oracle.eval_p(t), dtype=float)
    n = np.asarray(oracle.eval_n(t), dtype=float)
    scale = max(1.0, float(np.max(np.abs(ups))))
    tol = 1e-12 * scale
    if abs(ups[0]) > tol:
        raise OracleInconsistencyError(f"upsilon(a) = {ups[0]!r}, expected 0")
    for name, v in (("upsilon", ups), ("p", p), ("n", n)):
        if np.any(np.diff(v) < -tol):
            raise OracleInconsistencyError(f"sampled {name} is not nondecreasing")
    # Round-off below tol must not break monotonicity of g_k, h_k.
    p = np.maximum.accumulate(np.maximum(p, 0.0))
    n = np.maximum.accumulate(np.maximum(n, 0.0))
    g = PLJFunction.polygon(t, p)
    h = PLJFunction.polygon(t, n)
    phi_k = PLJFunction.polygon(t, p - n)
    return PolygonalApproximation(k, _frozen(t), g, h, phi_k, jordan(phi_k))
