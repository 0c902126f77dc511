"""Discrepancies, empirical functionals and Stieltjes integrals on ``[a, b]``.

The signed empirical distribution function of a prefix is
``F_N(x) = (1/N) sum_k eps_k chi_[a,x)(x_k)`` and its deviation from a target
is ``Delta(x) = F_N(x) - (phi(x) - phi(a))``.  Between consecutive events
(sample points and target nodes) ``Delta`` is affine, so its extreme values
are attained as one-sided limits at events; both discrepancies below are
exact maxima over those finitely many values.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from .errors import QuadratureError, ValidationError
from .measures import PLJFunction
from .sequences import SignedPrefix


def _as_prefix(prefix, domain=None) -> SignedPrefix:
    if isinstance(prefix, SignedPrefix):
        return prefix
    return SignedPrefix.unsigned(prefix, domain if domain is not None else (0.0, 1.0))


def _weights(prefix: SignedPrefix, weights) -> np.ndarray:
    if weights is None:
        return prefix.signs.astype(float) / len(prefix)
    w = np.asarray(weights, dtype=float)
    if w.shape != prefix.points.shape:
        raise ValidationError("one weight per point")
    return w


def deviation_values(prefix, target, weights=None) -> tuple[np.ndarray, np.ndarray]:
    """Events and every one-sided value of ``Delta`` attained there.

    ``target`` is a :class:`PLJFunction` or a continuous monotone vectorized
    callable on the prefix domain.  ``weights`` replaces the default point
    masses ``eps_k / N``.  Returns ``(events, values)`` where ``values`` has
    rows ``Delta(e-)``, ``Delta(e)``, ``Delta(e+)`` (the last row is ``0`` at
    ``b``, whose right side lies outside the domain).
    """
    prefix = _as_prefix(prefix, getattr(target, "domain", None))
    a, b = prefix.domain
    if isinstance(target, PLJFunction):
        if target.domain != prefix.domain:
            raise ValidationError(f"target domain {target.domain} differs from prefix domain {prefix.domain}")
        nodes = target.t
    else:
        nodes = np.array([a, b])
    w = _weights(prefix, weights)
    order = np.argsort(prefix.points, kind="stable")
    xs = prefix.points[order]
    cw = np.concatenate([[0.0], np.cumsum(w[order])])
    events = np.union1d(xs, nodes)
    F_left = cw[np.searchsorted(xs, events, side="left")]
    F_right = cw[np.searchsorted(xs, events, side="right")]
    if isinstance(target, PLJFunction):
        base = target.left[0]
        T = target.value(events) - base
        T_left = target.left_limit(events) - base
        T_right = target.right_limit(events) - base
    else:
        T = np.asarray(target(events), dtype=float) - float(target(np.float64(a)))
        T_left = T_right = T
    values = np.vstack([F_left - T_left, F_left - T, F_right - T_right])
    values[0, 0] = 0.0  # nothing lies left of a
    values[2, -1] = 0.0  # nor right of b
    return events, values


def star_discrepancy_signed(prefix, target, weights=None) -> float:
    """``sup_x |F_N(x) - (phi(x) - phi(a))|`` over ``x`` in ``[a, b]``."""
    _, v = deviation_values(prefix, target, weights)
    return float(np.abs(v).max())


def interval_discrepancy_signed(prefix, target, weights=None) -> float:
    """Sup over half-open intervals of the signed deviation: the oscillation ``max Delta - min Delta``."""
    _, v = deviation_values(prefix, target, weights)
    return float(v.max() - v.min())


def empirical_cdf(prefix: SignedPrefix, x, signed: bool = True) -> np.ndarray:
    """``(1/N) sum_k eps_k chi_[a,x)(x_k)`` (or without signs) at each ``x``."""
    w = prefix.signs.astype(float) if signed else np.ones(len(prefix))
    order = np.argsort(prefix.points, kind="stable")
    cw = np.concatenate([[0.0], np.cumsum(w[order])])
    return cw[np.searchsorted(prefix.points[order], np.asarray(x, dtype=float), side="left")] / len(prefix)


def kolmogorov_statistic(points, cdf: Callable) -> float:
    """Kolmogorov-Smirnov distance between the (right-continuous) ECDF of ``points`` and a continuous ``cdf``."""
    points = np.asarray(points.points if isinstance(points, SignedPrefix) else points, dtype=float)
    return float(stats.kstest(points, cdf).statistic)


@dataclass(frozen=True)
class EmpiricalFunctionals:
    """Averages targeting ``int f d|mu|``, ``int f dmu``, ``int f dmu+`` and ``int f dmu-``."""

    unsigned: float | np.ndarray
    signed: float | np.ndarray
    positive: float | np.ndarray
    negative: float | np.ndarray

    def as_tuple(self) -> tuple:
        return self.unsigned, self.signed, self.positive, self.negative


def _f_values(prefix: SignedPrefix, f) -> np.ndarray:
    try:
        # Constant callables such as ``lambda x: 1.0`` return a scalar.
        return np.broadcast_to(np.asarray(f(prefix.points), dtype=float), prefix.points.shape).copy()
    except (TypeError, ValueError):
        return np.array([float(f(x)) for x in prefix.points])


def empirical_functionals(prefix: SignedPrefix, f) -> EmpiricalFunctionals:
    """The four prefix averages of ``f``, ``eps f``, ``(1 + eps) f / 2`` and ``(1 - eps) f / 2``."""
    fx = _f_values(prefix, f)
    e = prefix.signs.astype(float)
    N = len(prefix)
    return EmpiricalFunctionals(
        float(fx.sum() / N),
        float((e * fx).sum() / N),
        float(((1 + e) * fx).sum() / (2 * N)),
        float(((1 - e) * fx).sum() / (2 * N)),
    )


def functional_traces(prefix: SignedPrefix, f) -> EmpiricalFunctionals:
    """The same four averages for every prefix length ``1..N`` (arrays)."""
    fx = _f_values(prefix, f)
    e = prefix.signs.astype(float)
    n = np.arange(1, len(prefix) + 1, dtype=float)
    return EmpiricalFunctionals(
        np.cumsum(fx) / n,
        np.cumsum(e * fx) / n,
        np.cumsum((1 + e) * fx) / (2 * n),
        np.cumsum((1 - e) * fx) / (2 * n),
    )


def riemann_stieltjes(f: Callable[[float], float], phi: PLJFunction, tol: float = 1e-10) -> float:
    """``int f dphi`` over ``[a, b]``: slope times ``int f`` per piece plus jump times ``f`` at each jump.

    Jumps at ``a`` count as an atom at ``a``.  Raises :class:`QuadratureError`
    if adaptive quadrature does not reach ``tol``.
    """
    total = 0.0
    for lo, hi, s in zip(phi.t[:-1], phi.t[1:], phi.slopes):
        if s == 0.0:
            continue
        val, err = integrate.quad(lambda x: float(f(x)), lo, hi, epsabs=tol, epsrel=tol, limit=200, full_output=1)[:2]
        if err > max(tol, tol * abs(val)) * 10:
            raise QuadratureError(f"quadrature on [{lo}, {hi}] reached only {err:.3g}")
        total += s * val
    jumps = phi.jumps
    for x, j in zip(phi.t[jumps != 0], jumps[jumps != 0]):
        total += j * float(f(x))
    return float(total)
