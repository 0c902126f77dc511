"""Invariants checked on generated instances."""

import math

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from oracles import RawPLJ, first_threshold, subset_discrepancy_enum
from signedud import (
    BlockPlan,
    FiniteSignedMeasure,
    MergedSequence,
    PLJFunction,
    SignedPrefix,
    c_constant,
    empirical_functionals,
    generalized_inverse,
    generate_finite,
    interval_discrepancy_signed,
    jordan,
    make_plan,
    normalize,
    schedule_bound,
    sign_density,
    signed_sequence_polygonal,
    star_discrepancy_signed,
    subset_discrepancy_trace,
    total_variation,
)
from signedud import io
from signedud.sequences import threshold

SLACK = 1e-12
PROFILE = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])

finite_floats = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


@st.composite
def weights(draw, max_m=12):
    m = draw(st.integers(1, max_m))
    raw = np.array(draw(st.lists(st.floats(0.01, 1.0), min_size=m, max_size=m)))
    return raw / raw.sum()


@st.composite
def plj(draw, jumps=True):
    M = draw(st.integers(1, 6))
    cuts = draw(st.lists(st.integers(1, 99), min_size=M - 1, max_size=M - 1, unique=True))
    t = np.concatenate([[0.0], np.sort(cuts) / 100, [1.0]])
    slopes = np.array(draw(st.lists(st.sampled_from([0.0, 1.0, -1.0]) | finite_floats, min_size=M, max_size=M)))
    j = np.array(draw(st.lists(st.sampled_from([0.0]) | finite_floats, min_size=M + 1, max_size=M + 1)))
    if not jumps:
        j[:] = 0.0
    return PLJFunction.from_slopes(t, slopes, j, start=draw(finite_floats))


@st.composite
def instance(draw):
    phi = draw(plj())
    N = draw(st.integers(1, 40))
    pool = st.sampled_from(phi.t.tolist()) | st.integers(0, 100).map(lambda k: k / 100) | st.floats(0, 1)
    x = np.array(draw(st.lists(pool, min_size=N, max_size=N)))
    e = np.array(draw(st.lists(st.sampled_from([-1, 1]), min_size=N, max_size=N)))
    return SignedPrefix(x, e, (0.0, 1.0)), phi


# -- finite spaces -----------------------------------------------------------


@PROFILE
@given(weights(), st.integers(1, 300))
def test_subset_bound_every_prefix(w, N):
    seq = generate_finite(FiniteSignedMeasure(range(w.size), w), N)
    tr = subset_discrepancy_trace(seq)
    assert np.all(tr * np.arange(1, N + 1) <= c_constant(w.size) + SLACK)


@PROFILE
@given(weights(max_m=9), st.integers(1, 60))
def test_closed_form_subset_discrepancy(w, N):
    seq = generate_finite(FiniteSignedMeasure(range(w.size), w), N)
    assert abs(subset_discrepancy_trace(seq)[-1] - subset_discrepancy_enum(seq.counts, w, N)) <= SLACK


@PROFILE
@given(st.lists(st.floats(0, 20), min_size=2, max_size=8), st.integers(1, 400))
def test_summability_rows_regular(constants, N):
    J = len(constants) - 1
    plan = make_plan(constants, J)
    ms = MergedSequence([iter(range(r)) for r in plan.lengths], plan=BlockPlan(plan.constants, plan.lengths))
    N = min(N, plan.total)
    if N > plan.lengths[0]:
        row = ms.summability_row(N)
        assert min(row) > 0 and abs(sum(row) - 1) <= SLACK
    j, s = ms.locate(N)
    assert ms.element(N) == s - 1


# -- measures ----------------------------------------------------------------


@PROFILE
@given(plj())
def test_jordan_identities(phi):
    jd = jordan(phi)
    x = np.linspace(0, 1, 257)
    scale = 1.0 + phi.variation() + abs(phi.left[0])
    assert np.abs(jd.p.value(x) - jd.n.value(x) + phi.left[0] - phi.value(x)).max() <= 1e-12 * scale
    assert np.abs(jd.p.value(x) + jd.n.value(x) - total_variation(phi).value(x)).max() <= 1e-12 * scale
    assert np.all(np.diff(jd.p.value(x)) >= -1e-12 * scale) and np.all(np.diff(jd.n.value(x)) >= -1e-12 * scale)


@PROFILE
@given(plj())
def test_plj_roundtrip(phi):
    text = io.dumps(io.to_document(phi))
    back = io.from_document(io.loads(text))
    assert back.equals(phi)
    raw = RawPLJ(phi.to_dict())
    x = np.linspace(0, 1, 101)
    scale = 1.0 + np.abs(phi.left).max() + np.abs(phi.right).max()
    assert np.abs(raw.minus(x) - phi.left_limit(x)).max() <= 1e-12 * scale
    assert np.abs(raw.plus(x) - phi.right_limit(x)).max() <= 1e-12 * scale


@PROFILE
@given(plj(jumps=False), st.lists(st.floats(0, 1), min_size=1, max_size=30))
def test_generalized_inverse_is_infimum(phi, ts):
    phi = phi - phi.left[0]
    if phi.variation() == 0:
        return
    g = total_variation(phi) / phi.variation()
    t = np.array(ts)
    x = generalized_inverse(g, t)
    assert np.all(g.value(x) >= t - 1e-12)
    below = np.maximum(x - 1e-9, 0.0)
    assert np.all((g.value(below) < t + 1e-12) | (x == 0.0))


# -- interval sequences --------------------------------------------------------


@PROFILE
@given(instance())
def test_star_interval_sandwich_and_jordan_subadditivity(inst):
    s, phi = inst
    Ds = star_discrepancy_signed(s, phi)
    D = interval_discrepancy_signed(s, phi)
    assert Ds <= D + SLACK and D <= 2 * Ds + SLACK
    jd = jordan(phi)
    N = len(s)
    Dp = interval_discrepancy_signed(s, jd.p, weights=(1 + s.signs) / (2 * N))
    Dn = interval_discrepancy_signed(s, jd.n, weights=(1 - s.signs) / (2 * N))
    assert D <= Dp + Dn + SLACK * (1 + phi.variation())


@PROFILE
@given(plj(), st.integers(1, 500))
def test_direct_sequence_sign_fidelity(phi, N):
    phi = phi - phi.left[0]
    if phi.variation() < 1e-6:
        return
    phi = normalize(phi)
    s = signed_sequence_polygonal(phi, N)
    assert np.array_equal(s.signs, sign_density(phi)(s.points))


@PROFILE
@given(st.integers(0, 40), st.integers(1, 60), st.integers(0, 10**6))
def test_threshold_is_the_first_admissible_m(B, k, after):
    m = threshold(B, k, after)
    assert m > after and schedule_bound(B, m) <= 1 / k
    assert m == after + 1 or schedule_bound(B, m - 1) > 1 / k
    if after < 2000 and B < 5:
        assert m == first_threshold(B, k, after)


@PROFILE
@given(instance(), st.sampled_from([np.cos, np.exp, lambda x: x**2 - 0.3]))
def test_functional_identities_are_exact(inst, f):
    s, _ = inst
    a, b, c, d = empirical_functionals(s, f).as_tuple()
    assert abs(c - (a + b) / 2) <= SLACK and abs(d - (a - b) / 2) <= SLACK


@PROFILE
@given(st.integers(1, 2**20))
def test_bound_and_schedule_monotone(m):
    assert schedule_bound(3, m + 1) < schedule_bound(3, m)
    assert math.isclose(schedule_bound(0, m), 2 * math.log2(m + 1) / m, rel_tol=1e-14)
