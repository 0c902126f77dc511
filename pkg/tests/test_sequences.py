import math

import numpy as np
import pytest
from scipy.stats import qmc

from oracles import RawPLJ, classical_star_discrepancy, first_threshold, grid_star_discrepancy
from signedud import (
    ArrangementSchedule,
    BVOracle,
    DegenerateMeasureError,
    PLJFunction,
    SignedPrefix,
    ValidationError,
    arrangement_schedule,
    diagonal_signed_sequence,
    empirical_cdf,
    generalized_inverse,
    iid_sampler,
    jordan,
    schedule_bound,
    sign_density,
    signed_sequence_polygonal,
    star_discrepancy_signed,
    ud_continuous_increasing,
    van_der_corput,
)
from signedud.sequences import philox_uniforms, threshold, van_der_corput_array

IDENTITY = PLJFunction.linear()
TENT = PLJFunction.polygon([0.0, 0.5, 1.0], [0.0, 0.5, 0.0])  # unit variation
TALL_TENT = TENT * 2.0
TWO_JUMPS = PLJFunction.step((0.0, 1.0), [1 / 3, 2 / 3], [0.5, -0.5])


@pytest.mark.parametrize("n, x", [(1, 0.5), (2, 0.25), (3, 0.75), (4, 0.125), (6, 0.375)])
def test_van_der_corput(n, x):
    assert van_der_corput(n) == x


def test_van_der_corput_array_matches_scalar():
    assert van_der_corput_array(1, 300).tolist() == [van_der_corput(n) for n in range(1, 300)]


@pytest.mark.parametrize("start", [1, 5, 4096, 2**20 + 3])
def test_van_der_corput_matches_unscrambled_halton(start):
    h = qmc.Halton(d=1, scramble=False)
    h.fast_forward(start)
    assert np.array_equal(van_der_corput_array(start, start + 3000), h.random(3000)[:, 0])


def test_generalized_inverse_examples():
    assert generalized_inverse(IDENTITY, 0.3) == 0.3
    plateau = PLJFunction.polygon([0.0, 1 / 3, 2 / 3, 1.0], [0.0, 0.5, 0.5, 1.0])
    assert generalized_inverse(plateau, 0.5) == pytest.approx(1 / 3, abs=1e-15)
    jump = PLJFunction([0.0, 0.5, 1.0], [0.0, 0.2, 1.0], [0.0, 0.8, 1.0])
    assert generalized_inverse(jump, 0.5) == 0.5
    assert generalized_inverse(jump, 0.2) == 0.5


def test_generalized_inverse_is_the_infimum():
    g = PLJFunction.polygon([0.0, 0.2, 0.5, 0.7, 1.0], [0.0, 0.3, 0.3, 0.9, 1.0])
    t = np.linspace(0, 1, 201)
    x = generalized_inverse(g, t)
    grid = np.linspace(0, 1, 200001)
    gv = g.value(grid)
    brute = grid[np.minimum(np.searchsorted(gv, t - 1e-12, side="left"), grid.size - 1)]
    assert np.abs(x - brute).max() <= 1e-5
    assert np.all(g.value(x) >= t - 1e-12)


def test_generalized_inverse_callable_and_clamping():
    assert generalized_inverse(lambda x: x**2, 0.25, (0.0, 1.0)) == pytest.approx(0.5, abs=1e-14)
    with pytest.warns(UserWarning):
        assert generalized_inverse(IDENTITY, 1.5) == 1.0


def test_ud_examples():
    assert ud_continuous_increasing(IDENTITY, 3).tolist() == [0.5, 0.25, 0.75]
    x = ud_continuous_increasing(lambda t: t**2, 1)
    assert x[0] == pytest.approx(0.7071067811865476, abs=1e-15)


def test_ud_identity_meets_bound_against_classical_formula():
    for N in (16, 100, 1000, 4096):
        u = ud_continuous_increasing(IDENTITY, N)
        d = classical_star_discrepancy(u)
        assert d == pytest.approx(star_discrepancy_signed(u, IDENTITY), abs=1e-15)
        assert d <= math.log(N + 1) / (N * math.log(2))


def test_ud_rejects_bad_distributions():
    with pytest.raises(ValidationError):
        ud_continuous_increasing(PLJFunction.step((0.0, 1.0), [0.5], [1.0]), 4)
    with pytest.raises(ValidationError):
        ud_continuous_increasing(TENT, 4)
    with pytest.raises(ValidationError):
        ud_continuous_increasing(PLJFunction.linear(slope=2.0), 4)


def test_identity_signs_are_positive():
    assert np.all(signed_sequence_polygonal(IDENTITY, 500).signs == 1)


def test_tent_signs_follow_slope():
    s = signed_sequence_polygonal(TENT, 4096)
    assert np.array_equal(s.signs == 1, s.points < 0.5)
    assert abs(s.signs.mean()) < 0.01


def test_negative_step_is_a_single_negative_atom():
    s = signed_sequence_polygonal(PLJFunction.step((0.0, 1.0), [0.5], [-1.0]), 64)
    assert np.all(s.points == 0.5) and np.all(s.signs == -1)


def test_polygonal_sequence_requires_unit_variation():
    with pytest.raises(ValidationError):
        signed_sequence_polygonal(TALL_TENT, 10)


def test_first_threshold_from_linear_scan():
    assert threshold(0, 1) == first_threshold(0, 1) == 6
    assert schedule_bound(0, 6) <= 1.0 < schedule_bound(0, 5)


def test_schedule_against_linear_scan():
    B = [1, 3, 0, 2, 5]
    sch = arrangement_schedule(B)
    expect, prev = [], 0
    for k, b in enumerate(B, 1):
        prev = first_threshold(b, k, prev)
        expect.append(prev)
    assert list(sch.thresholds) == expect
    assert all(sch.bound_at_threshold(k) <= 1 / k for k in range(1, 6))
    assert sch.assignment(1) == 1 and sch.assignment(expect[0]) == 2
    with pytest.raises(ValidationError):
        sch.assignment(expect[-1])
    assert ArrangementSchedule.from_dict(sch.to_dict()) == sch


def test_schedule_measured_discrepancy_within_bound():
    seq = diagonal_signed_sequence(BVOracle.from_plj(TENT))
    seq.take(4000)
    sch = seq.schedule
    for k in range(1, sch.K_max + 1):
        ap = seq.approximant(k)
        m = sch.thresholds[k - 1]
        x, e = ap.terms(m)
        assert star_discrepancy_signed(SignedPrefix(x, e, (0.0, 1.0)), ap.phi) <= 1 / k


def test_diagonal_sign_fidelity():
    seq = diagonal_signed_sequence(BVOracle.from_plj(TWO_JUMPS))
    pre = seq.take(5000)
    ks = seq.governing_indices(5000)
    for k in np.unique(ks):
        sel = ks == k
        assert np.array_equal(pre.signs[sel], seq.approximant(int(k)).h(pre.points[sel]))


def test_diagonal_blocks_are_prefixes_of_approximant_sequences():
    seq = diagonal_signed_sequence(BVOracle.from_plj(TENT))
    pre = seq.take(55)  # blocks 1..10
    start = 0
    for m in range(1, 11):
        x, e = seq.approximant(seq.assignment(m)).terms(m)
        assert np.array_equal(pre.points[start : start + m], x)
        start += m


def test_diagonal_tent_and_step_targets():
    tent = diagonal_signed_sequence(BVOracle.from_plj(TENT)).take(100000)
    assert abs(empirical_cdf(tent, 0.75, signed=False) - 0.75) < 0.05
    assert abs(empirical_cdf(tent, 0.75) - 0.25) < 0.05
    step = diagonal_signed_sequence(BVOracle.from_plj(TWO_JUMPS)).take(100000)
    assert abs(empirical_cdf(step, 0.5) - 0.5) < 0.05
    assert abs(step.signs.mean()) < 0.05


def test_diagonal_increasing_reproduces_unsigned_case():
    sq = BVOracle.increasing(lambda x: np.asarray(x) ** 2)
    pre = diagonal_signed_sequence(sq).take(100000)
    assert np.all(pre.signs == 1)
    probes = np.linspace(0, 1, 21)
    assert np.abs(empirical_cdf(pre, probes) - probes**2).max() < 0.05


def test_diagonal_rejects_degenerate_and_nonunit():
    zero = BVOracle((0.0, 1.0), lambda x: np.zeros_like(np.asarray(x, float)), lambda x: np.zeros_like(np.asarray(x, float)))
    with pytest.raises(DegenerateMeasureError):
        diagonal_signed_sequence(zero)
    with pytest.raises(ValidationError):
        diagonal_signed_sequence(BVOracle.from_plj(TALL_TENT))


def test_philox_offsets_are_consistent():
    full = philox_uniforms(42, 0, 40)
    for start in (1, 4, 7, 13):
        assert np.array_equal(philox_uniforms(42, start, 40 - start), full[start:])
    assert np.all((full >= 0) & (full < 1))


def test_sampler_is_reproducible_and_signed():
    phi = TENT
    a = iid_sampler(phi, seed=9, chunk=1000).take(5000)
    b = iid_sampler(phi, seed=9, chunk=4096).take(5000)
    assert np.array_equal(a.points, b.points) and np.array_equal(a.signs, b.signs)
    assert np.array_equal(a.signs, sign_density(phi)(a.points))
    c = iid_sampler(phi, seed=10).take(5000)
    assert not np.array_equal(a.points, c.points)


def test_sampler_identity_is_uniform():
    s = iid_sampler(IDENTITY, seed=1).take(20000)
    assert np.all(s.signs == 1)
    assert classical_star_discrepancy(s.points) < 1.63 / math.sqrt(20000) * 3


def test_sampler_sign_frequency():
    phi = TENT
    mass = float(jordan(phi).p.value(1.0))
    N = 100000
    s = iid_sampler(phi, seed=3).take(N)
    sigma = math.sqrt(mass * (1 - mass) / N)
    assert abs(np.mean(s.signs == 1) - mass) <= 3 * sigma


def test_grid_oracle_agrees_for_ud_prefix():
    sq = PLJFunction.polygon(np.linspace(0, 1, 9), np.linspace(0, 1, 9) ** 2)
    u = ud_continuous_increasing(sq, 37)
    grid = np.union1d(np.linspace(0, 1, 100001), np.union1d(u, sq.t))
    d = star_discrepancy_signed(SignedPrefix.unsigned(u), sq)
    assert d == pytest.approx(grid_star_discrepancy(u, np.full(37, 1 / 37), RawPLJ(sq.to_dict()), grid), abs=1e-12)
