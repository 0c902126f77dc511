import itertools

import numpy as np
import pytest

from oracles import best_max_prefix_discrepancy, greedy_reference, subset_discrepancy_enum
from signedud import (
    FiniteSignedMeasure,
    ValidationError,
    c_constant,
    generate_finite,
    generate_signed_finite,
    iter_finite,
    mean_error_bounds,
    mean_vs_integral,
    subset_discrepancy,
    subset_discrepancy_trace,
)


def halves():
    return FiniteSignedMeasure(["a", "b"], [0.5, 0.5])


@pytest.mark.parametrize("m, C", [(1, 0), (2, 1), (3, 2), (5, 8), (12, 66)])
def test_c_constant(m, C):
    assert c_constant(m) == C


@pytest.mark.parametrize("bad", [0, -1, 2.5])
def test_c_constant_rejects(bad):
    with pytest.raises(ValidationError):
        c_constant(bad)


def test_halves_alternate():
    seq = generate_finite(halves(), 4)
    assert seq.labels == ["a", "b", "a", "b"]
    assert subset_discrepancy(seq, 1) == 0.5
    assert subset_discrepancy(seq, 4) == 0.0


def test_single_atom_is_constant():
    seq = generate_finite(FiniteSignedMeasure(["a"], [1.0]), 17)
    assert set(seq.labels) == {"a"}
    assert subset_discrepancy_trace(seq).max() == 0.0


def test_two_thirds_one_third_is_optimal():
    mu = FiniteSignedMeasure(["a", "b"], [2 / 3, 1 / 3])
    seq = generate_finite(mu, 3)
    assert seq.labels == ["a", "b", "a"]
    assert seq.counts.tolist() == [2, 1]
    greedy_worst = subset_discrepancy_trace(seq).max()
    assert greedy_worst == pytest.approx(best_max_prefix_discrepancy(mu.weights, 3), abs=1e-15)
    assert greedy_worst == pytest.approx(1 / 3)


def test_matches_reference_transcription():
    rng = np.random.default_rng(3)
    for m in range(2, 9):
        w = rng.dirichlet(np.ones(m))
        w = w / w.sum()
        mu = FiniteSignedMeasure(range(m), w)
        assert generate_finite(mu, 300).indices.tolist() == greedy_reference(mu.weights.tolist(), 300)


def test_closed_form_equals_subset_enumeration():
    rng = np.random.default_rng(11)
    for m in (2, 4, 7, 10):
        mu = FiniteSignedMeasure(range(m), rng.dirichlet(np.ones(m)))
        seq = generate_finite(mu, 40)
        for N in (1, 7, 19, 40):
            assert subset_discrepancy(seq, N) == pytest.approx(
                subset_discrepancy_enum(seq.counts_at(N), mu.weights, N), abs=1e-14
            )


def test_bound_holds_on_a_sweep():
    rng = np.random.default_rng(5)
    for _ in range(30):
        m = int(rng.integers(2, 13))
        mu = FiniteSignedMeasure(range(m), rng.dirichlet(np.ones(m)))
        tr = subset_discrepancy_trace(generate_finite(mu, 1024))
        N = np.arange(1, 1025)
        assert np.all(tr <= c_constant(m) / N + 1e-12)


def test_mean_vs_integral_examples():
    seq = generate_finite(halves(), 8)
    for N in range(1, 9):
        assert mean_vs_integral(seq, lambda x: 1.0, N)[2] == 0.0
    mean, integral, gap = mean_vs_integral(seq, {"a": 1.0, "b": -1.0}.get, 1)
    assert (mean, integral, gap) == (1.0, 0.0, 1.0)
    b2, b3 = mean_error_bounds(2, 1)
    assert gap <= b2 == 2.0 and b3 == 4.0


def test_signed_finite_signs_follow_atoms():
    mu = FiniteSignedMeasure(["p", "q", "r"], [0.5, -0.3, 0.2])
    seq, signs = generate_signed_finite(mu, 100)
    assert np.array_equal(signs, np.array([1, -1, 1])[seq.indices])
    signed_mass = np.array([signs[seq.indices == i].sum() for i in range(3)]) / 100
    assert np.abs(signed_mass - mu.weights).max() <= c_constant(3) / 100


def test_iterator_is_deterministic():
    mu = FiniteSignedMeasure(range(5), [0.1, 0.2, 0.3, 0.25, 0.15])
    a = list(itertools.islice(iter_finite(mu), 200))
    b = list(itertools.islice(iter_finite(mu), 200))
    assert a == b


def test_rejections():
    with pytest.raises(ValidationError):
        generate_finite(FiniteSignedMeasure(["a", "b"], [0.5, -0.5]), 3)
    with pytest.raises(ValidationError):
        generate_finite(halves(), 0)
    seq = generate_finite(halves(), 3)
    with pytest.raises(ValidationError):
        subset_discrepancy(seq, 4)
    with pytest.raises(ValidationError):
        generate_signed_finite(FiniteSignedMeasure(["a", "b"], [0.5, 0.2]), 3)
