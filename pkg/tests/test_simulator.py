from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jitterlab import accuracy_profile, aggregate_jitter
from jitterlab.errors import InfeasibleSpec, InstanceTooLarge
from jitterlab.metrics import max_jitter_bound_exact, min_jitter_bound_exact, pair_bounds
from jitterlab.simulator import SimSpec, brute_force_churn_extrema, read_sim_spec, synthesize_runs


def naive_extrema(n, k, ci, cj):
    """Every pair of full prediction vectors with the given correct counts (gold = 0)."""
    vectors = {c: [v for v in product(range(k), repeat=n) if v.count(0) == c] for c in {ci, cj}}
    churn = {sum(a != b for a, b in zip(u, v)) for u in vectors[ci] for v in vectors[cj]}
    return Fraction(min(churn), n), Fraction(max(churn), n)


def test_full_overlap_equal_accuracies_gives_identical_runs():
    coll = synthesize_runs(SimSpec(50, 4, 5, (0.8,) * 5, error_overlap=1.0, seed=3))
    assert aggregate_jitter(coll) == 0


def test_disjoint_errors_disagree_everywhere():
    coll = synthesize_runs(SimSpec(10, 3, 2, (0.5, 0.5), error_overlap=0.0, seed=11))
    assert aggregate_jitter(coll) == 1.0


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 60), st.integers(2, 8), st.data())
def test_accuracies_are_exact(n, k, data):
    correct = data.draw(st.lists(st.integers(0, n), min_size=2, max_size=6))
    rho = data.draw(st.sampled_from([0, 0.25, 0.5, 0.75, 1]))
    spec = SimSpec.from_counts(n, k, correct, rho, seed=data.draw(st.integers(0, 2 ** 64 - 1)))
    prof = accuracy_profile(synthesize_runs(spec))
    assert [r.correct for r in prof.per_run] == correct


def test_deterministic_and_seed_sensitive():
    spec = SimSpec(40, 5, 4, (0.7, 0.8, 0.75, 0.9), error_overlap=0.5, seed=42)
    assert synthesize_runs(spec) == synthesize_runs(spec)
    other = SimSpec(40, 5, 4, (0.7, 0.8, 0.75, 0.9), error_overlap=0.5, seed=43)
    assert synthesize_runs(other) != synthesize_runs(spec)


def test_mean_jitter_does_not_increase_with_overlap():
    means = []
    for rho in (0, 0.25, 0.5, 0.75, 1):
        vals = [aggregate_jitter(synthesize_runs(SimSpec(100, 5, 6, (0.8, 0.85, 0.9, 0.8, 0.85, 0.9), rho, seed)))
                for seed in range(100)]
        means.append(sum(vals) / len(vals))
    assert all(a >= b for a, b in zip(means, means[1:])), means


def test_spec_validation(tmp_path):
    with pytest.raises(InfeasibleSpec):
        SimSpec(10, 2, 2, (0.55, 0.5))
    with pytest.raises(InfeasibleSpec):
        SimSpec(10, 2, 3, (0.5, 0.5))
    with pytest.raises(InfeasibleSpec):
        SimSpec(10, 1, 2, (0.5, 0.5))
    with pytest.raises(InfeasibleSpec):
        SimSpec(10, 2, 2, (0.5, 0.5), error_overlap=1.5)
    with pytest.raises(InfeasibleSpec):
        SimSpec(10, 2, 2, (1.5, 0.5))
    p = tmp_path / "spec.json"
    p.write_text('{"n_examples": 10, "n_classes": 3, "accuracies": [0.5, 0.7], "seed": 4}')
    assert read_sim_spec(p) == SimSpec(10, 3, 2, (0.5, 0.7), 0.5, 4)
    p.write_text('{"n_examples": 10}')
    with pytest.raises(InfeasibleSpec):
        read_sim_spec(p)


# -- oracle ------------------------------------------------------------------


def test_oracle_worked_examples():
    assert brute_force_churn_extrema(3, 3, (2, 1)) == (Fraction(1, 3), Fraction(1))
    for n in range(1, 6):
        assert brute_force_churn_extrema(n, 3, (n, n)) == (0, 0)
    assert brute_force_churn_extrema(4, 2, (2, 2)) == (0, 1)


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_oracle_matches_naive_enumeration(n, k):
    for ci, cj in product(range(n + 1), repeat=2):
        assert brute_force_churn_extrema(n, k, (ci, cj)) == naive_extrema(n, k, ci, cj)


@pytest.mark.parametrize("n", range(1, 9))
def test_two_classes_attain_both_bounds(n):
    for ci, cj in product(range(n + 1), repeat=2):
        expected = pair_bounds(Fraction(ci, n), Fraction(cj, n))
        assert brute_force_churn_extrema(n, 2, (ci, cj)) == expected


@pytest.mark.parametrize("n", range(1, 7))
def test_three_classes_min_is_accuracy_gap_and_max_is_error_sum(n):
    for ci, cj in product(range(n + 1), repeat=2):
        lo, hi = brute_force_churn_extrema(n, 3, (ci, cj))
        a_i, a_j = Fraction(ci, n), Fraction(cj, n)
        assert lo == abs(a_i - a_j)
        assert hi == min(Fraction(1), (1 - a_i) + (1 - a_j))
        if a_i + a_j >= 1:
            assert hi == pair_bounds(a_i, a_j)[1]


def test_oracle_guardrails():
    with pytest.raises(InstanceTooLarge):
        brute_force_churn_extrema(9, 2, (1, 1))
    with pytest.raises(InstanceTooLarge):
        brute_force_churn_extrema(3, 4, (1, 1))
    with pytest.raises(ValueError):
        brute_force_churn_extrema(3, 3, (4, 1))


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 120), st.integers(2, 12), st.data())
def test_simulated_collections_respect_bounds(n, k, data):
    correct = data.draw(st.lists(st.integers(0, n), min_size=2, max_size=6))
    rho = data.draw(st.sampled_from([0, 0.25, 0.5, 0.75, 1]))
    coll = synthesize_runs(SimSpec.from_counts(n, k, correct, rho, seed=data.draw(st.integers(0, 999))))
    prof = accuracy_profile(coll)
    j = Fraction(aggregate_jitter(coll))
    assert min_jitter_bound_exact(prof) - Fraction(1, 10 ** 12) <= j <= max_jitter_bound_exact(prof) + Fraction(1, 10 ** 12)


def test_independent_error_labels_can_exceed_max_bound():
    spec = SimSpec(100, 5, 2, (0.2, 0.2), error_overlap=1.0, seed=1, shared_error_labels=False)
    coll = synthesize_runs(spec)
    assert aggregate_jitter(coll) > max_jitter_bound_exact(accuracy_profile(coll))
