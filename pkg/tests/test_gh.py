import numpy as np
import pytest
from hypothesis import given, settings

from ghforge.correspondence import distortion
from ghforge.gh import (
    BudgetExceeded,
    gh_branch_and_bound,
    gh_closed_form,
    gh_distance,
    gh_irreducible,
    gh_lower_bound,
    gh_oracle,
    has_closed_form,
)
from ghforge.metric import diameter, new_space, point_space, triangle_space

from conftest import metric_spaces, random_space


def line(*xs):
    xs = np.asarray(xs, dtype=float)
    return new_space(np.abs(xs[:, None] - xs[None, :]))


def test_hand_values():
    # two points at distance 1 vs 3: dis of the bijection is 2
    assert gh_oracle(line(0, 1), line(0, 3)).value == 1
    # anything vs a point is half the diameter
    X = line(0, 2, 7)
    assert gh_oracle(point_space(), X).value == 3.5
    # equilateral 1 vs 2 point line: best is 1/2
    E = triangle_space(1, 1, 1)
    assert gh_oracle(E, line(0, 1)).value == 0.5


@settings(max_examples=60, deadline=None)
@given(metric_spaces(max_n=4), metric_spaces(max_n=4))
def test_three_methods_agree(X, Y):
    v = gh_oracle(X, Y).value
    assert gh_irreducible(X, Y).value == pytest.approx(v, abs=1e-9)
    assert gh_branch_and_bound(X, Y).value == pytest.approx(v, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(metric_spaces(max_n=4), metric_spaces(max_n=4))
def test_witness_attains_value(X, Y):
    for method in ("oracle", "irreducible", "bnb"):
        r = gh_distance(X, Y, method)
        assert distortion(r.witness, X, Y) / 2 == pytest.approx(r.value, abs=1e-12)


@settings(max_examples=80, deadline=None)
@given(metric_spaces(max_n=4), metric_spaces(max_n=4))
def test_lower_bound_is_admissible(X, Y):
    assert gh_lower_bound(X, Y) <= gh_oracle(X, Y).value + 1e-12


def test_lower_bound_counterexample_unequal_sizes():
    # three points with one short gap against two far points
    X, Y = line(0, 1, 100), line(0, 100)
    assert gh_lower_bound(X, Y) <= gh_oracle(X, Y).value + 1e-12


@settings(max_examples=80, deadline=None)
@given(metric_spaces(max_n=3), metric_spaces(max_n=3))
def test_closed_forms(X, Y):
    if has_closed_form(X, Y):
        assert gh_closed_form(X, Y).value == pytest.approx(gh_oracle(X, Y).value, abs=1e-9)


def test_trivial_bounds(rng):
    for _ in range(30):
        X, Y = random_space(rng, rng.integers(1, 5)), random_space(rng, rng.integers(1, 5))
        v = gh_distance(X, Y).value
        assert abs(diameter(X) - diameter(Y)) / 2 - 1e-12 <= v <= max(diameter(X), diameter(Y)) / 2 + 1e-12


def test_branch_and_bound_handles_larger_spaces(rng):
    X, Y = random_space(rng, 9), random_space(rng, 8)
    r = gh_branch_and_bound(X, Y)
    assert distortion(r.witness, X, Y) / 2 == pytest.approx(r.value)
    # relabeling either space leaves the value unchanged
    assert gh_branch_and_bound(X.permuted(rng.permutation(9)), Y).value == pytest.approx(r.value)


def test_branch_and_bound_against_oracle_at_five_points(rng):
    for _ in range(3):
        X, Y = random_space(rng, 5, integer=True), random_space(rng, 4, integer=True)
        assert gh_branch_and_bound(X, Y).value == pytest.approx(gh_oracle(X, Y).value, abs=1e-9)


def test_oracle_guard():
    X = line(*range(6))
    with pytest.raises(BudgetExceeded):
        gh_oracle(X, X, guard=20)


def test_irreducible_budget():
    X = line(*range(5))
    with pytest.raises(BudgetExceeded):
        gh_irreducible(X, X, budget=10)


def test_unknown_method():
    with pytest.raises(ValueError):
        gh_distance(point_space(), point_space(), "nope")


def test_result_serialization():
    d = gh_distance(line(0, 1), line(0, 3)).to_dict()
    assert set(d) == {"value", "witness_pairs", "method", "nodes"}


@settings(max_examples=40, deadline=None)
@given(metric_spaces(max_n=4), metric_spaces(max_n=4))
def test_symmetry_identity_and_relabeling(X, Y):
    for method in ("oracle", "irreducible", "bnb"):
        v = gh_distance(X, Y, method).value
        assert gh_distance(Y, X, method).value == pytest.approx(v, abs=1e-9)
        assert gh_distance(X, X, method).value == 0
        perm = list(range(X.n))[::-1]
        assert gh_distance(X.permuted(perm), Y, method).value == pytest.approx(v, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(metric_spaces(max_n=4), metric_spaces(max_n=4), metric_spaces(max_n=4))
def test_triangle_inequality(X, Y, Z):
    assert gh_distance(X, Z).value <= gh_distance(X, Y).value + gh_distance(Y, Z).value + 1e-9
