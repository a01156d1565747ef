import numpy as np
import pytest
from hypothesis import given

from ghforge.metric import (
    MetricError,
    diameter,
    min_positive_distance,
    new_space,
    point_space,
    quotient_zero_distances,
    sorted_distance_triple,
    triangle_space,
    zero_distance_classes,
)

from conftest import metric_spaces


def test_valid_space_is_read_only():
    X = new_space([[0, 1], [1, 0]], labels=["p", "q"])
    assert X.n == 2 and X.labels == ("p", "q")
    with pytest.raises(ValueError):
        X.d[0, 1] = 5.0


@pytest.mark.parametrize(
    "matrix, entry",
    [
        ([[0, 1, 2], [1, 0, 1]], None),
        ([[0, np.nan], [np.nan, 0]], (0, 1)),
        ([[1, 1], [1, 0]], (0, 0)),
        ([[0, 1], [2, 0]], (0, 1)),
        ([[0, -1], [-1, 0]], (0, 1)),
        ([[0, 0], [0, 0]], (0, 1)),
        ([[0, 1, 5], [1, 0, 1], [5, 1, 0]], None),
    ],
)
def test_invalid_matrices_rejected(matrix, entry):
    with pytest.raises(MetricError) as err:
        new_space(matrix)
    if entry is not None:
        assert err.value.entry is not None
        assert tuple(sorted(err.value.entry)) == tuple(sorted(entry))


def test_triangle_violation_names_points():
    with pytest.raises(MetricError, match="triangle"):
        new_space([[0, 1, 5], [1, 0, 1], [5, 1, 0]])


def test_modes():
    z = [[0, 0, 1], [0, 0, 1], [1, 1, 0]]
    with pytest.raises(MetricError):
        new_space(z)
    P = new_space(z, mode="pseudometric")
    assert zero_distance_classes(P.d) == [[0, 1], [2]]
    Q = quotient_zero_distances(P)
    assert Q.n == 2 and Q.d[0, 1] == 1
    raw = new_space([[0, 1, 5], [1, 0, 1], [5, 1, 0]], mode="raw")
    assert raw.n == 3
    with pytest.raises(ValueError):
        new_space(z, mode="bogus")


def test_tiny_asymmetry_symmetrized_within_tol():
    X = new_space([[0, 1.0], [1.0 + 1e-12, 0]])
    assert X.d[0, 1] == X.d[1, 0]


def test_scalar_helpers():
    X = new_space([[0, 3, 4], [3, 0, 5], [4, 5, 0]])
    assert diameter(X) == 5 and min_positive_distance(X) == 3
    assert diameter(point_space()) == 0
    with pytest.raises(MetricError):
        min_positive_distance(point_space())
    assert sorted_distance_triple(X).as_tuple() == (3, 4, 5)


def test_triangle_space_layout():
    T = triangle_space(1, 2, 2.5)
    assert (T.d[1, 2], T.d[0, 2], T.d[0, 1]) == (1, 2, 2.5)
    assert sorted_distance_triple(T).is_metric()


@given(metric_spaces(max_n=5))
def test_permutation_preserves_metric(X):
    perm = np.arange(X.n)[::-1]
    Y = X.permuted(perm)
    assert diameter(Y) == diameter(X)
    assert np.array_equal(Y.d[np.ix_(perm, perm)], X.d)


@given(metric_spaces(max_n=16))
def test_triangle_inequality_exhaustive(X):
    d = X.d
    assert np.all(d[:, :, None] <= d[:, None, :] + d.T[None, :, :] + 1e-9)


@given(metric_spaces(max_n=5))
def test_quotient_idempotent(X):
    # duplicating point 0 gives a pseudometric with one zero-distance pair
    idx = [0] + list(range(X.n))
    P = new_space(X.d[np.ix_(idx, idx)], mode="pseudometric")
    Q = quotient_zero_distances(P)
    assert Q.n == X.n
    assert np.array_equal(quotient_zero_distances(Q).d, Q.d)


@given(metric_spaces(min_n=3, max_n=3))
def test_sorted_triple_relabel_invariant(X):
    for perm in ([1, 0, 2], [2, 0, 1], [0, 2, 1]):
        assert sorted_distance_triple(X.permuted(perm)) == sorted_distance_triple(X)
