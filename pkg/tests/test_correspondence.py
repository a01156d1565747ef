import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghforge.correspondence import (
    Correspondence,
    CorrespondenceError,
    Relation,
    count_correspondences,
    decompose,
    distortion,
    enumerate_all_correspondences,
    enumerate_irreducible,
    is_correspondence,
    is_irreducible,
    reduce_to_irreducible,
    restricted_growth_strings,
)

from ghforge.metric import new_space

from conftest import metric_spaces


def all_relations(m, n):
    for bits in range(1, 1 << (m * n)):
        yield Relation(np.array([(bits >> k) & 1 for k in range(m * n)], dtype=bool).reshape(m, n))


def brute_irreducible(m, n):
    return {R.key() for R in all_relations(m, n) if is_correspondence(R) and is_irreducible(R)}


@st.composite
def correspondences(draw, max_m=4, max_n=4):
    m = draw(st.integers(1, max_m))
    n = draw(st.integers(1, max_n))
    bits = draw(st.lists(st.booleans(), min_size=m * n, max_size=m * n))
    a = np.array(bits, dtype=bool).reshape(m, n)
    # force surjectivity on both sides
    for i in range(m):
        a[i, draw(st.integers(0, n - 1))] = True
    for j in range(n):
        a[draw(st.integers(0, m - 1)), j] = True
    return Correspondence(a)


def test_correspondence_requires_surjectivity():
    with pytest.raises(CorrespondenceError):
        Correspondence(np.array([[1, 0], [1, 0]], dtype=bool))
    assert Relation.from_pairs(2, 2, [(0, 0), (1, 1)]).pair_list() == [(0, 0), (1, 1)]


@pytest.mark.parametrize("m,n", [(m, n) for m in range(1, 5) for n in range(1, 5) if m * n <= 12])
def test_irreducible_enumeration_matches_filter(m, n):
    keys = [R.key() for R in enumerate_irreducible(m, n)]
    assert len(keys) == len(set(keys))
    assert set(keys) == brute_irreducible(m, n)


def test_known_counts():
    assert sum(1 for _ in enumerate_irreducible(2, 2)) == 2
    assert sum(1 for _ in enumerate_irreducible(3, 3)) == 15
    assert sum(1 for _ in enumerate_irreducible(4, 4)) == 184


@pytest.mark.parametrize("m,n", [(1, 1), (2, 2), (2, 3), (3, 3), (3, 4)])
def test_all_correspondences_count(m, n):
    listed = list(enumerate_all_correspondences(m, n))
    assert len(listed) == count_correspondences(m, n)
    assert len({R.key() for R in listed}) == len(listed)


def test_count_formula_small_values():
    # surjective relations on {0,1}x{0,1}: 16 relations, 7 correspondences
    assert count_correspondences(2, 2) == 7
    assert count_correspondences(1, 5) == 1
    assert count_correspondences(4, 4) == 41503


def test_restricted_growth_strings_are_set_partitions():
    # Stirling numbers of the second kind S(5, k)
    assert [sum(1 for _ in restricted_growth_strings(5, k)) for k in range(1, 6)] == [1, 15, 25, 10, 1]
    for s in restricted_growth_strings(4, 2):
        assert s[0] == 0 and max(s) == 1


@given(correspondences())
def test_reduction_gives_irreducible_subset(R):
    S = reduce_to_irreducible(R)
    assert is_correspondence(S) and is_irreducible(S)
    assert S <= R
    assert reduce_to_irreducible(S) == S


@given(correspondences())
def test_irreducible_iff_multiplicity_criterion(R):
    rows, cols = R.pairs.sum(1), R.pairs.sum(0)
    criterion = all(min(rows[i], cols[j]) == 1 for i, j in zip(*np.nonzero(R.pairs)))
    def surjective_without(k):
        a = R.pairs.copy().ravel()
        a[k] = False
        a = a.reshape(R.shape)
        return a.any(axis=0).all() and a.any(axis=1).all()

    minimal = not any(surjective_without(k) for k in np.flatnonzero(R.pairs))
    assert is_irreducible(R) == criterion == minimal


@given(correspondences())
def test_decomposition_reassembles(R):
    S = reduce_to_irreducible(R)
    assert decompose(S).reassemble() == S


@settings(max_examples=50)
@given(metric_spaces(max_n=3), metric_spaces(max_n=3))
def test_reduction_never_increases_distortion(X, Y):
    for R in enumerate_all_correspondences(X.n, Y.n):
        assert distortion(reduce_to_irreducible(R), X, Y) <= distortion(R, X, Y) + 1e-12


def test_distortion_by_hand():
    X = new_space([[0, 1], [1, 0]])
    Y = new_space([[0, 3], [3, 0]])
    R = Relation.from_pairs(2, 2, [(0, 0), (1, 1)])
    assert distortion(R, X, Y) == 2
    both = Relation.from_pairs(2, 2, list(itertools.product(range(2), range(2))))
    assert distortion(both, X, Y) == 3


@pytest.mark.parametrize("m,n", [(2, 3), (3, 3), (3, 4), (4, 4)])
def test_irreducible_structure(m, n):
    for R in enumerate_irreducible(m, n):
        assert is_irreducible(R)
        assert decompose(R).reassemble() == R
        p = R.pairs
        for i in np.flatnonzero(p.sum(1) > 1):
            # the columns of a multi-column row belong to that row alone
            assert np.all(p[:, p[i]].sum(0) == 1)
        if m >= 2 and n >= 2:
            assert not p.all(axis=1).any() and not p.all(axis=0).any()
