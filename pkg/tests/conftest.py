import numpy as np
import pytest
from hypothesis import strategies as st

from ghforge.metric import new_space, triangle_space


def shortest_path_metric(w: np.ndarray) -> np.ndarray:
    """Floyd-Warshall closure of symmetric positive weights: always a metric."""
    d = np.minimum(w, w.T).astype(float)
    np.fill_diagonal(d, 0.0)
    for k in range(len(d)):
        d = np.minimum(d, d[:, [k]] + d[[k], :])
    return d


def random_space(rng: np.random.Generator, n: int, integer: bool = False):
    w = rng.integers(1, 10, size=(n, n)) if integer else rng.uniform(0.5, 10.0, size=(n, n))
    return new_space(shortest_path_metric(w))


@st.composite
def metric_spaces(draw, min_n=1, max_n=4, integer=True):
    n = draw(st.integers(min_n, max_n))
    vals = draw(st.lists(st.integers(1, 9) if integer else st.floats(0.5, 10.0),
                         min_size=n * n, max_size=n * n))
    return new_space(shortest_path_metric(np.array(vals, dtype=float).reshape(n, n)))


@st.composite
def triangles(draw, lo=1.0, hi=20.0):
    a, b = sorted(draw(st.floats(lo, hi)) for _ in range(2))
    c = draw(st.floats(b, a + b))
    return triangle_space(a, b, c)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def gap_boundary():
    return (triangle_space(8, 22, 29.5), triangle_space(11.5, 18, 29), triangle_space(12, 21.5, 33))


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
