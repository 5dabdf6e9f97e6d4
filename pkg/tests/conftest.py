import pytest

from graph_core.generators import lattice_window, random_bounded_degree, tree_ball, two_vertex


@pytest.fixture
def pair():
    return two_vertex()


@pytest.fixture
def line():
    """ℤ window wide enough for double-precision series at t <= 1."""
    return lattice_window(20)


@pytest.fixture
def short_line():
    return lattice_window(3)


@pytest.fixture
def tree():
    return tree_ball(2, 3)


@pytest.fixture
def random_graph():
    return random_bounded_degree(12, 3, theta_range=(0.5, 2.0), w_range=(0.5, 1.5), seed=7)
