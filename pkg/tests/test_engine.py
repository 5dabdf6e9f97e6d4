import math

import numpy as np
import pytest

from engine.convolution import (
    convolution_bound,
    convolve,
    convolve_kernel,
    iterated_bound,
    iterated_convolution,
    volterra_step,
)
from engine.dirac import (
    dirac_kernel_row,
    dirac_series_tail,
    heat_kernel_dirac,
    needs_extended_precision,
    small_time_leading_term,
)
from engine.general import heat_kernel_general, parametrix_correction
from engine.grid import TimeGrid, TimeGridKernel, check_compatible
from engine.neumann import KernelEstimate, neumann_tail_order, series_tail
from graph_core.errors import (
    BallMismatch,
    GridMismatch,
    InvalidParams,
    NegativeTime,
    QuadratureNotConverged,
    RegionTooSmall,
)
from graph_core.generators import lattice_Z, random_bounded_degree, regular_tree, tree_ball, tree_shells, two_vertex
from graph_core.graph import build_graph
from kernels.closed_form import lattice_Z_kernel, tree_kernel
from kernels.parametrix import dirac_parametrix, gaussian_parametrix
from metrics.metric import build_metric


def pair_exact(t, theta_b=1.0):
    """H(a,a), H(a,b) on the two-vertex graph with θ(a) = 1, w = 1."""
    total = 1.0 + theta_b
    decay = math.exp(-t * total / theta_b)
    return 1 / total + theta_b / total * decay, (1 - decay) / total


# ---------------------------------------------------------------------
# Series truncation
# ---------------------------------------------------------------------
def test_neumann_tail_order_reference():
    assert neumann_tail_order(1.0, 1.0, 1.0, 0, 1e-12) == 17
    assert series_tail(1.0, 1.0, 1.0, 0, 16) == pytest.approx(math.e / math.factorial(16))
    assert neumann_tail_order(0.0, 1.0, 1.0, 0, 1e-12) == 0
    assert neumann_tail_order(1.0, 1.0, 0.0, 0, 1e-12) == 0


def test_neumann_tail_order_is_monotone_in_tol():
    orders = [neumann_tail_order(2.0, 4.0, 1.0, 0, tol) for tol in (1e-3, 1e-6, 1e-9, 1e-12)]
    assert orders == sorted(orders)
    assert len(set(orders)) == 4


def test_neumann_tail_order_rejects_bad_input():
    with pytest.raises(InvalidParams):
        neumann_tail_order(1.0, 1.0, 1.0, 0, 0.0)
    with pytest.raises(InvalidParams):
        neumann_tail_order(math.nan, 1.0, 1.0, 0, 1e-6)


def test_estimate_row():
    est = KernelEstimate(0.5, 7, 1e-13, 2e-13, 3e-13)
    assert est.total_bound == pytest.approx(6e-13)
    assert list(est.as_row()) == ["value", "series_order", "series_tail", "spatial_tail", "quad_err", "total_bound"]


# ---------------------------------------------------------------------
# Dirac engine
# ---------------------------------------------------------------------
def test_dirac_on_the_line_matches_bessel(line):
    est = heat_kernel_dirac(line, "0", "0", 1.0)
    assert est.value == pytest.approx(0.30850832255367, abs=1e-12)
    assert est.total_bound <= 1e-12
    far = heat_kernel_dirac(line, "0", "3", 1.0)
    assert abs(far.value - lattice_Z_kernel(3, 1.0)) <= far.total_bound + 1e-13


def test_dirac_on_intensional_line():
    Z = lattice_Z()
    est = heat_kernel_dirac(Z, "0", "2", 0.7)
    assert abs(est.value - lattice_Z_kernel(2, 0.7)) <= est.total_bound + 1e-13


def test_dirac_extended_precision_at_large_time():
    Z = lattice_Z()
    est = heat_kernel_dirac(Z, "0", "0", 5.0)
    assert est.diagnostics["precision"].startswith("mpmath")
    assert est.value == pytest.approx(lattice_Z_kernel(0, 5.0), rel=1e-10)
    assert needs_extended_precision(10, 5.0, 2.0)
    assert not needs_extended_precision(10, 1.0, 2.0)


def test_dirac_on_the_tree():
    T = regular_tree(2)
    est = heat_kernel_dirac(T, "o", "o.0", 0.2)
    assert abs(est.value - tree_kernel(2, 1, 0.2, tail_tol=1e-16)) <= est.total_bound + 1e-13


def test_dirac_on_tree_shells_is_the_tree_kernel():
    shells = tree_shells(2, 20)
    for r in range(3):
        est = heat_kernel_dirac(shells, "0", str(r), 0.1)
        assert abs(est.value - tree_kernel(2, r, 0.1, tail_tol=1e-16)) <= est.total_bound + 1e-13


@pytest.mark.parametrize("t", [0.1, 1.0, 3.0])
def test_two_vertex_closed_form(pair, t):
    aa, ab = pair_exact(t)
    assert heat_kernel_dirac(pair, "a", "a", t).value == pytest.approx(aa, abs=1e-12)
    assert heat_kernel_dirac(pair, "a", "b", t).value == pytest.approx(ab, abs=1e-12)


def test_two_vertex_with_unequal_measure():
    g = two_vertex(theta_a=1.0, theta_b=2.0)
    t = 0.6
    aa, ab = pair_exact(t, theta_b=2.0)
    assert heat_kernel_dirac(g, "a", "a", t).value == pytest.approx(aa, abs=1e-12)
    assert heat_kernel_dirac(g, "a", "b", t).value == pytest.approx(ab, abs=1e-12)
    assert heat_kernel_dirac(g, "b", "a", t).value == pytest.approx(ab, abs=1e-12)


def test_mass_is_exact_at_every_order(random_graph):
    x = random_graph.vertices[2]
    for order in (0, 1, 3, 6):
        row, est = dirac_kernel_row(random_graph, x, 0.1, series_order=order)
        mass = math.fsum(v * random_graph.theta(y) for y, v in row.items())
        assert mass == pytest.approx(1.0, abs=1e-13)
        assert est.series_order_L == order


def test_forced_order_reports_its_tail(pair):
    est = heat_kernel_dirac(pair, "a", "b", 1.0, series_order=2)
    assert est.series_order_L == 2
    assert est.series_tail_bound == pytest.approx(dirac_series_tail(1.0, 1.0, 2, 1.0))
    assert est.diagnostics["forced_order"]


def test_time_zero_and_bad_times(pair):
    assert heat_kernel_dirac(pair, "a", "a", 0.0).value == 1.0
    assert heat_kernel_dirac(pair, "a", "b", 0.0).value == 0.0
    with pytest.raises(NegativeTime):
        heat_kernel_dirac(pair, "a", "b", -0.1)
    with pytest.raises(InvalidParams):
        heat_kernel_dirac(pair, "a", "b", math.nan)


def test_dirac_needs_room_inside_a_window(short_line):
    with pytest.raises(RegionTooSmall) as info:
        heat_kernel_dirac(short_line, "0", "0", 1.0)
    assert info.value.exit_code == 3


def test_small_time_leading_terms(pair, line):
    t = 1e-3
    approx, bound = small_time_leading_term(pair, "a", "b", t)
    assert approx == pytest.approx(t)
    assert abs(heat_kernel_dirac(pair, "a", "b", t).value - approx) <= bound
    approx, _ = small_time_leading_term(line, "0", "2", t)
    assert approx == pytest.approx(t * t / 2)
    with pytest.raises(InvalidParams):
        small_time_leading_term(pair, "a", "a", t)


# ---------------------------------------------------------------------
# Time grids and convolution
# ---------------------------------------------------------------------
@pytest.fixture
def point():
    return build_graph([("v", 1.0)], [])


def test_time_grid(point):
    grid = TimeGrid(1.0, 8)
    assert grid.index_of(0.25) == 2
    with pytest.raises(GridMismatch):
        grid.index_of(0.3)
    with pytest.raises(GridMismatch):
        TimeGrid(1.0, 3).coarsen()
    with pytest.raises(InvalidParams):
        TimeGrid(0.0, 4)
    f = TimeGridKernel.sample(point, grid, lambda t: [[t]])
    assert f.restrict(grid.coarsen()).function("v", "v").at(0.5) == 0.5
    with pytest.raises(GridMismatch):
        check_compatible(f, TimeGridKernel.sample(point, grid.refine(), lambda t: [[t]]))
    other = build_graph([("v", 2.0)], [])
    with pytest.raises(BallMismatch):
        check_compatible(f, TimeGridKernel.sample(other, grid, lambda t: [[t]]))


def test_iterated_convolution_of_a_constant(point):
    c, t = 1.5, 1.0
    f = TimeGridKernel.sample(point, TimeGrid(t, 64), lambda s: [[c]])
    for ell in (1, 2, 3):
        assert iterated_convolution(f, ell, "v", "v", t) == pytest.approx(c ** ell * t ** (ell - 1) / math.factorial(ell - 1))
    # trapezoid is exact through linear integrands only
    assert iterated_convolution(f, 4, "v", "v", t) == pytest.approx(c ** 4 / 6, rel=1e-3)
    with pytest.raises(InvalidParams):
        iterated_convolution(f, 0, "v", "v", t)


def test_convolve_linear_integrand_is_exact(point):
    grid = TimeGrid(2.0, 16)
    f1 = TimeGridKernel.sample(point, grid, lambda s: [[3.0]])
    f2 = TimeGridKernel.sample(point, grid, lambda s: [[s]])
    value, error = convolve(f1, f2, "v", "v", 2.0)
    assert value == pytest.approx(3.0 * 2.0 ** 2 / 2)
    assert error == pytest.approx(0.0, abs=1e-12)


def test_family_convolution_matches_pointwise(pair):
    grid = TimeGrid(1.0, 8)
    f1 = TimeGridKernel.sample(pair, grid, lambda s: np.array([[1.0 + s, s], [s, 2.0]]))
    f2 = TimeGridKernel.sample(pair, grid, lambda s: np.array([[math.exp(-s), 0.5], [s * s, 1.0]]))
    family = convolve_kernel(f1, f2)
    for x in ("a", "b"):
        for y in ("a", "b"):
            for t in (0.25, 0.5, 1.0):
                expected = convolve(f1, f2, x, y, t).value
                assert family.function(x, y).at(t) == pytest.approx(expected, rel=1e-13, abs=1e-15)


def test_volterra_step_matches_trapezoid():
    h = 0.1
    weighted = [np.array([[2.0]])] * 5
    G = np.arange(5, dtype=float)[None, :]
    out = volterra_step(weighted, G, h)
    # ∫_0^{t_i} 2·(r/h) dr on the nodes
    expected = [2 * (i * h) ** 2 / (2 * h) for i in range(5)]
    assert out[0] == pytest.approx(expected)


def test_convolution_bounds():
    assert convolution_bound(1.0, 1.0, 0, 0, 2.0) == pytest.approx(2.0)
    assert convolution_bound(2.0, 3.0, 1, 2, 1.0) == pytest.approx(6.0 * 1 * 2 / 24)
    assert iterated_bound(2.0, 3.0, 0, 3, 1.0) == pytest.approx(2.0 * 9.0 / 2)
    assert iterated_bound(2.0, 3.0, 0, 1, 0.0) == 2.0


# ---------------------------------------------------------------------
# General engine
# ---------------------------------------------------------------------
def test_general_engine_with_dirac_parametrix(pair):
    P = dirac_parametrix(pair)
    t = 0.5
    aa, ab = pair_exact(t)
    for y, exact in (("a", aa), ("b", ab)):
        est = heat_kernel_general(pair, P, "a", y, t, 1e-6)
        assert est.value == pytest.approx(exact, abs=1e-6)
        assert est.diagnostics["parametrix"] == "dirac"
        assert est.spatial_tail_bound == 0.0


def test_general_engine_with_gaussian_parametrix(pair):
    P = gaussian_parametrix(pair, build_metric(pair, "combinatorial"))
    t = 0.5
    aa, ab = pair_exact(t)
    assert heat_kernel_general(pair, P, "a", "a", t, 1e-6).value == pytest.approx(aa, abs=2e-6)
    assert heat_kernel_general(pair, P, "a", "b", t, 1e-6).value == pytest.approx(ab, abs=2e-6)


def test_general_and_dirac_routes_agree():
    g = random_bounded_degree(8, 3, theta_range=(1.0, 2.0), w_range=(0.5, 1.0), seed=1)
    P = dirac_parametrix(g)
    x, y = g.vertices[0], g.vertices[3]
    direct = heat_kernel_dirac(g, x, y, 0.2)
    general = heat_kernel_general(g, P, x, y, 0.2, 1e-6)
    assert abs(direct.value - general.value) <= 1e-5


def test_general_engine_edge_cases(pair):
    P = dirac_parametrix(pair)
    assert heat_kernel_general(pair, P, "a", "a", 0.0).value == 1.0
    lonely = build_graph([("a", 1.0), ("b", 1.0)], [])
    Q = dirac_parametrix(lonely)
    assert heat_kernel_general(lonely, Q, "a", "b", 1.0).value == 0.0
    with pytest.raises(InvalidParams):
        heat_kernel_general(pair, P, "a", "b", 1.0, 0.0)
    with pytest.raises(NegativeTime):
        heat_kernel_general(pair, P, "a", "b", -1.0)


def test_general_engine_grid_cap(pair):
    P = dirac_parametrix(pair)
    with pytest.raises(QuadratureNotConverged) as info:
        heat_kernel_general(pair, P, "a", "b", 1.0, 1e-12, grid_cap=16)
    assert info.value.exit_code == 3


def test_general_engine_needs_room(short_line):
    P = dirac_parametrix(short_line)
    with pytest.raises(RegionTooSmall):
        heat_kernel_general(short_line, P, "0", "0", 1.0)
    G = gaussian_parametrix(short_line, build_metric(short_line, "combinatorial"))
    with pytest.raises(RegionTooSmall):
        heat_kernel_general(short_line, G, "0", "0", 1.0)


def test_general_engine_keeps_window_boundary_off_the_ball(short_line):
    # the window boundary sits 3 hops from the origin
    P = dirac_parametrix(short_line)
    est = heat_kernel_general(short_line, P, "0", "0", 0.1, series_order=2)
    assert est.series_order_L == 2
    assert est.diagnostics["ball_radius"] == 2
    with pytest.raises(RegionTooSmall):
        heat_kernel_general(short_line, P, "0", "0", 0.1, series_order=3)


def test_general_engine_total_bound_meets_tol_on_a_truncated_ball():
    g = tree_ball(2, 5).as_finite()
    P = gaussian_parametrix(g, build_metric(g, "combinatorial"))
    tol = 1e-6
    est = heat_kernel_general(g, P, "o", "o", 0.25, tol)
    assert est.spatial_tail_bound <= tol / 4 * (1 + 1e-9)
    assert est.series_tail_bound <= tol / 4 * (1 + 1e-9)
    assert est.total_bound <= tol * (1 + 1e-9)
    exact = heat_kernel_dirac(g, "o", "o", 0.25)
    assert abs(est.value - exact.value) <= est.total_bound + exact.total_bound


def test_parametrix_correction_carries_the_difference(pair):
    P = dirac_parametrix(pair)
    est = parametrix_correction(pair, P, "a", "b", 0.3)
    _, ab = pair_exact(0.3)
    assert est.diagnostics["parametrix_value"] == 0.0
    assert est.value == pytest.approx(ab, abs=1e-6)
