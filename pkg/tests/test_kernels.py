import math

import mpmath
import numpy as np
import pytest
from scipy import special

from graph_core.errors import InvalidParams, NoClosedFormForGraph, NonFiniteInput, RegionTooSmall
from graph_core.generators import lattice_Z, lattice_window, random_bounded_degree, regular_tree
from kernels.bessel import bessel_i, bessel_i_scaled, log_bessel_i
from kernels.chains import chain_coefficient, chain_coefficients, chain_region
from kernels.closed_form import closed_form_for, lattice_Z_kernel, tree_kernel, tree_kernel_series
from kernels.parametrix import dirac_parametrix, doubling_tail, gaussian_parametrix, gaussian_tail
from kernels.walks import generating_function_counts, tree_walk_counts, walk_series_kernel
from metrics.metric import build_metric

# ---------------------------------------------------------------------
# Bessel functions
# ---------------------------------------------------------------------
def test_bessel_reference_value():
    assert bessel_i(0, 1.0) == pytest.approx(1.2660658777520082, rel=1e-15)
    assert bessel_i(3, 0.0) == 0.0
    assert log_bessel_i(2, 0.0) == -math.inf


@pytest.mark.parametrize("n", [0, 1, 2, 5, 17, 60])
@pytest.mark.parametrize("t", [0.01, 0.5, 2.0, 10.0, 40.0])
def test_bessel_against_scipy(n, t):
    assert bessel_i(n, t) == pytest.approx(special.iv(n, t), rel=1e-12, abs=1e-300)
    assert bessel_i_scaled(n, t) == pytest.approx(special.ive(n, t), rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("n", [1, 3, 10])
@pytest.mark.parametrize("t", [0.1, 1.0, 7.5, 30.0])
def test_bessel_recurrence(n, t):
    lhs = bessel_i(n - 1, t) - bessel_i(n + 1, t)
    assert lhs == pytest.approx(2 * n / t * bessel_i(n, t), rel=1e-12)


def test_bessel_large_order_against_mpmath():
    value = log_bessel_i(300, 50.0)
    expected = float(mpmath.log(mpmath.besseli(300, 50)))
    assert value == pytest.approx(expected, rel=1e-13)


def test_bessel_rejects_bad_arguments():
    with pytest.raises(NonFiniteInput):
        bessel_i(-1, 1.0)
    with pytest.raises(NonFiniteInput):
        bessel_i(1, math.nan)
    with pytest.raises(NonFiniteInput):
        bessel_i(1.5, 1.0)


# ---------------------------------------------------------------------
# Closed forms and walk counts
# ---------------------------------------------------------------------
def test_lattice_kernel_value():
    assert lattice_Z_kernel(0, 1.0) == pytest.approx(0.30850832255367, rel=1e-12)
    assert lattice_Z_kernel(3, 0.0) == 0.0
    assert lattice_Z_kernel(-2, 0.7) == lattice_Z_kernel(2, 0.7)


def test_lattice_kernel_conserves_mass():
    t = 1.5
    total = lattice_Z_kernel(0, t) + 2 * math.fsum(lattice_Z_kernel(j, t) for j in range(1, 60))
    assert total == pytest.approx(1.0, abs=1e-14)


def test_binary_tree_is_the_line():
    for r in range(4):
        assert tree_kernel(1, r, 0.8) == pytest.approx(lattice_Z_kernel(r, 0.8), rel=1e-14)


def test_tree_kernel_conserves_mass():
    q, t = 2, 0.5
    shell = [1] + [(q + 1) * q ** (r - 1) for r in range(1, 40)]
    total = math.fsum(n * tree_kernel(q, r, t, tail_tol=1e-20) for r, n in enumerate(shell))
    assert total == pytest.approx(1.0, abs=1e-11)


@pytest.mark.parametrize("r", [0, 1, 3])
@pytest.mark.parametrize("t", [0.1, 1.0, 2.5])
def test_tree_kernel_routes_agree(r, t):
    bessel = tree_kernel_series(2, r, t)
    walks = walk_series_kernel(2, r, t)
    assert abs(bessel.value - walks.value) <= bessel.tail_bound + walks.tail_bound + 1e-13


def test_walk_counts():
    assert tree_walk_counts(2, 0, 4) == [1, 0, 3, 0, 15]
    assert tree_walk_counts(2, 3, 2) == [0, 0, 0]
    for r in range(4):
        assert generating_function_counts(2, r, 12) == tree_walk_counts(2, r, 12)
    assert generating_function_counts(3, 1, 9) == tree_walk_counts(3, 1, 9)


def test_closed_form_lookup(line, tree, random_graph):
    kernel = closed_form_for(line)
    assert kernel.kernel("2", "-1", 0.5).value == pytest.approx(lattice_Z_kernel(3, 0.5))
    tree_form = closed_form_for(tree)
    assert tree_form.distance("o.0", "o.1.1") == 3
    assert tree_form.walk_series(1, 0.3).value == pytest.approx(tree_form.eval(1, 0.3).value, abs=1e-11)
    with pytest.raises(NoClosedFormForGraph):
        kernel.walk_series(1, 0.3)
    with pytest.raises(NoClosedFormForGraph):
        closed_form_for(random_graph)
    assert closed_form_for(regular_tree(3)).params == {"q": 3}


# ---------------------------------------------------------------------
# Chain sums
# ---------------------------------------------------------------------
def test_chain_coefficients_on_the_line():
    Z = lattice_Z()
    assert chain_coefficient(Z, "0", "0", 2) == 6.0
    assert chain_coefficient(Z, "0", "1", 1) == -1.0
    assert chain_coefficient(Z, "0", "5", 2) == 0.0
    assert chain_coefficients(Z, "0", "2", 3) == [0.0, 0.0, 1.0, 6.0]
    with pytest.raises(InvalidParams):
        chain_coefficient(Z, "0", "0", 0)


def test_chain_coefficients_match_matrix_powers(random_graph):
    lap = random_graph.laplacian_matrix.toarray()
    x, y = random_graph.vertices[0], random_graph.vertices[5]
    i, j = random_graph.index[x], random_graph.index[y]
    expected = [np.linalg.matrix_power(lap, ell)[i, j] for ell in range(6)]
    assert chain_coefficients(random_graph, x, y, 5) == pytest.approx(expected, rel=1e-12, abs=1e-12)


def test_chain_region_refuses_a_close_window_boundary(short_line):
    assert len(chain_region(short_line, "0", 3)) == 7
    with pytest.raises(RegionTooSmall):
        chain_region(short_line, "0", 4)
    # a closed chain at 0 through ±3 has length at least 6
    with pytest.raises(RegionTooSmall):
        chain_region(short_line, "0", 6, "0")
    assert len(chain_region(short_line, "0", 5, "0")) == 7


# ---------------------------------------------------------------------
# Parametrices
# ---------------------------------------------------------------------
def test_dirac_parametrix_contract(random_graph):
    P = dirac_parametrix(random_graph)
    x, y = random_graph.vertices[:2]
    assert P.eval(x, x, 0.3) == pytest.approx(1 / random_graph.theta(x))
    assert P.eval(x, y, 0.3) == 0.0
    assert P.local and P.order_k == 0
    K = P.heat_op_matrix(random_graph, random_graph.vertices, 0.5)
    assert np.abs(K).max() <= P.lh_bound(1.0) + 1e-12
    assert K[0, 1] == pytest.approx(P.heat_op(x, y, 0.5))


def test_gaussian_parametrix_values(pair):
    P = gaussian_parametrix(pair, build_metric(pair, "combinatorial"))
    assert P.eval("a", "b", 1.0) == pytest.approx(math.exp(-1.0))
    assert P.eval("a", "a", 1.0) == 1.0
    assert P.eval("a", "b", 0.0) == 0.0
    assert P.eval("a", "a", 0.0) == 1.0


def test_gaussian_heat_op_sampler_matches_pointwise():
    g = lattice_window(5)
    P = gaussian_parametrix(g, build_metric(g, "combinatorial"))
    inner = g.ball("0", 2).vertices
    for t in (0.05, 0.4, 1.0):
        K = P.heat_op_matrix(g, inner, t)
        H = P.sampler(g, inner).eval(t)
        for a, u in enumerate(inner):
            for b, v in enumerate(inner):
                assert K[a, b] == pytest.approx(P.heat_op(u, v, t), rel=1e-12, abs=1e-14)
                assert H[a, b] == pytest.approx(P.eval(u, v, t), rel=1e-14)


def test_gaussian_heat_op_is_bounded():
    g = random_bounded_degree(10, 3, theta_range=(0.5, 2.0), seed=3)
    P = gaussian_parametrix(g, build_metric(g, "normalized"))
    t0 = 1.0
    bound = P.lh_bound(t0)
    for t in np.linspace(0.01, t0, 12):
        K = P.heat_op_matrix(g, g.vertices, float(t))
        assert np.abs(K).max() <= bound


def test_gaussian_support_radius_and_tails(tree):
    P = gaussian_parametrix(tree, build_metric(tree, "combinatorial"))
    reach = P.support_radius("o", 0.5, 1e-8)
    n0 = round(reach / P.min_step)
    assert gaussian_tail(3, 1.0, 1.0, 0.5, n0) <= 1e-8
    if n0 > 1:
        assert gaussian_tail(3, 1.0, 1.0, 0.5, n0 - 1) > 1e-8
    assert P.support_radius("o", 2.0, 1e-8) >= reach
    D = gaussian_parametrix(tree, build_metric(tree, "combinatorial"), tail_mode="doubling", doubling_constant=3.0)
    r = D.support_radius("o", 0.5, 1e-8)
    assert math.log2(r) == int(math.log2(r))
    assert doubling_tail(3.0, 1.0, 1.0, 1.0, 0.5, int(math.log2(r))) <= 1e-8


def test_gaussian_parametrix_rejects_bad_modes(pair):
    m = build_metric(pair, "combinatorial")
    with pytest.raises(InvalidParams):
        gaussian_parametrix(pair, m, tail_mode="cubic")
    with pytest.raises(InvalidParams):
        gaussian_parametrix(pair, m, tail_mode="doubling")
