"""Desk-scale acceptance runs. Deselect with ``-m "not slow"``."""

import math

import numpy as np
import pytest

from engine.dirac import dirac_kernel_row, heat_kernel_dirac
from engine.general import heat_kernel_general
from graph_core.generators import (
    lattice_Z,
    lattice_window,
    random_bounded_degree,
    regular_tree,
    tree_ball,
    tree_shells,
    two_vertex,
)
from kernels.closed_form import lattice_Z_kernel, tree_kernel
from kernels.parametrix import dirac_parametrix, gaussian_parametrix
from kernels.walks import walk_series_kernel
from metrics.metric import build_metric, verify_metric
from validation.asymptotics import SMALL_TIMES, correction_slope, deviation_ratios, leading_term_deviations
from validation.ctrw import ctrw_simulate
from validation.oracles import SpectralOracle
from validation.suite import SuiteConfig, suite_run

pytestmark = pytest.mark.slow


def test_lattice_window_matches_bessel_kernel():
    g = lattice_window(80)
    for t in (0.25, 1.0, 2.0):
        for j in range(6):
            est = heat_kernel_dirac(g, "0", str(j), t)
            assert est.value == pytest.approx(lattice_Z_kernel(j, t), rel=1e-8)


def test_tree_window_matches_closed_form():
    g = tree_ball(2, 13)
    ys = ["o", "o.1", "o.1.1", "o.1.1.1", "o.1.1.1.1"]
    for r, y in enumerate(ys):
        est = heat_kernel_dirac(g, "o", y, 0.25)
        assert est.value == pytest.approx(tree_kernel(2, r, 0.25), rel=1e-8)


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("t", [0.25, 1.0])
def test_tree_shells_match_closed_form(q, t):
    g = tree_shells(q, 40)
    for r in range(5):
        est = heat_kernel_dirac(g, "0", str(r), t)
        assert est.value == pytest.approx(tree_kernel(q, r, t), rel=1e-8)


@pytest.mark.parametrize("q", [2, 3])
def test_tree_closed_form_matches_walk_series(q):
    for t in (0.25, 1.0):
        for r in range(5):
            walks = walk_series_kernel(q, r, t)
            assert abs(tree_kernel(q, r, t) - walks.value) <= 1e-10


def test_mass_is_exact_on_random_graphs():
    for seed in range(20):
        g = random_bounded_degree(40, 4, theta_range=(0.5, 2.0), w_range=(0.5, 1.5), seed=seed)
        x = g.vertices[seed % len(g)]
        for t in (0.1, 1.0):
            row, _ = dirac_kernel_row(g, x, t)
            mass = math.fsum(h * g.theta(y) for y, h in row.items())
            assert abs(mass - 1.0) <= 1e-12


def test_dirac_agrees_with_the_dense_oracle():
    g = random_bounded_degree(200, 3, w_range=(0.5, 1.0), seed=17)
    oracle = SpectralOracle(g)
    for t in (0.1, 0.5, 1.0):
        H = oracle.matrix(t)
        for x in g.vertices:
            row, est = dirac_kernel_row(g, x, t)
            i = g.index[x]
            worst = max(abs(row.get(y, 0.0) - H[i, g.index[y]]) for y in g.vertices)
            assert worst <= est.total_bound + 1e-10


def test_gaussian_route_agrees_with_dirac():
    g = random_bounded_degree(50, 3, theta_range=(0.5, 2.0), seed=2)
    x = g.vertices[0]
    y = g.neighbors(x)[0][0]
    _assert_routes_agree(g, [(x, x), (x, y)])


def test_gaussian_route_agrees_with_dirac_on_a_tree_ball():
    g = tree_ball(2, 8).as_finite()
    _assert_routes_agree(g, [("o", "o.1")])


def _assert_routes_agree(g, pairs):
    P = gaussian_parametrix(g, build_metric(g, "combinatorial"))
    for t in (0.25, 1.0):
        for x, y in pairs:
            dirac = heat_kernel_dirac(g, x, y, t)
            gauss = heat_kernel_general(g, P, x, y, t)
            diff = abs(dirac.value - gauss.value)
            assert diff <= dirac.total_bound + gauss.total_bound
            assert diff <= 1e-4


@pytest.mark.parametrize(
    "graph, x, ys",
    [
        (lattice_Z(), "0", ["1", "2", "3"]),
        (regular_tree(2), "o", ["o.1", "o.1.1", "o.1.1.1"]),
    ],
    ids=["line", "tree"],
)
def test_small_time_deviation_is_linear(graph, x, ys):
    for y in ys:
        devs = leading_term_deviations(graph, x, y, SMALL_TIMES)
        for ratio in deviation_ratios(devs):
            assert 0.08 <= ratio <= 0.12


def test_residual_is_second_order_on_ten_queries():
    config = SuiteConfig(checks=("residual",), centers=2, pairs_per_center=5)
    report = suite_run(lattice_window(30), config)
    (check,) = report.checks
    assert check.passed, check.as_dict()
    assert check.queries >= 10


@pytest.mark.parametrize("kind", ["dirac", "gaussian"])
def test_parametrix_correction_order(kind):
    g = two_vertex()
    P = dirac_parametrix(g) if kind == "dirac" else gaussian_parametrix(g, build_metric(g, "combinatorial"))
    slope = correction_slope(g, P, "a", "b", (1e-1, 1e-2, 1e-3))
    assert slope >= P.order_k + 1 - 0.05


def test_random_walks_reproduce_the_kernel():
    g = two_vertex()
    for t in (0.5, 1.0):
        walk = ctrw_simulate(g, "a", t, 1_000_000, seed=1)
        p = (1 - math.exp(-2 * t)) / 2
        assert abs(walk.frequency("b") - p) <= 5 * walk.standard_error(p)
    line = lattice_window(30)
    for t in (0.5, 1.0):
        walk = ctrw_simulate(line, "0", t, 1_000_000, seed=1)
        for j in range(-2, 3):
            p = lattice_Z_kernel(j, t)
            assert abs(walk.frequency(str(j)) - p) <= 5 * walk.standard_error(p)


@pytest.mark.parametrize(
    "graph",
    [
        lattice_window(10, dim=2),
        tree_ball(2, 6),
        random_bounded_degree(200, 4, theta_range=(0.5, 2.0), w_range=(0.5, 1.5), seed=9),
    ],
    ids=["plane", "tree", "random"],
)
@pytest.mark.parametrize("kind", ["combinatorial", "normalized", "intrinsic_degenerate", "adapted", "edge_weighted"])
def test_metrics_verify_on_generated_families(graph, kind):
    report = verify_metric(graph, build_metric(graph, kind))
    assert report.passed, report.as_dict()
    assert np.isfinite(report.min_distance)
