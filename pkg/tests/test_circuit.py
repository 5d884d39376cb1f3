"""Effective resistance and j-functions against network-solver oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import circle_point, random_point
from metragraph import builtin_graph, effective_resistance, j_function
from metragraph.circuit import (
    removed_edge_resistance,
    resistance_kernel,
    resistance_profile,
)
from metragraph.green import tau_constant


# quantized so generated points never sit denormally close to a vertex
offsets = st.integers(0, 1000).map(lambda k: k / 1000.0)


@given(x=offsets, y=offsets)
@settings(max_examples=50, deadline=None)
def test_interval_resistance_is_distance(x, y):
    g = builtin_graph("interval")
    r = effective_resistance(g, g.point("e1", x), g.point("e1", y))
    assert r == pytest.approx(abs(x - y), abs=1e-12)


@given(s=offsets, t=offsets)
@settings(max_examples=50, deadline=None)
def test_circle_resistance_parallel_arcs(s, t):
    g = builtin_graph("circle")
    d = abs(s - t)
    d = min(d, 1.0 - d)
    r = effective_resistance(g, circle_point(g, s), circle_point(g, t))
    assert r == pytest.approx(d * (1.0 - d), abs=1e-12)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_banana_resistance(n):
    g = builtin_graph(f"banana:{n}")
    pa = g.point("e1", 0.0)
    pb = g.point("e1", 1.0 / n)
    assert effective_resistance(g, pa, pb) == pytest.approx(n**-2, abs=1e-12)


def test_complete_graph_resistances():
    # adjacent pair in K_n with unit edge resistance: 2/n
    tetra = builtin_graph("tetrahedron")  # edge length 1/6
    r = effective_resistance(tetra, tetra.point("e1", 0.0),
                             tetra.point("e1", tetra.edges[0].length))
    assert r == pytest.approx((1.0 / 6.0) * (2.0 / 4.0), abs=1e-12)
    k33 = builtin_graph("k33")  # edge length 1/9, adjacent pair 5/9
    r = effective_resistance(k33, k33.point_at_vertex("a1"),
                             k33.point_at_vertex("b1"))
    assert r == pytest.approx(5.0 / 81.0, abs=1e-12)


@pytest.mark.parametrize("name", ["banana:3", "petersen", "cube", "k5"])
def test_resistance_matches_network_oracle(name, rng):
    g = builtin_graph(name)
    for _ in range(8):
        x, y = random_point(g, rng), random_point(g, rng)
        assert effective_resistance(g, x, y) == pytest.approx(
            oracles.resistance(g, x, y), abs=1e-10
        )


def test_resistance_degenerate_and_triangle(rng):
    g = builtin_graph("octahedron")
    x = random_point(g, rng)
    assert effective_resistance(g, x, x) == 0.0
    for _ in range(20):
        a, b, c = (random_point(g, rng) for _ in range(3))
        rab = effective_resistance(g, a, b)
        rbc = effective_resistance(g, b, c)
        rac = effective_resistance(g, a, c)
        assert rac <= rab + rbc + 1e-12


@pytest.mark.parametrize("name", ["interval", "circle", "tetrahedron", "k33"])
def test_j_function_matches_oracle(name, rng):
    g = builtin_graph(name)
    for _ in range(6):
        zeta, y, x = (random_point(g, rng) for _ in range(3))
        assert j_function(g, zeta, y, x) == pytest.approx(
            oracles.j_value(g, zeta, y, x), abs=1e-10
        )


def test_j_function_identities(rng):
    g = builtin_graph("petersen")
    for _ in range(10):
        zeta, x, y = (random_point(g, rng) for _ in range(3))
        j = j_function(g, zeta, y, x)
        assert j == pytest.approx(j_function(g, zeta, x, y), abs=1e-11)
        half = 0.5 * (
            effective_resistance(g, x, zeta)
            + effective_resistance(g, y, zeta)
            - effective_resistance(g, x, y)
        )
        assert j == pytest.approx(half, abs=1e-11)
        assert j >= -1e-12
        # grounding: zero at zeta; diagonal recovers resistance
        assert j_function(g, zeta, y, zeta) == pytest.approx(0.0, abs=1e-12)
        assert j_function(g, zeta, x, x) == pytest.approx(
            effective_resistance(g, zeta, x), abs=1e-11
        )


def test_removed_edge_resistance():
    assert math.isinf(removed_edge_resistance(builtin_graph("interval"), "e1"))
    b2 = builtin_graph("banana:2")
    assert removed_edge_resistance(b2, "e1") == pytest.approx(0.5, abs=1e-12)
    circ = builtin_graph("circle")
    assert removed_edge_resistance(circ, "e1.1") == pytest.approx(0.5, abs=1e-12)
    tetra = builtin_graph("tetrahedron")
    assert removed_edge_resistance(tetra, "e1") == pytest.approx(
        1.0 / 6.0, abs=1e-12
    )


def test_kernel_agrees_with_direct_solves(rng):
    g = builtin_graph("dodecahedron")
    kern = resistance_kernel(g)
    for _ in range(12):
        x, y = random_point(g, rng), random_point(g, rng)
        assert kern.point_eval(x, y) == pytest.approx(
            effective_resistance(g, x, y), abs=1e-10
        )


def test_profile_matches_pointwise(rng):
    g = builtin_graph("k5")
    y = random_point(g, rng)
    prof = resistance_profile(g, y)
    for _ in range(10):
        x = random_point(g, rng)
        assert prof.value(x) == pytest.approx(
            effective_resistance(g, x, y), abs=1e-10
        )


def test_profile_energy_gives_tau():
    # tau = (1/4) int (d/dx r(x, y))^2 dx, independent of the base point y
    for name, expect in [("interval", 0.25), ("circle", 1.0 / 12.0)]:
        g = builtin_graph(name)
        y = g.point(g.edges[0].id, 0.3 * g.edges[0].length)
        energy = resistance_profile(g, y).derivative_energy()
        assert 0.25 * energy == pytest.approx(expect, abs=1e-12)
        assert tau_constant(g) == pytest.approx(expect, abs=1e-12)
    g = builtin_graph("tetrahedron")
    e0 = resistance_profile(g, g.point("e1", 0.02)).derivative_energy()
    e1 = resistance_profile(g, g.point("e4", 0.11)).derivative_energy()
    assert 0.25 * e0 == pytest.approx(0.25 * e1, abs=1e-12)
    assert 0.25 * e0 == pytest.approx(tau_constant(g), abs=1e-12)
