"""Shared fixtures and small helpers for the suite."""

import numpy as np
import pytest

from metragraph import Measure, builtin_graph


def circle_point(graph, s):
    """Map a circumference coordinate in [0, 1] onto the split-loop circle."""
    s = s % 1.0
    if s <= 0.5:
        return graph.point("e1.1", s)
    return graph.point("e1.2", s - 0.5)


def random_point(graph, rng, interior=False):
    e = graph.edges[int(rng.integers(len(graph.edges)))]
    lo = 0.05 * e.length if interior else 0.0
    return graph.point(e.id, float(rng.uniform(lo, e.length - lo)))


def random_mass_zero(graph, rng):
    """Discrete measure with a few atoms summing to zero, sometimes with a
    constant edge density compensated by an extra atom."""
    k = int(rng.integers(2, 6))
    masses = rng.normal(size=k)
    masses -= masses.mean()
    atoms = [(random_point(graph, rng), float(m)) for m in masses]
    densities = {}
    if rng.random() < 0.3:
        e = graph.edges[int(rng.integers(len(graph.edges)))]
        c = float(rng.normal())
        densities[e.id] = [c]
        atoms.append((random_point(graph, rng), -c * e.length))
    return Measure(graph, atoms, densities)


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)


@pytest.fixture(scope="session")
def interval():
    return builtin_graph("interval")


@pytest.fixture(scope="session")
def circle():
    return builtin_graph("circle")


@pytest.fixture(scope="session")
def tetrahedron():
    return builtin_graph("tetrahedron")
