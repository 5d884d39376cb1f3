"""Measures, canonical measure, integration, CPA test functions."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metragraph import (
    CPAFunction,
    Measure,
    ValidationError,
    builtin_graph,
    canonical_measure,
    dirac,
    lebesgue_measure,
    subdivide_at,
)
from metragraph.measure import (
    integrate_against,
    integrate_polys_against,
    load_measure,
    measure_from_json,
    measure_summary,
    measure_to_json,
    remap_measure,
    resolve_measure,
)
from metragraph.numerics import PiecewisePoly


def test_atoms_merge_by_point_identity():
    g = builtin_graph("tetrahedron")
    # the same vertex reached through two different edge endpoints
    mu = Measure(g, [(g.point("e1", 0.0), 0.25), (g.point_at_vertex("a"), 0.75)])
    assert mu.atom_count() == 1
    assert mu.total_mass() == pytest.approx(1.0)


def test_mass_variation_and_algebra():
    g = builtin_graph("interval")
    mu = Measure(g, [(g.point("e1", 0.25), -0.5)], {"e1": [1.0, -2.0]})
    assert mu.total_mass() == pytest.approx(-0.5)  # -0.5 + (1 - 1)
    assert mu.total_variation() == pytest.approx(1.0)  # 0.5 + int |1 - 2t|
    nu = dirac(g, g.point("e1", 0.25), 0.5)
    combo = 2.0 * mu + nu
    assert combo.total_mass() == pytest.approx(-0.5)
    assert (mu - mu).total_mass() == pytest.approx(0.0)
    assert (-mu).total_mass() == pytest.approx(0.5)
    assert measure_summary(nu) == (0.5, 0.5, 1)


def test_require_reference():
    g = builtin_graph("interval")
    assert lebesgue_measure(g).require_reference() is not None  # length 1
    with pytest.raises(ValidationError):
        dirac(g, g.point("e1", 0.5), 2.0).require_reference()
    with pytest.raises(ValidationError):
        Measure(g, [(g.point("e1", 0.0), 1.0 + 0.5j)]).require_reference()


def test_cross_graph_algebra_rejected():
    g1 = builtin_graph("interval")
    g2 = builtin_graph("interval")
    with pytest.raises(ValidationError):
        lebesgue_measure(g1) + lebesgue_measure(g2)


def test_canonical_interval_and_circle():
    g = builtin_graph("interval")
    mu = canonical_measure(g)
    assert mu.densities == {}
    assert sorted((p.edge, p.offset, m) for p, m in mu.atoms) == \
        [("e1", 0.0, 0.5), ("e1", 1.0, 0.5)]
    circ = builtin_graph("circle")
    nu = canonical_measure(circ)
    assert nu.atoms == []  # valence-2 points carry no mass
    for eid in ("e1.1", "e1.2"):
        assert nu.densities[eid] == pytest.approx([1.0])


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_canonical_banana(n):
    g = builtin_graph(f"banana:{n}")
    mu = canonical_measure(g)
    masses = {g.vertex_of(p): m for p, m in mu.atoms}
    if n == 2:
        assert masses == {}  # zero vertex masses are dropped
    else:
        assert masses == {"a": pytest.approx(1 - n / 2),
                          "b": pytest.approx(1 - n / 2)}
    for e in g.edges:
        assert mu.densities[e.id] == pytest.approx([float(n - 1)])
    assert mu.total_mass() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize(
    "name",
    ["tetrahedron", "k5", "k33", "petersen", "cube", "octahedron",
     "dodecahedron", "icosahedron"],
)
def test_canonical_unit_mass(name):
    mu = canonical_measure(builtin_graph(name))
    assert mu.total_mass() == pytest.approx(1.0, abs=1e-12)
    assert all(m < 0 for _, m in mu.atoms)  # valence > 2 everywhere


def test_integrate_against_mixed():
    g = builtin_graph("interval")
    mu = Measure(g, [(g.point("e1", 0.5), 2.0)], {"e1": [0.0, 1.0]})
    val = integrate_against(mu, lambda eid, t: np.asarray(t) ** 2)
    assert val == pytest.approx(2.0 * 0.25 + 0.25, abs=1e-12)


def test_integrate_polys_against_exact():
    g = builtin_graph("interval")
    mu = Measure(g, [(g.point("e1", 1.0), 3.0)], {"e1": [1.0, 1.0]})
    polys = {"e1": PiecewisePoly([0.0, 1.0], [[0.0, 0.0, 1.0]])}  # t^2
    # 3 * 1 + int t^2 (1 + t) = 3 + 1/3 + 1/4
    assert integrate_polys_against(mu, polys) == pytest.approx(
        3.0 + 1.0 / 3.0 + 0.25, abs=1e-14
    )


def test_measure_json_roundtrip(tmp_path):
    g = builtin_graph("banana:2")
    mu = Measure(g, [(g.point("e1", 0.1), 0.25)], {"e2": [0.5, 1.0]})
    data = measure_to_json(mu)
    back = measure_from_json(g, data)
    assert measure_summary(back) == pytest.approx(measure_summary(mu))
    path = tmp_path / "mu.json"
    path.write_text(__import__("json").dumps(data), encoding="utf-8")
    assert load_measure(g, str(path)).total_mass() == pytest.approx(
        mu.total_mass()
    )
    with pytest.raises(ValidationError):
        measure_from_json(g, {"atoms": [{"mass": 1.0}]})


def test_resolve_measure_specs():
    g = builtin_graph("banana:3")
    assert resolve_measure(g, "dx").total_mass() == pytest.approx(1.0)
    assert resolve_measure(g, "dx-normalized").total_mass() == pytest.approx(1.0)
    assert resolve_measure(g, "canonical").atom_count() == 2
    with pytest.raises(OSError):
        resolve_measure(g, "/nonexistent/measure.json")


@given(t=st.integers(1, 9), c0=st.floats(0.1, 2), c1=st.floats(-2, 2))
@settings(max_examples=30, deadline=None)
def test_remap_preserves_mass_and_values(t, c0, c1):
    g = builtin_graph("interval")
    mu = Measure(g, [(g.point("e1", t / 10.0), 0.5)], {"e1": [c0, c1]})
    g2, vname, remap = subdivide_at(g, g.point("e1", t / 10.0))
    mu2 = remap_measure(mu, g2, remap)
    assert mu2.total_mass() == pytest.approx(mu.total_mass(), abs=1e-12)
    # the atom lands on the new vertex
    (p, m), = mu2.atoms
    assert g2.vertex_of(p) == vname and m == 0.5
    # density values agree in the global coordinate
    poly = np.polynomial.polynomial.polyval
    for s in (t / 20.0, t / 10.0 + (1 - t / 10.0) / 3.0):
        eid = "e1.1" if s <= t / 10.0 else "e1.2"
        local = s if eid == "e1.1" else s - t / 10.0
        assert poly(local, mu2.densities[eid]) == pytest.approx(
            poly(s, [c0, c1]), abs=1e-12
        )


def test_cpa_function_basics():
    g = builtin_graph("interval")
    f = CPAFunction(g, {"a": 1.0, "b": 0.0})
    assert f.at_point(g.point("e1", 0.25)) == pytest.approx(0.75)
    assert f.dirichlet_energy() == pytest.approx(1.0)
    assert f.l2_norm_sq() == pytest.approx(1.0 / 3.0)
    pw = f.to_piecewise("e1")
    assert pw(0.4) == pytest.approx(0.6)


def test_cpa_interior_nodes():
    g = builtin_graph("interval")
    f = CPAFunction(g, {"a": 0.0, "b": 0.0}, {"e1": [(0.5, 1.0)]})
    assert f.breakpoints("e1") == [0.5]
    assert f.at_point(g.point("e1", 0.25)) == pytest.approx(0.5)
    assert f.dirichlet_energy() == pytest.approx(2.0 * 2.0 * 0.5 * 2)
    ts, slopes = f.prime("e1")
    assert list(slopes) == pytest.approx([2.0, -2.0])
    with pytest.raises(ValidationError):
        CPAFunction(g, {}, {"e1": [(1.5, 1.0)]})


def test_cpa_hat_on_tetrahedron():
    g = builtin_graph("tetrahedron")
    f = CPAFunction.hat(g, "a")
    assert f.at_point(g.point_at_vertex("a")) == pytest.approx(1.0)
    # slope 6 on each of the three incident edges of length 1/6
    assert f.dirichlet_energy() == pytest.approx(3 * 36 / 6.0)
