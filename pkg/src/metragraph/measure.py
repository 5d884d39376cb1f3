"""Finite signed measures of computable form: atoms plus per-edge polynomial
densities, mu = g(x) dx + sum c_i delta_{p_i}.

Density coefficients are ascending in the un-normalized edge coordinate
t in [0, L(e)] and give the density per unit length.  Atoms sitting at edge
endpoints canonicalize to vertices and merge.  Reference measures must be
real with total mass 1; auxiliary measures (for energy pairings) may carry
complex masses.
"""

from __future__ import annotations

import json
import math

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import circuit
from .graph_core import (
    ValidationError, format_point, parse_point, total_length, valence,
)
from .numerics import PiecewisePoly, QuadratureRule, integrate_piecewise

REFERENCE_MASS_TOL = 1e-10
CANONICAL_MASS_TOL = 1e-10


class Measure:
    """Atoms + per-edge polynomial densities on a fixed graph."""

    def __init__(self, graph, atoms=(), densities=None):
        self.graph = graph
        merged = {}
        for point, mass in atoms:
            graph.edge(point.edge)  # existence check
            key = graph.point_key(point)
            if key in merged:
                old_pt, old_mass = merged[key]
                merged[key] = (old_pt, old_mass + mass)
            else:
                merged[key] = (point, complex(mass) if isinstance(mass, complex)
                               else float(mass))
        self._atoms = {k: merged[k] for k in sorted(merged)}
        dens = {}
        for eid, coeffs in (densities or {}).items():
            graph.edge(eid)
            arr = np.atleast_1d(np.asarray(coeffs))
            if not np.iscomplexobj(arr):
                arr = arr.astype(float)
            if np.any(arr != 0):
                dens[eid] = arr
        self.densities = {k: dens[k] for k in sorted(dens)}

    @property
    def atoms(self):
        """Deterministically ordered list of (point, mass)."""
        return list(self._atoms.values())

    def density(self, edge_id):
        return self.densities.get(edge_id, np.zeros(1))

    def is_real(self):
        if any(isinstance(m, complex) for _, m in self.atoms):
            return False
        return not any(np.iscomplexobj(c) for c in self.densities.values())

    def total_mass(self):
        mass = sum(m for _, m in self.atoms)
        for e in self.graph.edges:
            if e.id in self.densities:
                anti = npoly.polyint(self.densities[e.id])
                mass += npoly.polyval(e.length, anti)
        if isinstance(mass, complex) and mass.imag == 0:
            mass = mass.real
        return mass

    def total_variation(self):
        var = math.fsum(abs(m) for _, m in self.atoms)
        for e in self.graph.edges:
            if e.id not in self.densities:
                continue
            c = self.densities[e.id]
            if np.iscomplexobj(c):
                rule = QuadratureRule(24)
                var += integrate_piecewise(
                    lambda t: np.abs(npoly.polyval(t, c)), [0.0, e.length], rule
                )
            else:
                var += PiecewisePoly([0.0, e.length], [c]).abs_integral()
        return float(var)

    def atom_count(self):
        return len(self._atoms)

    def require_reference(self):
        """Validate use as a reference measure: real, total mass 1."""
        if not self.is_real():
            raise ValidationError("reference measure must have real masses")
        mass = self.total_mass()
        if abs(mass - 1.0) > REFERENCE_MASS_TOL:
            raise ValidationError(f"reference measure has mass {mass!r}, expected 1")
        return self

    def _same_graph(self, other):
        if other.graph is not self.graph:
            raise ValidationError("measures live on different graphs")

    def __add__(self, other):
        self._same_graph(other)
        atoms = self.atoms + other.atoms
        dens = dict(self.densities)
        for eid, c in other.densities.items():
            dens[eid] = npoly.polyadd(dens[eid], c) if eid in dens else c
        return Measure(self.graph, atoms, dens)

    def __sub__(self, other):
        return self + (other * -1.0)

    def __mul__(self, scalar):
        atoms = [(p, m * scalar) for p, m in self.atoms]
        dens = {eid: c * scalar for eid, c in self.densities.items()}
        return Measure(self.graph, atoms, dens)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __repr__(self):
        return (
            f"Measure(mass {self.total_mass()!r}, {self.atom_count()} atoms, "
            f"{len(self.densities)} density edges)"
        )


def measure_summary(mu):
    """(total mass, total variation, atom count)."""
    return mu.total_mass(), mu.total_variation(), mu.atom_count()


def dirac(graph, point, mass=1.0):
    return Measure(graph, [(point, mass)])


def lebesgue_measure(graph, normalize=False):
    """Constant density 1 per unit length (1/total length when normalized)."""
    c = 1.0 / total_length(graph) if normalize else 1.0
    return Measure(graph, (), {e.id: [c] for e in graph.edges})


def canonical_measure(graph):
    """Vertex masses 1 - valence/2 plus edge densities 1/(L(e) + R(e)).

    R(e) is the removed-edge resistance; bridges get density 0.  The total
    mass is asserted to be 1.
    """
    atoms = []
    for v in graph.vertices:
        mass = 1.0 - 0.5 * valence(graph, v)
        if mass != 0.0:
            atoms.append((graph.point_at_vertex(v), mass))
    densities = {}
    for e in graph.edges:
        R = circuit.removed_edge_resistance(graph, e.id)
        if not math.isinf(R):
            densities[e.id] = [1.0 / (e.length + R)]
    mu = Measure(graph, atoms, densities)
    mass = mu.total_mass()
    if abs(mass - 1.0) > CANONICAL_MASS_TOL:
        raise ValidationError(f"canonical measure has mass {mass!r}")
    return mu


def integrate_against(mu, f, breakpoints=None, rule=None):
    """Integral of f against mu.

    f is called as f(edge_id, offsets_array) -> values; breakpoints is an
    optional dict edge_id -> interior smoothness breaks of f.  Atom values
    are read at the atom's representative point.
    """
    rule = rule or QuadratureRule()
    total = 0.0
    for p, mass in mu.atoms:
        val = np.asarray(f(p.edge, np.array([p.offset])))[0]
        total = total + mass * val
    for e in mu.graph.edges:
        if e.id not in mu.densities:
            continue
        coeffs = mu.densities[e.id]
        breaks = [0.0, e.length]
        if breakpoints:
            inner = breakpoints.get(e.id, []) if isinstance(breakpoints, dict) \
                else breakpoints(e.id)
            breaks = sorted(set(breaks) | {float(t) for t in inner
                                           if 0.0 < t < e.length})
        total = total + integrate_piecewise(
            lambda t, eid=e.id, c=coeffs: np.asarray(f(eid, t)) * npoly.polyval(t, c),
            breaks,
            rule,
        )
    if isinstance(total, complex) and total.imag == 0:
        total = total.real
    return total


def integrate_polys_against(mu, polys):
    """Exact integral against mu of a per-edge PiecewisePoly family."""
    total = 0.0
    for p, mass in mu.atoms:
        total = total + mass * polys[p.edge](p.offset)
    for eid, coeffs in mu.densities.items():
        e = mu.graph.edge(eid)
        g = PiecewisePoly([0.0, e.length], [coeffs])
        total = total + (polys[eid] * g).integral()
    if isinstance(total, complex) and total.imag == 0:
        total = total.real
    return total


def measure_from_json(graph, data):
    """Parse {"atoms":[{"point":..., "mass":...}], "densities":[...]}. """
    if isinstance(data, str):
        data = json.loads(data)
    atoms = []
    for item in data.get("atoms", []):
        try:
            atoms.append((parse_point(graph, item["point"]), float(item["mass"])))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed atom entry: {exc}") from None
    densities = {}
    for item in data.get("densities", []):
        try:
            densities[item["edge"]] = [float(c) for c in item["poly"]]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed density entry: {exc}") from None
    return Measure(graph, atoms, densities)


def measure_to_json(mu):
    atoms = [
        {"point": format_point(mu.graph, p), "mass": float(np.real(m))}
        for p, m in mu.atoms
    ]
    densities = [
        {"edge": eid, "poly": [float(np.real(c)) for c in coeffs]}
        for eid, coeffs in mu.densities.items()
    ]
    return {"atoms": atoms, "densities": densities}


def load_measure(graph, path):
    with open(path, encoding="utf-8") as fh:
        return measure_from_json(graph, json.load(fh))


def resolve_measure(graph, spec):
    """Resolve 'dx' | 'dx-normalized' | 'canonical' | JSON file path."""
    if spec == "dx":
        return lebesgue_measure(graph)
    if spec == "dx-normalized":
        return lebesgue_measure(graph, normalize=True)
    if spec == "canonical":
        return canonical_measure(graph)
    return load_measure(graph, spec)


def remap_measure(mu, graph2, remap):
    """Carry a measure through a subdivision remap onto the new graph.

    Atoms move through the point remap (an atom at the split point migrates
    to the new vertex); the split edge's density is restricted to the two
    child edges with the child-local coordinate shift.
    """
    atoms = [(remap(p), m) for p, m in mu.atoms]
    densities = {}
    for eid, coeffs in mu.densities.items():
        if remap.split_edge is None or eid != remap.split_edge:
            densities[eid] = coeffs
            continue
        t0 = remap.split_offset
        densities[remap.child_u] = coeffs
        # shift t -> t + t0 for the far child
        shifted = np.zeros_like(np.asarray(coeffs, dtype=complex)
                                if np.iscomplexobj(coeffs) else
                                np.asarray(coeffs, dtype=float))
        for k, c in enumerate(np.atleast_1d(coeffs)):
            for j in range(k + 1):
                shifted[j] += c * math.comb(k, j) * t0 ** (k - j)
        densities[remap.child_v] = shifted
    return Measure(graph2, atoms, densities)


class CPAFunction:
    """Continuous piecewise-affine test function on a graph.

    Built from one value per vertex plus optional interior nodes per edge;
    affine between nodes.
    """

    def __init__(self, graph, vertex_values, interior=None):
        self.graph = graph
        self._nodes = {}
        interior = interior or {}
        for e in graph.edges:
            u_val = float(vertex_values.get(e.u, 0.0))
            v_val = float(vertex_values.get(e.v, 0.0))
            pts = sorted(interior.get(e.id, []))
            for t, _ in pts:
                if not (0.0 < t < e.length):
                    raise ValidationError(
                        f"interior node offset {t} outside edge {e.id!r}"
                    )
            ts = [0.0] + [float(t) for t, _ in pts] + [e.length]
            vs = [u_val] + [float(v) for _, v in pts] + [v_val]
            self._nodes[e.id] = (np.array(ts), np.array(vs))

    @classmethod
    def hat(cls, graph, vertex):
        """1 at the given vertex, 0 at every other vertex, affine on edges."""
        return cls(graph, {vertex: 1.0})

    def eval(self, edge_id, t):
        ts, vs = self._nodes[edge_id]
        return np.interp(np.asarray(t, dtype=float), ts, vs)

    def at_point(self, point):
        return float(self.eval(point.edge, point.offset))

    def breakpoints(self, edge_id):
        ts, _ = self._nodes[edge_id]
        return [float(t) for t in ts[1:-1]]

    def to_piecewise(self, edge_id):
        ts, vs = self._nodes[edge_id]
        coeffs = []
        for (a, b, fa, fb) in zip(ts, ts[1:], vs, vs[1:]):
            slope = (fb - fa) / (b - a)
            coeffs.append(np.array([fa - slope * a, slope]))
        return PiecewisePoly(ts, coeffs)

    def prime(self, edge_id):
        """(breaks, slopes): the piecewise-constant derivative."""
        ts, vs = self._nodes[edge_id]
        return ts, np.diff(vs) / np.diff(ts)

    def dirichlet_energy(self):
        total = 0.0
        for eid in self._nodes:
            ts, slopes = self.prime(eid)
            total += float(np.sum(slopes**2 * np.diff(ts)))
        return total

    def l2_norm_sq(self):
        total = 0.0
        for eid in self._nodes:
            pw = self.to_piecewise(eid)
            total += (pw * pw).integral()
        return float(total)
