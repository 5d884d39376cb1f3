"""Green's functions g_mu(x, y) and everything built from them.

For a unit measure mu the evaluator stores the resistance potential
rho_mu(x) = integral of r(x, zeta) d mu(zeta) as one exact piecewise
polynomial per edge, plus the constant c_mu = (1/2) double integral of r
against mu.  Then

    g_mu(x, y) = (rho_mu(x) + rho_mu(y) - r(x, y)) / 2 - c_mu,

which satisfies Delta_x g = delta_y - mu and integrates to zero against mu;
both facts are exercised by tests rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from . import circuit
from .graph_core import ValidationError
from .measure import Measure, integrate_polys_against, lebesgue_measure
from .numerics import NumericError, PiecewisePoly

TAU_INDEPENDENCE_TOL = 1e-10
TRACE_COMPARISON_TOL = 1e-7
DISCRIMINANT_SLACK = 1e-9


def _poly_moments(coeffs, L, upto=2):
    """[integral of t^b g(t) dt over [0, L] for b = 0..upto]."""
    c = np.atleast_1d(np.asarray(coeffs))
    out = []
    for b in range(upto + 1):
        shifted = np.concatenate([np.zeros(b, dtype=c.dtype), c])
        out.append(npoly.polyval(L, npoly.polyint(shifted)))
    return out


def _kink_poly(a, L, inv, mass):
    """mass * (|x - a| - (x - a)^2 * inv) as a PiecewisePoly on [0, L]."""
    left = mass * np.array([a - a * a * inv, -1.0 + 2 * a * inv, -inv])
    right = mass * np.array([-a - a * a * inv, 1.0 + 2 * a * inv, -inv])
    if a <= 0.0:
        return PiecewisePoly([0.0, L], [right])
    if a >= L:
        return PiecewisePoly([0.0, L], [left])
    return PiecewisePoly([0.0, a, L], [left, right])


def resistance_potential(kernel, nu):
    """Per-edge PiecewisePoly of x -> integral of r(x, zeta) d nu(zeta).

    Exact for measures in atoms + polynomial-density form; complex masses
    are allowed.
    """
    graph = kernel.graph
    out = {}
    for e in graph.edges:
        base = np.zeros(3, dtype=complex)
        for e2 in graph.edges:
            if e2.id == e.id or e2.id not in nu.densities:
                continue
            m = _poly_moments(nu.densities[e2.id], e2.length)
            base += kernel.biquad(e.id, e2.id) @ np.asarray(m)
        pieces = [PiecewisePoly([0.0, e.length], [base])]
        LR = e.length + kernel.removed(e.id)
        inv = 0.0 if math.isinf(LR) else 1.0 / LR
        if e.id in nu.densities:
            g = np.atleast_1d(np.asarray(nu.densities[e.id]))
            m0, m1, m2 = _poly_moments(g, e.length)
            f1 = npoly.polyint(2 * g, m=2, k=[0, 0], lbnd=0)
            f1 = npoly.polyadd(f1, np.array([m1, -m0]))
            f2 = inv * np.array([m2, -2 * m1, m0])
            pieces.append(
                PiecewisePoly([0.0, e.length], [npoly.polysub(f1, f2)])
            )
        for p, mass in nu.atoms:
            if p.edge == e.id:
                pieces.append(_kink_poly(p.offset, e.length, inv, mass))
            else:
                tv = np.array([1.0, p.offset, p.offset**2])
                quad = mass * (kernel.biquad(e.id, p.edge) @ tv)
                pieces.append(PiecewisePoly([0.0, e.length], [quad]))
        acc = pieces[0]
        for extra in pieces[1:]:
            acc = acc + extra
        if nu.is_real():
            acc = PiecewisePoly(acc.breaks, [c.real for c in acc.coeffs])
        out[e.id] = acc
    return out


class GreenEvaluator:
    """Evaluates g_mu(x, y) exactly through rho_mu, c_mu, and r(x, y)."""

    def __init__(self, graph, mu):
        mu.require_reference()
        self.graph = graph
        self.mu = mu
        self.kernel = circuit.resistance_kernel(graph)
        self.rho = resistance_potential(self.kernel, mu)
        self.c_mu = float(np.real(0.5 * integrate_polys_against(mu, self.rho)))

    def rho_at(self, point):
        return float(np.real(self.rho[point.edge](point.offset)))

    def g(self, x, y):
        r = self.kernel.point_eval(x, y)
        return 0.5 * (self.rho_at(x) + self.rho_at(y) - r) - self.c_mu

    def g_profile(self, y):
        """Per-edge PiecewisePoly of x -> g_mu(x, y)."""
        shift = 0.5 * self.rho_at(y) - self.c_mu
        r_polys = self.kernel.profile_polys(y)
        return {
            e.id: 0.5 * (self.rho[e.id] + (-1.0) * r_polys[e.id]) + shift
            for e in self.graph.edges
        }

    def diag_poly(self, edge_id):
        """x -> g_mu(x, x) on one edge (r(x, x) = 0)."""
        return self.rho[edge_id] + (-self.c_mu)

    def sup_diag(self):
        """Exact sup over the graph of g_mu(x, x), via derivative roots."""
        return max(
            self.diag_poly(e.id).extreme_values()[1] for e in self.graph.edges
        )

    def phi_at(self, x, polys):
        """(phi_mu f)(x) for f given as per-edge PiecewisePoly; exact."""
        profile = self.g_profile(x)
        return math.fsum(
            float(np.real((profile[eid] * polys[eid]).integral()))
            for eid in profile
        )


def build_green(graph, mu):
    return GreenEvaluator(graph, mu)


def green_eval(evaluator, x, y):
    return evaluator.g(x, y)


def weak_laplacian_residual(evaluator, y, phi):
    """|integral of (d/dx g(x,y)) phi'(x) dx - (phi(y) - integral of phi dmu)|.

    phi is a CPAFunction; all integrals are exact piecewise-polynomial ones.
    """
    lhs = 0.0
    profile = evaluator.g_profile(y)
    phi_polys = {}
    for e in evaluator.graph.edges:
        pw = phi.to_piecewise(e.id)
        phi_polys[e.id] = pw
        lhs += float(np.real(
            (profile[e.id].derivative() * pw.derivative()).integral()
        ))
    rhs = phi.at_point(y) - float(np.real(
        integrate_polys_against(evaluator.mu, phi_polys)
    ))
    return abs(lhs - rhs)


def tau_constant(graph):
    """tau = (1/4) integral of (d/dx r(x, y))^2 dx, independent of y.

    Computed at two distinct base points and cross-checked.
    """
    y1 = graph.point_at_vertex(graph.vertices[0])
    e_last = graph.edges[-1]
    y2 = graph.point(e_last.id, 0.5 * e_last.length)
    kernel = circuit.resistance_kernel(graph)
    taus = []
    for y in (y1, y2):
        polys = kernel.profile_polys(y)
        total = 0.0
        for poly in polys.values():
            der = poly.derivative()
            total += float(np.real((der * der).integral()))
        taus.append(0.25 * total)
    if abs(taus[0] - taus[1]) > TAU_INDEPENDENCE_TOL:
        raise NumericError(
            f"tau disagrees between base points: {taus[0]!r} vs {taus[1]!r}"
        )
    return taus[0]


def energy_pairing(evaluator, nu, omega):
    """<nu, omega>_mu = double integral of g_mu d nu d conj(omega)."""
    omega_bar = _conjugate_measure(omega)
    a = complex(nu.total_mass())
    b = complex(omega_bar.total_mass())
    rho_nu_omega = complex(integrate_polys_against(omega_bar, evaluator.rho))
    rho_mu_nu = complex(integrate_polys_against(nu, evaluator.rho))
    rho_nu = resistance_potential(evaluator.kernel, nu)
    r_cross = complex(integrate_polys_against(omega_bar, rho_nu))
    value = (
        0.5 * b * rho_mu_nu
        + 0.5 * a * rho_nu_omega
        - 0.5 * r_cross
        - evaluator.c_mu * a * b
    )
    return value


def _conjugate_measure(nu):
    atoms = [(p, np.conjugate(m)) for p, m in nu.atoms]
    dens = {eid: np.conjugate(c) for eid, c in nu.densities.items()}
    return Measure(nu.graph, atoms, dens)


@dataclass
class DiscriminantReport:
    average_sum: float      # S = sum over i != j of g(x_i, x_j) / (N(N-1))
    lower_bound: float      # -M / (N - 1), proof-sharp
    sup_diagonal: float     # M = sup_x g(x, x)
    constant: float         # C = 2M, so S >= -C/N is implied for N >= 2


def discriminant_sum(evaluator, points):
    """Average off-diagonal Green sum over a point set, with its lower bound."""
    pts = list(points)
    n = len(pts)
    if n < 2:
        raise ValidationError("need at least two points")
    rho_vals = np.array([evaluator.rho_at(p) for p in pts])
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            r = evaluator.kernel.point_eval(pts[i], pts[j])
            gij = 0.5 * (rho_vals[i] + rho_vals[j] - r) - evaluator.c_mu
            total += 2.0 * gij
    s = total / (n * (n - 1))
    m = evaluator.sup_diag()
    bound = -m / (n - 1)
    if s < bound - DISCRIMINANT_SLACK:
        raise NumericError(
            f"discriminant sum {s!r} violates lower bound {bound!r}"
        )
    return DiscriminantReport(s, bound, m, 2.0 * m)


def trace_of_phi(evaluator):
    """Trace of phi_mu: integral of g_mu(x, x) dx, exact."""
    return math.fsum(
        float(np.real(evaluator.diag_poly(e.id).integral()))
        for e in evaluator.graph.edges
    )


def trace_comparison(graph, mu1, mu2):
    """Both sides of the trace-change identity between two unit measures.

    lhs = Tr(phi_mu1); rhs = Tr(phi_mu2) - <dx, dx>_mu2 +
    <dx - mu1, dx - mu1>_mu2.  Agreement is asserted to 1e-7.
    """
    ev1 = build_green(graph, mu1)
    ev2 = build_green(graph, mu2)
    lhs = trace_of_phi(ev1)
    dx = lebesgue_measure(graph)
    diff = dx - mu1
    rhs = (
        trace_of_phi(ev2)
        - float(np.real(energy_pairing(ev2, dx, dx)))
        + float(np.real(energy_pairing(ev2, diff, diff)))
    )
    if abs(lhs - rhs) > TRACE_COMPARISON_TOL * max(1.0, abs(lhs)):
        raise NumericError(
            f"trace comparison mismatch: {lhs!r} vs {rhs!r}"
        )
    return lhs, rhs
