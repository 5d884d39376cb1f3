"""Eigenvalue problem for the Laplacian with a fixed reference measure.

At frequency gamma, every solution of the edge-wise eigen-equation
f'' + gamma^2 f = gamma^2 C g (g the measure's polynomial edge density, C
the Lebesgue integral of f over the whole graph) has the form
A cos(gamma t) + B sin(gamma t) + C h(t), with h a polynomial particular
solution.  Continuity at each vertex, one derivative-balance condition per
vertex, and the vanishing of the integral of f against the measure yield a
square homogeneous system M(gamma) of size 2m+1; eigenvalues are
lambda = gamma^2 exactly where M(gamma) is singular, with multiplicity the
nullspace dimension.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import optimize

from . import green as green_mod
from .graph_core import ValidationError, subdivide_at, total_length
from .measure import integrate_polys_against, remap_measure
from .numerics import (
    DEFAULT_RANK_TOL,
    DEFAULT_ROOT_TOL,
    NumericError,
    QuadratureRule,
    equilibrate_rows,
    golden_min,
    integrate_piecewise,
    nullspace_basis,
    smallest_singular_value,
)

DEFAULT_GAMMA_FLOOR = 1e-6
LAMBDA_MERGE_REL = 1e-9
ZERO_ROW_REL = 1e-10


def _default_threads():
    raw = os.environ.get("METRAGRAPH_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _exp_moments(omega, length, count):
    """I_k = integral of t^k exp(i omega t) over [0, length], k = 0..count.

    The closed form from integration by parts cancels catastrophically when
    omega*length is small relative to k, so each k picks between it and a
    power series in (i omega); the crossover omega*length >= k+1 keeps the
    upward recursion's error amplification factor k/(omega*length) below 1.
    """
    if omega < 0:
        raise ValueError("omega must be nonnegative")
    out = np.empty(count + 1, dtype=complex)
    x = omega * length
    k_closed = min(count, int(math.floor(x - 1.0))) if omega > 0 else -1
    if k_closed >= 0:
        E = complex(math.cos(x), math.sin(x))
        iw = 1j * omega
        out[0] = (E - 1.0) / iw
        Lk = 1.0
        for k in range(1, k_closed + 1):
            Lk *= length
            out[k] = (Lk * E - k * out[k - 1]) / iw
    for k in range(k_closed + 1, count + 1):
        term = 1.0 + 0.0j  # (i omega)^j / j!
        powL = length ** (k + 1)
        s = 0.0 + 0.0j
        for j in range(200):
            s += term * powL / (k + j + 1)
            powL *= length
            term *= 1j * omega / (j + 1)
            if abs(term) * powL < 1e-17 * max(abs(s), 1e-300) * (k + j + 2):
                break
        out[k] = s
    return out


def trig_poly_moments(coeffs, omega, length):
    """(integral of p(t) cos(omega t), integral of p(t) sin(omega t)) on [0, length]."""
    c = np.atleast_1d(np.asarray(coeffs, dtype=float))
    I = _exp_moments(omega, length, len(c) - 1)
    z = complex(np.dot(c, I))
    return z.real, z.imag


def particular_solution(coeffs, gamma):
    """Polynomial h with h'' + gamma^2 h = gamma^2 g for polynomial g.

    Finite expansion h = sum_k (-1)^k g^(2k) / gamma^(2k); the sum stops
    once the repeated second derivative vanishes.
    """
    if gamma <= 0:
        raise ValidationError("gamma must be positive")
    term = np.atleast_1d(np.asarray(coeffs, dtype=float)).copy()
    h = np.zeros_like(term)
    sign = 1.0
    while np.any(term != 0.0):
        h = npoly.polyadd(h, sign * term)
        term = np.atleast_1d(npoly.polyder(term, 2)) / (gamma * gamma)
        sign = -sign
    return np.atleast_1d(h)


@dataclass
class EdgeBasisSolution:
    """One edge-wise solution at frequency gamma.

    On edge e the value at local offset t is
    trig[e][0] cos(gamma t) + trig[e][1] sin(gamma t) + constant * h_e(t),
    where h_e = particular[e] and constant is the Lebesgue integral of the
    function over the graph.
    """

    gamma: float
    trig: dict
    constant: float
    particular: dict

    @property
    def eigenvalue(self):
        return self.gamma * self.gamma

    def value(self, edge_id, t):
        A, B = self.trig[edge_id]
        t = np.asarray(t, dtype=float)
        h = npoly.polyval(t, self.particular[edge_id])
        return A * np.cos(self.gamma * t) + B * np.sin(self.gamma * t) \
            + self.constant * h

    def derivative(self, edge_id, t):
        A, B = self.trig[edge_id]
        g = self.gamma
        t = np.asarray(t, dtype=float)
        hp = npoly.polyval(t, npoly.polyder(self.particular[edge_id]))
        return -A * g * np.sin(g * t) + B * g * np.cos(g * t) \
            + self.constant * hp

    def at_point(self, point):
        return float(self.value(point.edge, point.offset))

    def sup_norm(self, graph, samples_per_edge=64):
        """Grid estimate of the supremum norm."""
        worst = 0.0
        for e in graph.edges:
            t = np.linspace(0.0, e.length, samples_per_edge)
            worst = max(worst, float(np.max(np.abs(self.value(e.id, t)))))
        return worst


@dataclass
class Eigenpair:
    eigenvalue: float
    multiplicity: int
    eigenfunctions: tuple = ()
    diagnostic: str = ""


@dataclass
class CharacteristicMatrix:
    """Row-equilibrated homogeneous system at one frequency."""

    gamma: float
    matrix: np.ndarray
    row_tags: tuple


class SpectralProblem:
    """Assembles M(gamma) for one (graph, reference measure) pair.

    Interior atoms force subdivisions so that every atom of the working
    measure sits at a vertex; the unknown vector is ordered
    (A_1, B_1, ..., A_m, B_m, C) following the working graph's edge order.
    """

    def __init__(self, graph, mu):
        mu.require_reference()
        self.base_graph = graph
        work, measure, remaps = graph, mu, []
        while True:
            interior = [p for p, _ in measure.atoms if work.vertex_of(p) is None]
            if not interior:
                break
            work, _, remap = subdivide_at(work, interior[0])
            measure = remap_measure(measure, work, remap)
            remaps.append(remap)
        self.graph = work
        self.mu = measure
        self._remaps = remaps
        self.edges = work.edges
        self._col = {e.id: 2 * k for k, e in enumerate(self.edges)}
        self.size = 2 * len(self.edges) + 1
        self._atom_mass = {}
        for p, mass in measure.atoms:
            v = work.vertex_of(p)
            if v is None:
                raise NumericError("atom strictly inside an edge after subdivision")
            self._atom_mass[v] = self._atom_mass.get(v, 0.0) + float(np.real(mass))
        self._density = {
            e.id: np.atleast_1d(np.asarray(measure.density(e.id), dtype=float))
            for e in self.edges
        }
        tags = []
        for v in work.vertices:
            tags.extend([f"continuity@{v}"] * (len(work.incidences(v)) - 1))
            tags.append(f"derivative@{v}")
        tags.append("integral")
        self.row_tags = tuple(tags)

    def map_point(self, point):
        """Carry a point on the original graph onto the working graph."""
        for remap in self._remaps:
            point = remap(point)
        return point

    def particulars(self, gamma):
        return {
            eid: particular_solution(c, gamma) for eid, c in self._density.items()
        }

    def matrix(self, gamma):
        """Row-equilibrated M(gamma)."""
        scaled, _ = equilibrate_rows(self._assemble(gamma))
        return scaled

    def nullspace(self, gamma, rank_tol=DEFAULT_RANK_TOL):
        """Nullspace vectors of M(gamma), robust to rows that vanish there.

        A whole raw row can vanish at a degenerate root (the integral row
        does when an atom-only measure produces a double eigenvalue), and
        per-row equilibration would rescale its numerical noise to unit
        size, hiding one nullspace dimension.  Near-zero rows are therefore
        dropped before the remaining rows are equilibrated and the rank
        decision is made.
        """
        raw = self._assemble(gamma)
        rowmax = np.max(np.abs(raw), axis=1)
        keep = rowmax > ZERO_ROW_REL * float(np.max(rowmax))
        if not np.any(keep):
            return nullspace_basis(np.zeros((1, self.size)), rank_tol)
        reduced, _ = equilibrate_rows(raw[keep])
        return nullspace_basis(reduced, rank_tol)

    def _assemble(self, gamma):
        if gamma <= 0:
            raise ValidationError("gamma must be positive")
        parts = self.particulars(gamma)
        M = np.zeros((self.size, self.size))
        ccol = self.size - 1
        g = gamma
        val = {}  # (edge id, end) -> (A, B, C) coefficients of f at the endpoint
        der = {}  # (edge id, end) -> coefficients of the inward derivative
        for e in self.edges:
            h = parts[e.id]
            hp = np.atleast_1d(npoly.polyder(h))
            L = e.length
            cg, sg = math.cos(g * L), math.sin(g * L)
            val[(e.id, 0)] = (1.0, 0.0, float(npoly.polyval(0.0, h)))
            val[(e.id, 1)] = (cg, sg, float(npoly.polyval(L, h)))
            der[(e.id, 0)] = (0.0, g, float(npoly.polyval(0.0, hp)))
            der[(e.id, 1)] = (g * sg, -g * cg, -float(npoly.polyval(L, hp)))
        r = 0
        for v in self.graph.vertices:
            inc = self.graph.incidences(v)
            e0, end0 = inc[0]
            base = val[(e0.id, end0)]
            for e, end in inc[1:]:
                row = M[r]
                r += 1
                a = val[(e.id, end)]
                row[self._col[e.id]] += a[0]
                row[self._col[e.id] + 1] += a[1]
                row[ccol] += a[2]
                row[self._col[e0.id]] -= base[0]
                row[self._col[e0.id] + 1] -= base[1]
                row[ccol] -= base[2]
            row = M[r]
            r += 1
            for e, end in inc:
                d = der[(e.id, end)]
                row[self._col[e.id]] += d[0]
                row[self._col[e.id] + 1] += d[1]
                row[ccol] += d[2]
            row[ccol] -= g * g * self._atom_mass.get(v, 0.0)
        row = M[r]
        for e in self.edges:
            dens = self._density[e.id]
            if np.any(dens != 0.0):
                cmom, smom = trig_poly_moments(dens, g, e.length)
                row[self._col[e.id]] += cmom
                row[self._col[e.id] + 1] += smom
                anti = npoly.polyint(npoly.polymul(parts[e.id], dens))
                row[ccol] += float(npoly.polyval(e.length, anti))
        for v, mass in self._atom_mass.items():
            e0, end0 = self.graph.incidences(v)[0]
            a = val[(e0.id, end0)]
            row[self._col[e0.id]] += mass * a[0]
            row[self._col[e0.id] + 1] += mass * a[1]
            row[ccol] += mass * a[2]
        return M

    def solution(self, gamma, vec, parts=None):
        """EdgeBasisSolution from one coefficient vector."""
        parts = parts or self.particulars(gamma)
        trig = {
            e.id: (float(vec[self._col[e.id]]), float(vec[self._col[e.id] + 1]))
            for e in self.edges
        }
        return EdgeBasisSolution(gamma, trig, float(vec[-1]), parts)

    def mu_integral(self, f):
        """Exact integral of an EdgeBasisSolution against the measure."""
        total = 0.0
        for e in self.edges:
            dens = self._density[e.id]
            if not np.any(dens != 0.0):
                continue
            a, b = f.trig[e.id]
            cmom, smom = trig_poly_moments(dens, f.gamma, e.length)
            total += a * cmom + b * smom
            prod = npoly.polymul(f.constant * f.particular[e.id], dens)
            total += float(npoly.polyval(e.length, npoly.polyint(prod)))
        for v, mass in self._atom_mass.items():
            total += mass * f.at_point(self.graph.point_at_vertex(v))
        return total


def assemble_characteristic_matrix(graph, mu, gamma):
    problem = SpectralProblem(graph, mu)
    return CharacteristicMatrix(gamma, problem.matrix(gamma), problem.row_tags)


def characteristic_det(graph, mu, gamma):
    """Determinant of the equilibrated M(gamma); only its zeros carry meaning."""
    return float(np.linalg.det(assemble_characteristic_matrix(graph, mu, gamma).matrix))


def _pair_integral(L, g1, a1, b1, p1, g2, a2, b2, p2):
    """Exact integral over [0, L] of the product of two edge solutions."""
    d = g1 - g2
    Id = _exp_moments(abs(d), L, 0)[0]
    Cm = Id.real
    Sm = Id.imag if d >= 0 else -Id.imag
    Ip = _exp_moments(g1 + g2, L, 0)[0]
    Cp, Sp = Ip.real, Ip.imag
    total = 0.5 * (a1 * a2 * (Cm + Cp) + b1 * b2 * (Cm - Cp)
                   + a1 * b2 * (Sp - Sm) + a2 * b1 * (Sp + Sm))
    has1 = np.any(p1 != 0.0)
    has2 = np.any(p2 != 0.0)
    if has1:
        cmom, smom = trig_poly_moments(p1, g2, L)
        total += a2 * cmom + b2 * smom
    if has2:
        cmom, smom = trig_poly_moments(p2, g1, L)
        total += a1 * cmom + b1 * smom
    if has1 and has2:
        anti = npoly.polyint(npoly.polymul(p1, p2))
        total += float(npoly.polyval(L, anti))
    return total


def l2_inner(graph, f1, f2):
    """Exact Lebesgue inner product of two EdgeBasisSolutions."""
    total = 0.0
    for e in graph.edges:
        a1, b1 = f1.trig[e.id]
        a2, b2 = f2.trig[e.id]
        p1 = f1.constant * f1.particular[e.id]
        p2 = f2.constant * f2.particular[e.id]
        total += _pair_integral(e.length, f1.gamma, a1, b1, p1,
                                f2.gamma, a2, b2, p2)
    return total


def dirichlet_inner(graph, f1, f2):
    """Exact integral of f1' f2' over the graph."""
    total = 0.0
    for e in graph.edges:
        a1, b1 = f1.trig[e.id]
        a2, b2 = f2.trig[e.id]
        p1 = f1.constant * np.atleast_1d(npoly.polyder(f1.particular[e.id]))
        p2 = f2.constant * np.atleast_1d(npoly.polyder(f2.particular[e.id]))
        total += _pair_integral(e.length,
                                f1.gamma, b1 * f1.gamma, -a1 * f1.gamma, p1,
                                f2.gamma, b2 * f2.gamma, -a2 * f2.gamma, p2)
    return total


def _eigenpair_at(problem, gamma, rank_tol):
    basis = problem.nullspace(gamma, rank_tol)
    if not basis:
        raise NumericError(
            f"no nullspace at gamma={gamma!r}; the candidate root is discarded"
        )
    parts = problem.particulars(gamma)
    raw = [problem.solution(gamma, v, parts) for v in basis]
    k = len(raw)
    G = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            G[i, j] = G[j, i] = l2_inner(problem.graph, raw[i], raw[j])
    w, U = np.linalg.eigh(G)
    if w[0] <= 1e-12 * w[-1]:
        raise NumericError("degenerate Gram matrix in eigenspace orthonormalization")
    T = U @ np.diag(w ** -0.5) @ U.T  # symmetric inverse square root
    vecs = T @ np.asarray(basis)
    funcs = []
    for vec in vecs:
        idx = int(np.argmax(np.abs(vec)))
        if vec[idx] < 0:
            vec = -vec
        funcs.append(problem.solution(gamma, vec, parts))
    return Eigenpair(gamma * gamma, k, tuple(funcs))


def eigenfunctions_at(graph, mu, gamma_star, rank_tol=DEFAULT_RANK_TOL):
    """Eigenpair at a verified root: nullspace vectors orthonormalized in L2.

    The nullspace basis is mapped to EdgeBasisSolutions and combined through
    the inverse square root of their exact L2 Gram matrix, so the returned
    eigenfunctions are orthonormal; each is sign-fixed by its largest
    coefficient for deterministic output.
    """
    return _eigenpair_at(SpectralProblem(graph, mu), gamma_star, rank_tol)


def _confirmed_dimension(problem, gamma, kind, step, root_tol, rank_tol, lo, hi):
    if kind == "sign-change":
        # a determinant-based refinement can sit well off the singular point
        # when the root has high multiplicity (the determinant is then noise
        # over a wide plateau); re-center on the smallest singular value so
        # the rank decision sees the full nullspace
        a, b = max(lo, gamma - 0.5 * step), min(hi, gamma + 0.5 * step)
        refined = golden_min(lambda g: smallest_singular_value(problem.matrix(g)),
                             a, b, root_tol)
        # the window is wider than the detection bracket, so the polish can
        # slide into a neighboring root's basin; keep the bracketed root
        # unless the polish clearly deepens the singularity
        if smallest_singular_value(problem.matrix(refined)) \
                < 0.5 * smallest_singular_value(problem.matrix(gamma)):
            gamma = refined
    return gamma, len(problem.nullspace(gamma, rank_tol))


def find_eigenvalues(graph, mu, gamma_max, gamma_floor=DEFAULT_GAMMA_FLOOR,
                     step=None, root_tol=DEFAULT_ROOT_TOL,
                     rank_tol=DEFAULT_RANK_TOL, threads=None):
    """All eigenvalues with gamma in (gamma_floor, gamma_max], ascending.

    The scan samples det M(gamma) and the smallest singular value on a grid
    (default step pi / (8 * total length), matching the expected root
    spacing).  Sign changes of the determinant are refined by bracketed
    root-finding; local minima of the smallest singular value catch roots of
    even multiplicity, which leave the sign unchanged, and are refined by
    bounded minimization.  Every candidate must exhibit a nonempty nullspace
    at rank_tol, whose dimension is reported as the multiplicity; lambda = 0
    is excluded by the positive floor.  Returns Eigenpairs with empty
    eigenfunction tuples.
    """
    problem = SpectralProblem(graph, mu)
    if gamma_max <= gamma_floor:
        raise ValidationError("gamma_max must exceed gamma_floor")
    if step is None:
        step = math.pi / (8.0 * total_length(problem.graph))
    if threads is None:
        threads = _default_threads()
    n = max(3, int(math.ceil((gamma_max - gamma_floor) / step)) + 1)
    grid = np.linspace(gamma_floor, gamma_max, n)

    def det_at(g):
        return float(np.linalg.det(problem.matrix(g)))

    def smin_at(g):
        return smallest_singular_value(problem.matrix(g))

    def sample(g):
        M = problem.matrix(g)
        s = np.linalg.svd(M, compute_uv=False)
        smin = float(s[-1] / s[0]) if s[0] > 0 else 0.0
        return float(np.linalg.det(M)), smin

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            samples = list(pool.map(sample, grid))
    else:
        samples = [sample(g) for g in grid]
    dets = np.array([v[0] for v in samples])
    smins = np.array([v[1] for v in samples])
    if not np.all(np.isfinite(dets)):
        raise NumericError("determinant not finite on the scan grid")

    eps = float(np.finfo(float).eps)
    candidates = []
    for i in range(n - 1):
        if dets[i] == 0.0:
            candidates.append((float(grid[i]), "sign-change"))
        elif dets[i] * dets[i + 1] < 0.0:
            # near high-multiplicity roots the determinant drops below the
            # noise floor and brentq may stall; its best estimate is still
            # inside the bracket and gets re-centered during confirmation
            root, info = optimize.brentq(det_at, grid[i], grid[i + 1],
                                         xtol=root_tol, rtol=8 * eps,
                                         maxiter=200, full_output=True,
                                         disp=False)
            candidates.append((float(root), "sign-change"))
    if dets[-1] == 0.0:
        candidates.append((float(grid[-1]), "sign-change"))
    sign_roots = sorted(g for g, _ in candidates)

    for i in range(n):
        left = smins[i - 1] if i > 0 else math.inf
        right = smins[i + 1] if i < n - 1 else math.inf
        if not (smins[i] <= left and smins[i] <= right):
            continue
        a = float(grid[max(i - 1, 0)])
        b = float(grid[min(i + 1, n - 1)])
        if b <= a or any(a <= r <= b for r in sign_roots):
            continue
        candidates.append((golden_min(smin_at, a, b, root_tol), "magnitude-dip"))

    candidates.sort()
    merged = []
    for gam, kind in candidates:
        if merged and abs(gam - merged[-1][0]) <= max(100 * root_tol, 1e-9 * gam):
            if kind == "sign-change" and merged[-1][1] != "sign-change":
                merged[-1] = (gam, kind)
            continue
        merged.append((gam, kind))

    accepted = []
    for gam, kind in merged:
        gam, dim = _confirmed_dimension(problem, gam, kind, step, root_tol,
                                        rank_tol, gamma_floor, gamma_max)
        if dim == 0:
            continue
        if gam <= gamma_floor + 1000.0 * root_tol:
            # the trig parametrization degenerates as gamma -> 0 (the sine
            # columns scale with gamma), which fakes a singular matrix at
            # the floor itself; the interval is open there by contract
            continue
        diagnostic = ""
        if (kind == "magnitude-dip") != (dim % 2 == 0):
            diagnostic = (f"nullspace dimension {dim} disagrees with the "
                          f"{kind} detection parity; the nullspace wins")
        accepted.append((gam, Eigenpair(gam * gam, dim, (), diagnostic)))

    for (a, _), (b, _) in zip(accepted, accepted[1:]):
        if b - a < step:
            warnings.warn(
                f"roots at gamma={a:g} and gamma={b:g} are closer than the "
                f"scan step {step:g}; rerun with a smaller step",
                RuntimeWarning,
            )

    out = []
    for _, pair in accepted:
        if out and pair.eigenvalue - out[-1].eigenvalue \
                <= LAMBDA_MERGE_REL * pair.eigenvalue:
            mid = math.sqrt(0.5 * (pair.eigenvalue + out[-1].eigenvalue))
            dim = len(problem.nullspace(mid, rank_tol))
            if dim == 0:
                dim = max(out[-1].multiplicity, pair.multiplicity)
            out[-1] = Eigenpair(mid * mid, dim, (),
                                out[-1].diagnostic or pair.diagnostic)
            continue
        out.append(pair)
    return out


@dataclass
class ResidualReport:
    """Worst-case residuals over the eigenfunctions of one Eigenpair."""

    continuity: float
    derivative: float
    integral: float
    operator: float


def eigen_residuals(graph, mu, eigenpair, samples_per_edge=5, rule=None):
    """Continuity, derivative-balance, measure-integral, and operator residuals.

    The operator residual samples x on a grid and compares the integral of
    g_mu(x, y) f(y) dy (piecewise Gauss quadrature, pieces split below the
    trig wavelength) against f(x) / lambda.
    """
    if not eigenpair.eigenfunctions:
        raise ValidationError("eigenpair carries no eigenfunctions")
    problem = SpectralProblem(graph, mu)
    work = problem.graph
    rule = rule or QuadratureRule(12)
    evaluator = green_mod.GreenEvaluator(work, problem.mu)
    cont = der = integ = oper = 0.0
    lam = eigenpair.eigenvalue
    grid_points = [work.point_at_vertex(v) for v in work.vertices]
    for e in work.edges:
        for t in np.linspace(0.0, e.length, samples_per_edge + 2)[1:-1]:
            grid_points.append(work.point(e.id, float(t)))
    for f in eigenpair.eigenfunctions:
        gam = f.gamma
        for v in work.vertices:
            inc = work.incidences(v)
            e0, end0 = inc[0]
            base = f.value(e0.id, 0.0 if end0 == 0 else e0.length)
            balance = 0.0
            for e, end in inc:
                t_end = 0.0 if end == 0 else e.length
                cont = max(cont, abs(float(f.value(e.id, t_end)) - float(base)))
                d = float(f.derivative(e.id, t_end))
                balance += d if end == 0 else -d
            balance -= gam * gam * problem._atom_mass.get(v, 0.0) * f.constant
            der = max(der, abs(balance))
        integ = max(integ, abs(problem.mu_integral(f)))
        for x in grid_points:
            profile = evaluator.g_profile(x)
            total = 0.0
            for e in work.edges:
                pw = profile[e.id]
                breaks = set(float(b) for b in pw.breaks)
                chunks = max(1, int(math.ceil(e.length * gam / 3.0)))
                breaks.update(e.length * k / chunks for k in range(chunks + 1))
                total += integrate_piecewise(
                    lambda t, eid=e.id, p=pw: np.real(p(t)) * f.value(eid, t),
                    sorted(breaks),
                    rule,
                )
            oper = max(oper, abs(total - f.at_point(x) / lam))
    return ResidualReport(cont, der, integ, oper)


def mercer_partial_sum(eigenpairs, x, y):
    """Sum over the given eigenpairs of f_n(x) f_n(y) / lambda_n."""
    total = 0.0
    for pair in eigenpairs:
        for f in pair.eigenfunctions:
            total += f.at_point(x) * f.at_point(y) / pair.eigenvalue
    return total


def rayleigh_quotient(graph, mu, trial):
    """Dirichlet energy over squared L2 norm of the mean-centered CPA trial.

    The trial is shifted by its integral against the measure (mass 1), which
    leaves the Dirichlet energy unchanged; a trial that is constant after
    centering is rejected.
    """
    mu.require_reference()
    polys = {e.id: trial.to_piecewise(e.id) for e in graph.edges}
    mean = float(np.real(integrate_polys_against(mu, polys)))
    sup_shift = 0.0
    scale = 1.0
    lebesgue_total = 0.0
    l2 = 0.0
    for e in graph.edges:
        ts = [0.0] + trial.breakpoints(e.id) + [e.length]
        vals = trial.eval(e.id, np.asarray(ts))
        sup_shift = max(sup_shift, float(np.max(np.abs(vals - mean))))
        scale = max(scale, float(np.max(np.abs(vals))))
        lebesgue_total += polys[e.id].integral()
        l2 += (polys[e.id] * polys[e.id]).integral()
    if sup_shift <= 1e-12 * scale:
        raise ValidationError("trial function is constant after mean centering")
    num = trial.dirichlet_energy()
    denom = float(np.real(l2)) - 2.0 * mean * float(np.real(lebesgue_total)) \
        + mean * mean * total_length(graph)
    return num / denom
