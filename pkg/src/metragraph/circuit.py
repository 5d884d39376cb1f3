"""Electrical-network theory on a metrized graph.

Edges are resistors with resistance equal to their length (conductance
1/L(e), parallel edges summing).  The discrete solver (subdivide at the
points of interest, solve the grounded Laplacian system) is the source of
truth for j-functions and effective resistance; the ResistanceKernel gives
an exact closed-form representation of r(x, y) per edge pair, validated
against the solver at build time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph_core import ensure_vertex
from .numerics import NumericError, PiecewisePoly, solve_grounded

_KERNEL_CHECK_TOL = 1e-9
_PROFILE_CHECK_TOL = 1e-9


@dataclass
class ConductanceLaplacian:
    """Q = D - A over the current vertex set, conductance 1/L per edge."""

    matrix: np.ndarray
    vertex_order: tuple

    def __post_init__(self):
        self._index = {v: i for i, v in enumerate(self.vertex_order)}

    def index(self, vertex):
        return self._index[vertex]


def laplacian_matrix(graph):
    """Weighted Laplacian of the graph's vertex skeleton."""
    n = len(graph.vertices)
    Q = np.zeros((n, n))
    for e in graph.edges:
        i, j = graph.vertex_index(e.u), graph.vertex_index(e.v)
        c = 1.0 / e.length
        Q[i, i] += c
        Q[j, j] += c
        Q[i, j] -= c
        Q[j, i] -= c
    return ConductanceLaplacian(Q, graph.vertices)


def _ensure_vertices(graph, points):
    """Subdivide so every point is a vertex; returns (graph', vertex names)."""
    names = []
    current = graph
    pts = list(points)
    for k, p in enumerate(pts):
        current, name, remap = ensure_vertex(current, p)
        names.append(name)
        pts[k + 1:] = [remap(q) for q in pts[k + 1:]]
    return current, names


def j_function(graph, zeta, y, x):
    """The potential j_zeta(x, y): voltage at x when unit current flows from
    y to zeta, grounded at zeta.  Nonnegative, zero when x or y hits zeta."""
    g, (vz, vy, vx) = _ensure_vertices(graph, [zeta, y, x])
    lap = laplacian_matrix(g)
    b = np.zeros(len(g.vertices))
    b[lap.index(vy)] += 1.0
    b[lap.index(vz)] -= 1.0
    v = solve_grounded(lap.matrix, b, lap.index(vz))
    val = float(v[lap.index(vx)])
    if val < -1e-9:
        raise NumericError(f"negative j-function value {val:g}")
    return max(val, 0.0)


def effective_resistance(graph, x, y):
    """Two-terminal resistance r(x, y) = j_x(y, y)."""
    g, (vx, vy) = _ensure_vertices(graph, [x, y])
    if vx == vy:
        return 0.0
    lap = laplacian_matrix(g)
    b = np.zeros(len(g.vertices))
    b[lap.index(vy)] += 1.0
    b[lap.index(vx)] -= 1.0
    v = solve_grounded(lap.matrix, b, lap.index(vx))
    return max(float(v[lap.index(vy)]), 0.0)


def removed_edge_resistance(graph, edge_id):
    """Resistance between the endpoints of e in the graph minus e.

    Returns math.inf when e is a bridge.
    """
    e = graph.edge(edge_id)
    rest = [f for f in graph.edges if f.id != edge_id]
    adj = {v: [] for v in graph.vertices}
    for f in rest:
        adj[f.u].append(f.v)
        adj[f.v].append(f.u)
    seen = {e.u}
    stack = [e.u]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if e.v not in seen:
        return math.inf
    comp = [v for v in graph.vertices if v in seen]
    idx = {v: i for i, v in enumerate(comp)}
    Q = np.zeros((len(comp), len(comp)))
    for f in rest:
        if f.u not in idx:
            continue
        i, j = idx[f.u], idx[f.v]
        c = 1.0 / f.length
        Q[i, i] += c
        Q[j, j] += c
        Q[i, j] -= c
        Q[j, i] -= c
    b = np.zeros(len(comp))
    b[idx[e.v]] += 1.0
    b[idx[e.u]] -= 1.0
    v = solve_grounded(Q, b, idx[e.u])
    return float(v[idx[e.v]])


class ResistanceKernel:
    """Exact per-edge-pair representation of r(x, y).

    For x, y on distinct edges r is bi-quadratic in the two edge offsets
    (two-terminal reduction of the rest of the network), so a 3x3 grid of
    exact values determines the coefficients.  For x, y on the same edge,
    r(s, t) = |s - t| - (s - t)^2 / (L + R(e)) with R(e) the removed-edge
    resistance (infinite on bridges).  All grid values come from one
    grounded inverse of the graph with every edge subdivided at its
    midpoint.
    """

    def __init__(self, graph, validate=True):
        self.graph = graph
        n = len(graph.vertices)
        m = len(graph.edges)
        N = n + m
        Q = np.zeros((N, N))
        for k, e in enumerate(graph.edges):
            iu, iv, im = graph.vertex_index(e.u), graph.vertex_index(e.v), n + k
            c = 2.0 / e.length
            for a, b in ((iu, im), (im, iv)):
                Q[a, a] += c
                Q[b, b] += c
                Q[a, b] -= c
                Q[b, a] -= c
        K = np.zeros((N, N))
        if N > 1:
            try:
                K[1:, 1:] = np.linalg.inv(Q[1:, 1:])
            except np.linalg.LinAlgError as exc:
                raise NumericError(f"resistance kernel build failed: {exc}") from None
        d = np.diag(K)
        self._R = d[:, None] + d[None, :] - K - K.T
        self._nodes = {}
        self._Sinv = {}
        for k, e in enumerate(graph.edges):
            self._nodes[e.id] = [
                graph.vertex_index(e.u), n + k, graph.vertex_index(e.v)
            ]
            S = np.vander(
                np.array([0.0, e.length / 2.0, e.length]), 3, increasing=True
            )
            self._Sinv[e.id] = np.linalg.inv(S)
        self._B = {}
        self._removed = {}
        if validate:
            self._validate()

    def removed(self, edge_id):
        if edge_id not in self._removed:
            self._removed[edge_id] = removed_edge_resistance(self.graph, edge_id)
        return self._removed[edge_id]

    def biquad(self, e1, e2):
        key = (e1, e2)
        if key not in self._B:
            V = self._R[np.ix_(self._nodes[e1], self._nodes[e2])]
            self._B[key] = self._Sinv[e1] @ V @ self._Sinv[e2].T
        return self._B[key]

    def eval(self, e1, t1, e2, t2):
        """r at offsets t1 on edge e1 and t2 on edge e2 (broadcasting)."""
        t1 = np.asarray(t1, dtype=float)
        t2 = np.asarray(t2, dtype=float)
        scalar = t1.ndim == 0 and t2.ndim == 0
        if e1 == e2:
            LR = self.graph.edge(e1).length + self.removed(e1)
            d = t1 - t2
            vals = np.abs(d) - (0.0 if math.isinf(LR) else d * d / LR)
        else:
            B = self.biquad(e1, e2)
            a1, a2 = np.broadcast_arrays(np.atleast_1d(t1), np.atleast_1d(t2))
            P1 = np.vander(a1.ravel(), 3, increasing=True)
            P2 = np.vander(a2.ravel(), 3, increasing=True)
            vals = np.einsum("ia,ab,ib->i", P1, B, P2).reshape(a1.shape)
        if scalar:
            return float(np.asarray(vals).reshape(-1)[0])
        return vals

    def point_eval(self, p, q):
        return self.eval(p.edge, p.offset, q.edge, q.offset)

    def profile_polys(self, y):
        """Per-edge PiecewisePoly of x -> r(x, y)."""
        ey = self.graph.edge(y.edge)
        ty = float(y.offset)
        tyv = np.array([1.0, ty, ty * ty])
        polys = {}
        for e in self.graph.edges:
            if e.id == ey.id:
                LR = e.length + self.removed(e.id)
                inv = 0.0 if math.isinf(LR) else 1.0 / LR
                left = np.array([ty - ty * ty * inv, -1.0 + 2 * ty * inv, -inv])
                right = np.array([-ty - ty * ty * inv, 1.0 + 2 * ty * inv, -inv])
                if ty <= 0.0:
                    polys[e.id] = PiecewisePoly([0.0, e.length], [right])
                elif ty >= e.length:
                    polys[e.id] = PiecewisePoly([0.0, e.length], [left])
                else:
                    polys[e.id] = PiecewisePoly([0.0, ty, e.length], [left, right])
            else:
                polys[e.id] = PiecewisePoly(
                    [0.0, e.length], [self.biquad(e.id, ey.id) @ tyv]
                )
        return polys

    def _validate(self):
        g = self.graph
        edges = g.edges
        pairs = [(edges[0], edges[0])]
        if len(edges) > 1:
            pairs.append((edges[0], edges[-1]))
            pairs.append((edges[len(edges) // 2], edges[-1]))
        for e1, e2 in pairs:
            p = g.point(e1.id, 0.3183098861 * e1.length)
            q = g.point(e2.id, 0.7182818284 * e2.length)
            direct = effective_resistance(g, p, q)
            closed = self.point_eval(p, q)
            if abs(direct - closed) > _KERNEL_CHECK_TOL * max(1.0, abs(direct)):
                raise NumericError(
                    f"resistance kernel mismatch on ({e1.id},{e2.id}): "
                    f"{closed:.3e} vs solver {direct:.3e}"
                )


def resistance_kernel(graph, validate=True):
    """Memoized ResistanceKernel for an immutable graph."""
    key = ("rkernel", validate)
    if key not in graph._cache:
        graph._cache[key] = ResistanceKernel(graph, validate=validate)
    return graph._cache[key]


class ResistanceProfile:
    """x -> r(x, y) as one exact low-degree polynomial per edge piece."""

    def __init__(self, graph, y, kernel=None, validate=True):
        self.graph = graph
        self.y = y
        kernel = kernel or resistance_kernel(graph)
        self.polys = kernel.profile_polys(y)
        if validate:
            self._validate()

    def value(self, point):
        return float(np.real(self.polys[point.edge](point.offset)))

    def derivative_energy(self):
        """Integral over the graph of (d/dx r(x, y))^2."""
        total = 0.0
        for poly in self.polys.values():
            der = poly.derivative()
            total += (der * der).integral()
        return float(total)

    def _validate(self):
        for e in self.graph.edges:
            t = 0.3183098861 * e.length
            p = self.graph.point(e.id, t)
            direct = effective_resistance(self.graph, p, self.y)
            fitted = self.value(p)
            if abs(direct - fitted) > _PROFILE_CHECK_TOL * max(1.0, abs(direct)):
                raise NumericError(
                    f"resistance profile mismatch on edge {e.id}: "
                    f"{fitted:.3e} vs solver {direct:.3e}"
                )


def resistance_profile(graph, y, validate=True):
    return ResistanceProfile(graph, y, validate=validate)
