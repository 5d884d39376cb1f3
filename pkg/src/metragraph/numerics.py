"""Shared numerical kernels: quadrature, grounded solves, nullspaces, roots."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import optimize


class NumericError(RuntimeError):
    """Raised when a numerical routine cannot meet its accuracy contract."""


DEFAULT_RANK_TOL = 1e-8
DEFAULT_ROOT_TOL = 1e-12
DEFAULT_DIP_FACTOR = 1e-6


class QuadratureRule:
    """Gauss-Legendre rule; exact for polynomials of degree <= 2*order - 1."""

    def __init__(self, order=12):
        if order < 1:
            raise ValueError("order must be >= 1")
        self.order = int(order)
        # nodes/weights on [-1, 1]
        self._x, self._w = np.polynomial.legendre.leggauss(self.order)

    def nodes(self, a, b):
        """Nodes and weights transplanted to [a, b]."""
        half = 0.5 * (b - a)
        return 0.5 * (a + b) + half * self._x, half * self._w

    def integrate(self, f, a, b):
        if b <= a:
            return 0.0
        x, w = self.nodes(a, b)
        y = np.asarray(f(x), dtype=float)
        if not np.all(np.isfinite(y)):
            raise NumericError(f"integrand not finite on [{a}, {b}]")
        return float(w @ y)


def integrate_piecewise(f, breakpoints, rule=None):
    """Integrate f over [breakpoints[0], breakpoints[-1]] piece by piece.

    Breakpoints must be sorted; each open piece is assumed smooth.  Exact for
    piecewise polynomials of degree <= 2*order - 1.
    """
    rule = rule or QuadratureRule()
    pts = list(breakpoints)
    if any(b < a for a, b in zip(pts, pts[1:])):
        raise ValueError("breakpoints must be sorted")
    return math.fsum(rule.integrate(f, a, b) for a, b in zip(pts, pts[1:]) if b > a)


def solve_grounded(Q, b, grounded, tol=1e-10):
    """Solve Q v = b with v[grounded] = 0 for a connected-graph Laplacian Q.

    The right-hand side must sum to zero; the grounded row/column is removed,
    the reduced system solved densely, and the residual checked.
    """
    Q = np.asarray(Q, dtype=float)
    b = np.asarray(b, dtype=float)
    n = Q.shape[0]
    if Q.shape != (n, n) or b.shape != (n,):
        raise ValueError("shape mismatch")
    keep = [i for i in range(n) if i != grounded]
    v = np.zeros(n)
    if keep:
        try:
            v[keep] = np.linalg.solve(Q[np.ix_(keep, keep)], b[keep])
        except np.linalg.LinAlgError as exc:
            raise NumericError(f"grounded solve failed: {exc}") from None
    residual = np.max(np.abs(Q @ v - b)) if n else 0.0
    scale = max(1.0, float(np.max(np.abs(b))) if n else 0.0)
    # written as a negated <= so that a nan residual also fails
    if not residual <= tol * scale:
        raise NumericError(f"grounded solve residual {residual:g} exceeds tolerance")
    return v


def nullspace_basis(M, rank_tol=DEFAULT_RANK_TOL):
    """Orthonormal basis of the numerical nullspace via SVD.

    Vectors whose singular value is below rank_tol times the largest singular
    value are kept; a zero matrix yields the full space.
    """
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return []
    _, s, vh = np.linalg.svd(M)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return [vh[i] for i in range(vh.shape[0])]
    ns = [vh[i] for i in range(vh.shape[0]) if i >= s.size or s[i] < rank_tol * smax]
    return ns


@dataclass
class RootCandidate:
    """One refined root of a scalar function of gamma."""

    bracket: tuple
    kind: str  # "sign-change" or "magnitude-dip"
    gamma: float
    residual: float


def golden_min(f, a, b, xatol):
    """Golden-section minimizer honoring an absolute bracket tolerance.

    scipy's bounded Brent stops at sqrt(eps) * |x| regardless of xatol, which
    is too coarse for pinning V-shaped singular-value dips; this plain
    golden-section contraction has no relative floor.
    """
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xatol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def scan_and_refine_roots(
    f,
    gamma_min,
    gamma_max,
    step,
    tol=DEFAULT_ROOT_TOL,
    dip_factor=DEFAULT_DIP_FACTOR,
):
    """Locate roots of f on [gamma_min, gamma_max] by grid scanning.

    Sign changes between samples are refined by bracketed root-finding; local
    minima of |f| falling below dip_factor times the median sample magnitude
    are treated as candidate even-multiplicity roots and refined by bounded
    minimization of |f|.  Roots closer than tol are merged (the one with the
    smaller |f| wins).  A step too coarse to separate neighboring roots is not
    detectable here; callers pick the step from the expected root spacing.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if gamma_max <= gamma_min:
        raise ValueError("empty scan interval")
    n = max(2, int(math.ceil((gamma_max - gamma_min) / step)) + 1)
    grid = np.linspace(gamma_min, gamma_max, n)
    vals = np.array([f(g) for g in grid], dtype=float)
    if not np.all(np.isfinite(vals)):
        raise NumericError("function not finite on scan grid")
    absvals = np.abs(vals)
    median = float(np.median(absvals))
    dip_threshold = dip_factor * median if median > 0 else 0.0

    candidates = []
    for i in range(n - 1):
        a, b = grid[i], grid[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            candidates.append(RootCandidate((a, b), "sign-change", float(a), 0.0))
            continue
        if fa * fb < 0.0:
            root = optimize.brentq(f, a, b, xtol=tol, rtol=8 * np.finfo(float).eps)
            candidates.append(
                RootCandidate((a, b), "sign-change", float(root), abs(f(root)))
            )
    if vals[-1] == 0.0:
        candidates.append(
            RootCandidate((grid[-2], grid[-1]), "sign-change", float(grid[-1]), 0.0)
        )
    for i in range(1, n - 1):
        if absvals[i] <= absvals[i - 1] and absvals[i] <= absvals[i + 1]:
            if absvals[i] >= dip_threshold:
                continue
            if vals[i - 1] * vals[i] < 0 or vals[i] * vals[i + 1] < 0:
                continue  # already caught as a sign change
            a, b = grid[i - 1], grid[i + 1]
            x = golden_min(lambda g: abs(f(g)), a, b, tol)
            candidates.append(RootCandidate((a, b), "magnitude-dip", x, abs(f(x))))

    candidates.sort(key=lambda c: c.gamma)
    merged = []
    for c in candidates:
        if merged and abs(c.gamma - merged[-1].gamma) <= max(tol, 1e-15):
            if c.residual < merged[-1].residual:
                merged[-1] = c
            continue
        merged.append(c)
    return merged


def equilibrate_rows(M):
    """Scale each row by its max absolute entry; zero rows are left alone.

    Returns (scaled matrix, scale factors).  Determinants of the scaled
    matrix differ from det(M) by the product of the factors, so only root
    locations carry meaning.
    """
    M = np.asarray(M, dtype=float)
    scales = np.max(np.abs(M), axis=1)
    scales[scales == 0.0] = 1.0
    return M / scales[:, None], scales


def equilibrated_det(M):
    scaled, _ = equilibrate_rows(M)
    return float(np.linalg.det(scaled))


def smallest_singular_value(M):
    s = np.linalg.svd(np.asarray(M, dtype=float), compute_uv=False)
    return float(s[-1] / s[0]) if s[0] > 0 else 0.0


def real_roots_in_interval(coeffs, a, b, tol=1e-12):
    """Real roots of a polynomial (ascending coeffs) inside (a, b)."""
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    if c.size <= 1:
        return []
    roots = npoly.polyroots(c)
    out = []
    for r in roots:
        if abs(r.imag) < tol and a + tol < r.real < b - tol:
            out.append(float(r.real))
    return sorted(out)


class PiecewisePoly:
    """Piecewise polynomial on [breaks[0], breaks[-1]], one coefficient array
    (ascending, in the global coordinate) per piece.  Closed under addition,
    scaling, multiplication, differentiation, and exact integration."""

    def __init__(self, breaks, coeffs):
        self.breaks = np.asarray(breaks, dtype=float)
        if self.breaks.ndim != 1 or self.breaks.size < 2:
            raise ValueError("need at least one piece")
        if np.any(np.diff(self.breaks) <= 0):
            raise ValueError("breakpoints must strictly increase")
        if len(coeffs) != self.breaks.size - 1:
            raise ValueError("one coefficient array per piece")
        self.coeffs = []
        for c in coeffs:
            arr = np.atleast_1d(np.asarray(c))
            if not np.iscomplexobj(arr):
                arr = arr.astype(float)
            self.coeffs.append(arr)

    @classmethod
    def constant(cls, value, a, b):
        return cls([a, b], [np.array([value])])

    @classmethod
    def from_poly(cls, coeffs, a, b):
        return cls([a, b], [coeffs])

    def _piece_index(self, t):
        idx = np.searchsorted(self.breaks, t, side="right") - 1
        return np.clip(idx, 0, len(self.coeffs) - 1)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        tt = np.atleast_1d(t)
        idx = self._piece_index(tt)
        dtype = complex if any(np.iscomplexobj(c) for c in self.coeffs) else float
        out = np.empty(tt.shape, dtype=dtype)
        for k in range(len(self.coeffs)):
            sel = idx == k
            if np.any(sel):
                out[sel] = npoly.polyval(tt[sel], self.coeffs[k])
        return out[0] if scalar else out

    def _binary(self, other, op):
        if isinstance(other, PiecewisePoly):
            breaks = np.union1d(self.breaks, other.breaks)
            lo = max(self.breaks[0], other.breaks[0])
            hi = min(self.breaks[-1], other.breaks[-1])
            breaks = breaks[(breaks >= lo) & (breaks <= hi)]
            coeffs = []
            for a, b in zip(breaks, breaks[1:]):
                mid = 0.5 * (a + b)
                ca = self.coeffs[int(self._piece_index(mid))]
                cb = other.coeffs[int(other._piece_index(mid))]
                coeffs.append(op(ca, cb))
            return PiecewisePoly(breaks, coeffs)
        other_c = np.atleast_1d(np.asarray(other))
        return PiecewisePoly(self.breaks, [op(c, other_c) for c in self.coeffs])

    def __add__(self, other):
        return self._binary(other, npoly.polyadd)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, npoly.polysub)

    def __mul__(self, other):
        if isinstance(other, PiecewisePoly):
            return self._binary(other, npoly.polymul)
        return PiecewisePoly(self.breaks, [c * other for c in self.coeffs])

    __rmul__ = __mul__

    def derivative(self):
        return PiecewisePoly(self.breaks, [npoly.polyder(c) for c in self.coeffs])

    def integral(self, a=None, b=None):
        """Exact integral over [a, b] (default: the whole support)."""
        a = self.breaks[0] if a is None else a
        b = self.breaks[-1] if b is None else b
        total = 0.0
        for k, (lo, hi) in enumerate(zip(self.breaks, self.breaks[1:])):
            lo2, hi2 = max(lo, a), min(hi, b)
            if hi2 <= lo2:
                continue
            anti = npoly.polyint(self.coeffs[k])
            total += npoly.polyval(hi2, anti) - npoly.polyval(lo2, anti)
        return total

    def abs_integral(self):
        """Integral of |self|, splitting pieces at their real roots."""
        total = 0.0
        for k, (lo, hi) in enumerate(zip(self.breaks, self.breaks[1:])):
            cuts = [lo] + real_roots_in_interval(self.coeffs[k].real, lo, hi) + [hi]
            anti = npoly.polyint(self.coeffs[k])
            for a, b in zip(cuts, cuts[1:]):
                total += abs(npoly.polyval(b, anti) - npoly.polyval(a, anti))
        return total

    def extreme_values(self):
        """(min, max) over the support, found exactly via derivative roots."""
        cands = [self(self.breaks[0])]
        for k, (lo, hi) in enumerate(zip(self.breaks, self.breaks[1:])):
            cands.append(self(hi))
            der = npoly.polyder(self.coeffs[k])
            for r in real_roots_in_interval(der, lo, hi):
                cands.append(npoly.polyval(r, self.coeffs[k]))
        vals = np.real(np.asarray(cands, dtype=complex))
        return float(vals.min()), float(vals.max())
