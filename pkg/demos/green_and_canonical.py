"""Arakelov-Green's functions, the canonical measure, and trace identities.

g_mu(x, y) solves Delta_x g = delta_y - mu with both normalizations
integral g(., y) dmu = 0 and g symmetric.  The canonical measure is the
unique mu for which g_mu is, up to the constant tau, just -r(x, y)/2.
"""

from metragraph import (
    CPAFunction,
    build_green,
    builtin_graph,
    canonical_measure,
    dirac,
    discriminant_sum,
    effective_resistance,
    energy_pairing,
    format_point,
    lebesgue_measure,
    tau_constant,
    trace_of_phi,
    weak_laplacian_residual,
)

g = builtin_graph("tetrahedron")
can = canonical_measure(g)
print("canonical measure of the tetrahedron (6 edges of length 1/6)")
for point, mass in can.atoms:
    print(f"  atom {format_point(g, point):<12} mass {mass:+.12g}")
for eid in sorted(can.densities):
    print(f"  edge {eid:<12} density {can.densities[eid][0]:.12g} dx")
print(f"  total mass {can.total_mass():.12g}")

tau = tau_constant(g)
ev = build_green(g, can)
x = g.point("e2", 0.04)
y = g.point("e5", 0.11)
print(f"\ntau = {tau:.12g}  (5/96 = {5 / 96:.12g})")
print("g_can(x, y) + r(x, y)/2 should equal tau at every pair:")
for pair in ((x, y), (x, x), (g.point_at_vertex("a"), y)):
    lhs = ev.g(*pair) + 0.5 * effective_resistance(g, *pair)
    print(f"  {format_point(g, pair[0])}, {format_point(g, pair[1])}: {lhs:.12g}")

# the trace of the integral operator against dx detects the measure:
# among unit measures it is minimized by dx/l and the canonical measure
# sits above it
dx = lebesgue_measure(g, normalize=True)
t_dx = trace_of_phi(build_green(g, dx))
t_can = trace_of_phi(ev)
print(f"\nTr phi_dx  = {t_dx:.12g}")
print(f"Tr phi_can = {t_can:.12g}   (>= Tr phi_dx: {t_can >= t_dx})")

# energy pairing <nu, nu>_mu is >= 0 for mass-zero nu, any reference mu
nu = dirac(g, g.point("e1", 0.02)) - dirac(g, g.point("e6", 0.15))
e = energy_pairing(ev, nu, nu)
print(f"\nenergy of a dipole nu = delta_x - delta_y: {e.real:.12g} "
      f"(equals r(x, y): {effective_resistance(g, g.point('e1', 0.02), g.point('e6', 0.15)):.12g})")

pts = [g.point_at_vertex(v) for v in g.vertices]
rep = discriminant_sum(ev, pts)
print(f"\naveraged Green sum over all four vertices: {rep.average_sum:.12g}")
print(f"lower bound -sup g(x, x)/(n - 1):           {rep.lower_bound:.12g}")

# g acts as a weak inverse of the Laplacian: pair the x-derivative of
# g(., y) against the derivative of any piecewise-affine phi
phi = CPAFunction(g, {v: float(i) for i, v in enumerate(g.vertices)})
res = weak_laplacian_residual(ev, y, phi)
print(f"\nweak Laplacian residual for a tent function: {res:.3g}")
