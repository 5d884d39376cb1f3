"""A short walk through the resistor-network layer.

Every edge is a wire whose resistance is its length.  Effective resistance
r(x, y) is what an ohmmeter across x and y would read; j_zeta(x, y) is the
potential at x when one ampere enters at y and leaves at zeta with the
ground clamped to zeta.
"""

from metragraph import (
    builtin_graph,
    effective_resistance,
    j_function,
    removed_edge_resistance,
    resistance_profile,
    tau_constant,
)


def show(label, got, want=None):
    note = "" if want is None else f"   (expected {want:.12g})"
    print(f"  {label:<42} {got:.12g}{note}")


g = builtin_graph("interval")
a, b = g.point_at_vertex("a"), g.point_at_vertex("b")
print("interval [0, 1]")
show("r(a, b)", effective_resistance(g, a, b), 1.0)
show("r(a, midpoint)", effective_resistance(g, a, g.point("e1", 0.5)), 0.5)

circle = builtin_graph("circle")
x = circle.point("e1.1", 0.1)
y = circle.point("e1.2", 0.4)  # circumference position 0.9
print("\ncircle of length 1 (two arcs in parallel)")
show("r(0.1, 0.9)", effective_resistance(circle, x, y), 0.2 * 0.8)

k33 = builtin_graph("k33")
u, v = k33.edges[0].u, k33.edges[0].v
print("\ncomplete bipartite K3,3, total length 1 (edge length 1/9)")
show("r(adjacent vertices)", effective_resistance(
    k33, k33.point_at_vertex(u), k33.point_at_vertex(v)), 5.0 / 81.0)

# the j-function is the workhorse behind everything else:
# j_zeta(x, y) >= 0, j_zeta(y, y) = r(zeta, y)
g = builtin_graph("tetrahedron")
zeta = g.point_at_vertex(g.edges[0].u)
yy = g.point_at_vertex(g.edges[0].v)
print("\ntetrahedron, unit current from y to zeta")
show("j_zeta(y, y) = r(zeta, y)", j_function(g, zeta, yy, yy),
     effective_resistance(g, zeta, yy))
show("j_zeta(zeta, y)", j_function(g, zeta, yy, zeta), 0.0)

# deleting an edge and measuring across the gap
banana = builtin_graph("banana:2")
print("\ntwo parallel edges of length 1/2")
show("resistance across a deleted edge",
     removed_edge_resistance(banana, "e1"), 0.5)

# the tau constant is a quarter of the Dirichlet energy of r(x, .)
print("\ntau constants")
for name, want in (("interval", 0.25), ("circle", 1.0 / 12.0)):
    show(f"tau({name})", tau_constant(builtin_graph(name)), want)

pet = builtin_graph("petersen")
prof = resistance_profile(pet, pet.point_at_vertex("o0"))
e = pet.edge("star0")
print("\npetersen: r(o0, x) for x at quarter points of an inner edge")
for k in range(5):
    t = e.length * k / 4
    print(f"  r(o0, {e.id}:{t:.4f}) = {prof.value(pet.point(e.id, t)):.12g}")
