"""Rauzy diagrams: closure of a table under both moves.

The hyperelliptic family on n letters closes into 2^(n-1) - 1 vertices and
its labeled and reduced diagrams coincide.  Marking a regular point (the
extra letter 1) adds n vertices to the reduced diagram and makes the labeled
diagram an (n-1)-fold covering of it.
"""

from rauzyveech import (
    Renumbering,
    build_diagram,
    classify_vertex,
    covering,
    detect_symmetric_vertex,
    family_pi,
    family_tau,
)

for n in range(4, 9):
    hyp = build_diagram(family_tau(n), "reduced").size
    marked = build_diagram(family_pi(n), "reduced").size
    print(f"n={n}: hyperelliptic {hyp} vertices, marked {marked} vertices")

labeled = build_diagram(family_pi(4), "labeled")
cover = covering(labeled)
print(f"\nmarked n=4: labeled {labeled.size} vertices covering "
      f"{cover.reduced.size} reduced ones (degree {cover.degree})")

# the deck group is generated by the cyclic renumbering of the letters 1..n-1
sigma = Renumbering.sigma_cycle(4)
base = family_pi(4)
print("\nfiber over the base class:")
for e in range(3):
    member = base.relabel(Renumbering.sigma_cycle(4, e))
    idx = labeled.index_of(member)
    print(f"  sigma^{e}: vertex {idx}: {member.to_text()}"
          f"  [{classify_vertex(labeled, idx)}]")

found = detect_symmetric_vertex(build_diagram(family_tau(5), "reduced"))
print(f"\nrow-reversed vertex of the 5-letter hyperelliptic diagram: "
      f"vertex {found.vertex}\n{found.permutation}")

# deterministic DOT export, ready for graphviz
dot = build_diagram(family_tau(4), "labeled").to_dot("hyp4")
print(f"\nDOT export: {dot.count('->')} edges, starts with: {dot.splitlines()[0]}")
