"""From a primitive loop to a verified pseudo-Anosov certificate.

The eigen-data of a primitive loop matrix suspends the base table into a
polygon surface; iterating the induction along the loop contracts lengths by
the dilatation and expands heights by it, returning to the start after a
renumbering.  The certificate records all residuals of that round trip.
"""

import pathlib

from rauzyveech import (
    SuspensionDatum,
    build_diagram,
    build_polygon,
    enumerate_closed_loops,
    family_pi,
    path_matrix,
    veech_pa_from_loop,
)

diagram = build_diagram(family_pi(4), "reduced")
loop = next(
    l for l in enumerate_closed_loops(diagram, 6)
    if path_matrix(l, want_perron=False).primitive
)
cert = veech_pa_from_loop(loop)

print(f"loop: base {loop.base}, moves {loop.moves}")
print(f"dilatation: {cert.dilatation.value}")
print(f"fixed separatrix kind: {cert.fixed_separatrix}")
print(f"suspension margin: {cert.suspension_margin:.4f}")
print(f"eigen residuals: {cert.eigen_residuals}")
print(f"orbit residual after the full loop: {cert.orbit_residual:.2e}")

# draw the suspension polygon; paired sides share a color
alphabet = cert.permutation.alphabet
datum = SuspensionDatum(
    cert.permutation, dict(zip(alphabet, cert.lam)), dict(zip(alphabet, cert.tau))
)
polygon = build_polygon(datum.permutation, datum.lam, datum.tau)
out = pathlib.Path("suspension_polygon.svg")
out.write_text(polygon.to_svg())
print(f"\npolygon area {abs(float(polygon.area())):.4f}, SVG written to {out}")
