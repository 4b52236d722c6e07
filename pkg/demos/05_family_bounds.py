"""The closed-form families and their dilatation windows.

Three families of explicit induction paths produce pseudo-Anosov maps whose
dilatations are roots of sparse integer polynomials:

  A1  one zero       (X+1) chi = X^(2g+1) - 2X^(2g-1) - 2X^2 + 1
  A2  two zeroes     windows shrinking like 4 / sqrt(2)^g
  B   sphere family  chi = (X-1)(X^(2g) - X^(2g-1) - 4X^g - X + 1)

The A families pin the sharp sqrt(2) window; the B family shows dilatations
sliding to 1 once the involution is allowed to fix both zeroes.
"""

import math

from rauzyveech import FamilySpec, run_family_suite, spin_parity, verify_bounds

print("one-zero family: distance of the dilatation above sqrt(2)")
for g in range(2, 11):
    report = verify_bounds(FamilySpec("A1", g))
    gap = report.theta.value - math.sqrt(2)
    print(f"  g={g:2d}: theta = {report.theta.value:.12f}"
          f"   theta - sqrt2 = {gap:.3e} < 2^(1-g) = {2.0 ** (1 - g):.3e}"
          f"   [{'certified' if report.passed else 'FAILED'}]")

print("\nsphere family: dilatations decreasing toward 1")
payload = run_family_suite("B", range(3, 20, 2))
for case in payload["cases"]:
    print(f"  g={case['g']:2d}: theta = {case['bounds']['theta']:.9f}")
print(f"  strictly decreasing: {payload['strictly_decreasing']}")

print("\nspin parity of the sphere family's orientation cover (always odd):")
for g in (3, 5, 7, 9):
    orders = [g - 2, g - 2] + [-1] * (2 * g)
    print(f"  g={g}: orders two of {g - 2} plus {2 * g} poles -> parity {spin_parity(orders)}")
