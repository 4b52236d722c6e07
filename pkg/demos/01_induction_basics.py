"""Interval exchanges and the two induction moves.

A labeled permutation is printed as a two-row table: the top row lists the
subintervals left to right before the exchange, the bottom row after.  One
induction step compares the two rightmost intervals, the longer one wins,
and the loser's letter is reinserted next to the winner in the other row.
"""

from fractions import Fraction

from rauzyveech import Iet, family_tau

perm = family_tau(4)
print("the 4-letter base table of the hyperelliptic family:")
print(perm, "\n")

for eps in "tb":
    moved, winner, loser = perm.rauzy_move(eps)
    print(f"move {eps}: winner {winner}, loser {loser}")
    print(moved, "\n")

# attach exact lengths and run the dynamics
lengths = {0: Fraction(5, 7), 2: Fraction(2, 7), 3: Fraction(3, 7), 4: Fraction(4, 7)}
iet = Iet(perm, lengths)
eps, winner, loser = iet.iet_type()
print(f"with lengths {dict(lengths)} the step has type {eps} "
      f"(winner {winner}, loser {loser})")

stepped = iet.rauzy_step()
print("after one step the winner's length shrinks by the loser's:")
print({c: str(v) for c, v in stepped.lengths.items()})

# the combinatorial step really is the first-return map to the shorter interval
x = Fraction(9, 100)
print(f"\nfirst return of {x}: {iet.first_return(x)}")
print(f"stepped IET at {x}:  {stepped.apply(x)}")
assert stepped.apply(x) == iet.first_return(x)
print("the two agree exactly (rational arithmetic).")
