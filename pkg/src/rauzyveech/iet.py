"""Permutations and interval exchange primitives.

A labeled permutation is a pair of bijections (pi_t, pi_b) from a finite
alphabet of letters onto positions 1..d.  We store it as the printed two-row
table: ``top[j]`` is the letter of the j-th subinterval before the exchange,
``bottom[j]`` the letter of the j-th subinterval after.  Letters are small
nonnegative integers; the alphabet is the sorted letter set.

The two combinatorial induction moves act on tables as follows.  For the move
of type ``t`` the bottom-last letter (the loser) is removed from the end of
the bottom row and reinserted immediately after the position of the top-last
letter (the winner) in the bottom row; type ``b`` is the mirror statement with
the rows exchanged.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import BoundaryError, IrreducibleError, TieError

Move = str  # 't' or 'b'

MOVES: tuple[Move, Move] = ("t", "b")


def other_move(eps: Move) -> Move:
    return "b" if eps == "t" else "t"


class Letter(NamedTuple):
    """A letter of the alphabet: numeric id plus display text."""

    id: int
    display: str


def _check_rows(top: Sequence[int], bottom: Sequence[int]) -> None:
    if len(top) < 2:
        raise ValueError("alphabet must have at least 2 letters")
    if len(set(top)) != len(top) or len(set(bottom)) != len(bottom):
        raise ValueError("rows must not repeat letters")
    if set(top) != set(bottom):
        raise ValueError("top and bottom must use the same alphabet")


@dataclass(frozen=True, slots=True)
class LabeledPermutation:
    """Two-row table of a labeled permutation.

    >>> p = LabeledPermutation((0, 2, 3, 4), (4, 3, 2, 0))
    >>> print(p)
    0 2 3 4
    4 3 2 0
    """

    top: tuple[int, ...]
    bottom: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "top", tuple(self.top))
        object.__setattr__(self, "bottom", tuple(self.bottom))
        _check_rows(self.top, self.bottom)

    @property
    def d(self) -> int:
        return len(self.top)

    @property
    def alphabet(self) -> tuple[int, ...]:
        """Letters in their canonical (sorted) order; matrix indices follow it."""
        return tuple(sorted(self.top))

    def letters(self) -> tuple[Letter, ...]:
        return tuple(Letter(c, str(c)) for c in self.alphabet)

    def top_position(self, letter: int) -> int:
        """pi_t(letter), 1-based."""
        return self.top.index(letter) + 1

    def bottom_position(self, letter: int) -> int:
        """pi_b(letter), 1-based."""
        return self.bottom.index(letter) + 1

    def irreducible(self) -> bool:
        """No common proper prefix letter set in the two rows."""
        seen_t: set[int] = set()
        seen_b: set[int] = set()
        for j in range(self.d - 1):
            seen_t.add(self.top[j])
            seen_b.add(self.bottom[j])
            if seen_t == seen_b:
                return False
        return True

    def reduce(self) -> "ReducedPermutation":
        """Forget letter names: the position permutation pi_b . pi_t^{-1}."""
        pos_b = {c: j + 1 for j, c in enumerate(self.bottom)}
        return ReducedPermutation(tuple(pos_b[c] for c in self.top))

    def rauzy_move(self, eps: Move) -> tuple["LabeledPermutation", int, int]:
        """Apply one combinatorial move; return (new permutation, winner, loser)."""
        if not self.irreducible():
            raise IrreducibleError(f"reducible permutation: {self!r}")
        if eps == "t":
            winner, loser = self.top[-1], self.bottom[-1]
            k = self.bottom.index(winner) + 1
            new_bottom = self.bottom[:k] + (loser,) + self.bottom[k:-1]
            return LabeledPermutation(self.top, new_bottom), winner, loser
        if eps == "b":
            winner, loser = self.bottom[-1], self.top[-1]
            k = self.top.index(winner) + 1
            new_top = self.top[:k] + (loser,) + self.top[k:-1]
            return LabeledPermutation(new_top, self.bottom), winner, loser
        raise ValueError(f"unknown move {eps!r}")

    def relabel(self, renumbering: "Renumbering") -> "LabeledPermutation":
        """Replace every letter c by renumbering(c)."""
        m = renumbering.mapping
        return LabeledPermutation(
            tuple(m[c] for c in self.top), tuple(m[c] for c in self.bottom)
        )

    # -- text / JSON round trip (external interface) --

    def to_text(self) -> str:
        """One-line form: rows separated by '/', letters space-separated."""
        return "{} / {}".format(
            " ".join(str(c) for c in self.top), " ".join(str(c) for c in self.bottom)
        )

    @classmethod
    def from_text(cls, text: str) -> "LabeledPermutation":
        rows = text.split("/")
        if len(rows) != 2:
            raise ValueError("expected 'top / bottom'")
        return cls(
            tuple(int(c) for c in rows[0].split()),
            tuple(int(c) for c in rows[1].split()),
        )

    def to_json(self) -> str:
        return json.dumps({"top": list(self.top), "bottom": list(self.bottom)})

    @classmethod
    def from_json(cls, payload: str) -> "LabeledPermutation":
        data = json.loads(payload)
        return cls(tuple(data["top"]), tuple(data["bottom"]))

    def __str__(self) -> str:
        return "{}\n{}".format(
            " ".join(str(c) for c in self.top), " ".join(str(c) for c in self.bottom)
        )


@dataclass(frozen=True, slots=True)
class ReducedPermutation:
    """A permutation of positions 1..d (bottom . top^{-1} of any labeled form)."""

    perm: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "perm", tuple(self.perm))
        if sorted(self.perm) != list(range(1, len(self.perm) + 1)):
            raise ValueError(f"not a permutation of 1..d: {self.perm}")

    @property
    def d(self) -> int:
        return len(self.perm)

    def canonical_labeled(self) -> LabeledPermutation:
        """The representative with top row 1..d (the usual way of writing it)."""
        inverse = [0] * self.d
        for j, v in enumerate(self.perm):
            inverse[v - 1] = j + 1
        return LabeledPermutation(tuple(range(1, self.d + 1)), tuple(inverse))

    def irreducible(self) -> bool:
        return self.canonical_labeled().irreducible()

    def rauzy_move(self, eps: Move) -> "ReducedPermutation":
        moved, _, _ = self.canonical_labeled().rauzy_move(eps)
        return moved.reduce()

    def __str__(self) -> str:
        return str(self.canonical_labeled())


@dataclass(frozen=True, slots=True)
class Renumbering:
    """A relabeling bijection between alphabets (usually onto itself)."""

    mapping: Mapping[int, int]

    def __post_init__(self) -> None:
        m = dict(self.mapping)
        if len(set(m.values())) != len(m):
            raise ValueError("renumbering must be injective")
        object.__setattr__(self, "mapping", m)

    def __call__(self, letter: int) -> int:
        return self.mapping[letter]

    def inverse(self) -> "Renumbering":
        return Renumbering({v: k for k, v in self.mapping.items()})

    def compose(self, other: "Renumbering") -> "Renumbering":
        """self after other: letter -> self(other(letter))."""
        return Renumbering({k: self.mapping[v] for k, v in other.mapping.items()})

    def order(self) -> int:
        """lcm of the cycle lengths (self-maps of one alphabet only)."""
        if set(self.mapping) != set(self.mapping.values()):
            raise ValueError("order is defined for self-maps of one alphabet")
        import math

        seen: set[int] = set()
        result = 1
        for start in self.mapping:
            if start in seen:
                continue
            length = 0
            c = start
            while c not in seen:
                seen.add(c)
                c = self.mapping[c]
                length += 1
            result = math.lcm(result, length)
        return result

    @classmethod
    def identity(cls, alphabet: Iterable[int]) -> "Renumbering":
        return cls({c: c for c in alphabet})

    @classmethod
    def sigma_cycle(cls, n: int, power: int = 1) -> "Renumbering":
        """Power of the deck generator of the marked family: the cycle on
        letters 1..n-1 (letters 0 and n stay fixed)."""
        m = {0: 0, n: n}
        for c in range(1, n):
            m[c] = (c - 1 + power) % (n - 1) + 1
        return cls(m)


def find_renumbering(
    source: LabeledPermutation, target: LabeledPermutation
) -> Renumbering | None:
    """The letter map r with relabel(source, r) == target, if one exists."""
    if source.d != target.d:
        return None
    m: dict[int, int] = {}
    for row_s, row_t in ((source.top, target.top), (source.bottom, target.bottom)):
        for a, b in zip(row_s, row_t):
            if m.setdefault(a, b) != b:
                return None
    return Renumbering(m)


# ---------------------------------------------------------------------------
# the table families used throughout
# ---------------------------------------------------------------------------


def family_tau(n: int) -> LabeledPermutation:
    """Base table of the hyperelliptic diagram, on the n letters {0, 2, ..., n}.

    >>> family_tau(4).to_text()
    '0 2 3 4 / 4 3 2 0'
    """
    if n < 2:
        raise ValueError("family_tau requires n >= 2")
    top = (0,) + tuple(range(2, n + 1))
    bottom = (n,) + tuple(range(n - 1, 1, -1)) + (0,)
    return LabeledPermutation(top, bottom)


def family_pi(n: int) -> LabeledPermutation:
    """Base table of the marked (regular-point) family, on letters {0, ..., n}.

    >>> family_pi(4).to_text()
    '0 2 3 1 4 / 4 3 2 1 0'
    """
    if n < 2:
        raise ValueError("family_pi requires n >= 2")
    top = (0,) + tuple(range(2, n)) + (1, n)
    bottom = (n,) + tuple(range(n - 1, 0, -1)) + (0,)
    return LabeledPermutation(top, bottom)


@dataclass(frozen=True, slots=True)
class GeneralizedPermutation:
    """Two rows of letters in which every letter occurs exactly twice.

    Rows may have different lengths.  Only the combinatorial induction moves
    needed for the explicit sphere family are implemented.
    """

    top: tuple[int, ...]
    bottom: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "top", tuple(self.top))
        object.__setattr__(self, "bottom", tuple(self.bottom))
        counts: dict[int, int] = {}
        for c in self.top + self.bottom:
            counts[c] = counts.get(c, 0) + 1
        bad = {c: k for c, k in counts.items() if k != 2}
        if bad:
            raise ValueError(f"letters must occur exactly twice; offenders: {bad}")

    @property
    def alphabet(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.top) | set(self.bottom)))

    def rows(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.top, self.bottom

    def rauzy_move(self, eps: Move) -> tuple["GeneralizedPermutation", int, int]:
        """One induction move: the loser leaves the end of its row and is
        reinserted next to the twin occurrence of the winner (before the twin
        when the twin lies in the winner's own row, after it otherwise)."""
        rows = [list(self.top), list(self.bottom)]
        wr = 0 if eps == "t" else 1
        lr = 1 - wr
        if not rows[wr] or not rows[lr]:
            raise ValueError("both rows must be nonempty")
        winner = rows[wr][-1]
        loser = rows[lr][-1]
        if winner == loser:
            raise ValueError("winner and loser coincide; move undefined")
        rows[lr].pop()
        twins = [
            (r, i)
            for r in (0, 1)
            for i, c in enumerate(rows[r])
            if c == winner and not (r == wr and i == len(rows[r]) - 1)
        ]
        if len(twins) != 1:
            raise ValueError(f"winner {winner} does not have a unique twin")
        tr, ti = twins[0]
        if tr == wr:
            rows[tr].insert(ti, loser)
        else:
            rows[tr].insert(ti + 1, loser)
        return GeneralizedPermutation(tuple(rows[0]), tuple(rows[1])), winner, loser

    def to_text(self) -> str:
        return "{} / {}".format(
            " ".join(str(c) for c in self.top), " ".join(str(c) for c in self.bottom)
        )


def family_genperm_odd(g: int) -> GeneralizedPermutation:
    """The sphere generalized permutation on 2g+1 letters behind the
    non-hyperelliptic odd-component examples.

    >>> family_genperm_odd(3).to_text()
    '1 2 2 3 3 4 4 / 5 6 6 7 7 5 1'
    """
    if g < 3:
        raise ValueError("family_genperm_odd requires g >= 3")
    top = (1,) + tuple(x for c in range(2, g + 2) for x in (c, c))
    bottom = (
        (g + 2,)
        + tuple(x for c in range(g + 3, 2 * g + 2) for x in (c, c))
        + (g + 2, 1)
    )
    return GeneralizedPermutation(top, bottom)


# ---------------------------------------------------------------------------
# interval exchange transformations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Iet:
    """An interval exchange: a labeled permutation plus positive lengths.

    Lengths may be exact (int / Fraction) or floating point; arithmetic stays
    in whatever type was supplied.
    """

    permutation: LabeledPermutation
    lengths: Mapping[int, object]

    def __post_init__(self) -> None:
        lengths = dict(self.lengths)
        if set(lengths) != set(self.permutation.alphabet):
            raise ValueError("lengths must be keyed by the alphabet")
        if any(not v > 0 for v in lengths.values()):
            raise ValueError("lengths must be strictly positive")
        object.__setattr__(self, "lengths", lengths)

    @property
    def total_length(self):
        return sum(self.lengths.values())

    def _starts(self, row: Sequence[int]):
        starts = {}
        acc = 0
        for c in row:
            starts[c] = acc
            acc = acc + self.lengths[c]
        return starts

    def iet_type(self) -> tuple[Move, int, int]:
        """Type of the induction step: ('t'|'b', winner, loser).

        Raises TieError when the two rightmost lengths are equal.
        """
        tl = self.permutation.top[-1]
        bl = self.permutation.bottom[-1]
        if self.lengths[tl] == self.lengths[bl]:
            raise TieError(f"equal rightmost lengths for letters {tl} and {bl}")
        if self.lengths[tl] > self.lengths[bl]:
            return "t", tl, bl
        return "b", bl, tl

    def apply(self, x):
        """Image of the point x under the exchange."""
        if x < 0 or x >= self.total_length:
            raise BoundaryError(f"{x} outside [0, {self.total_length})")
        starts_t = self._starts(self.permutation.top)
        starts_b = self._starts(self.permutation.bottom)
        for c in self.permutation.top:
            s = starts_t[c]
            if x == s:
                raise BoundaryError(f"{x} is a subinterval endpoint")
            if x < s + self.lengths[c]:
                return x - s + starts_b[c]
        raise BoundaryError(f"{x} is a subinterval endpoint")

    def rauzy_step(self) -> "Iet":
        """One step of the induction: (R_eps(pi), lambda') with the winner's
        length shortened by the loser's (the transvection rule)."""
        eps, winner, loser = self.iet_type()
        new_perm, w, l = self.permutation.rauzy_move(eps)
        assert (w, l) == (winner, loser)
        new_lengths = dict(self.lengths)
        new_lengths[winner] = new_lengths[winner] - new_lengths[loser]
        return Iet(new_perm, new_lengths)

    def induced_interval_length(self):
        """|J| of the next induction step: the total length minus the loser's."""
        _, _, loser = self.iet_type()
        return self.total_length - self.lengths[loser]

    def first_return(self, x, max_iter: int = 64):
        """Direct first-return map to the induction subinterval J.

        This is the dynamical oracle for :meth:`rauzy_step`: iterate the raw
        exchange until the orbit re-enters J = [0, |J|).
        """
        limit = self.induced_interval_length()
        if x < 0 or x >= limit:
            raise BoundaryError(f"{x} outside J = [0, {limit})")
        y = self.apply(x)
        for _ in range(max_iter):
            if y < limit:
                return y
            y = self.apply(y)
        raise RuntimeError("first return did not occur (unexpected)")
