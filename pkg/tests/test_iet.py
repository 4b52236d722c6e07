import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rauzyveech import (
    BoundaryError,
    GeneralizedPermutation,
    Iet,
    LabeledPermutation,
    Renumbering,
    TieError,
    family_genperm_odd,
    family_pi,
    family_tau,
)

TAU4 = LabeledPermutation((0, 2, 3, 4), (4, 3, 2, 0))
PI4 = LabeledPermutation((0, 2, 3, 1, 4), (4, 3, 2, 1, 0))


class TestIrreducible:
    def test_tau4_is_irreducible(self):
        assert TAU4.irreducible()

    def test_identity_is_reducible(self):
        assert not LabeledPermutation((1, 2), (1, 2)).irreducible()

    def test_invariant_prefix_is_reducible(self):
        assert not LabeledPermutation((1, 2, 3), (2, 1, 3)).irreducible()


class TestType:
    def test_bottom_longer_gives_type_b(self):
        T = Iet(TAU4, {0: 3, 2: 1, 3: 1, 4: 2})
        assert T.iet_type() == ("b", 0, 4)

    def test_top_longer_gives_type_t(self):
        T = Iet(TAU4, {0: 2, 2: 1, 3: 1, 4: 3})
        assert T.iet_type() == ("t", 4, 0)

    def test_tie_raises(self):
        T = Iet(TAU4, {0: 2, 2: 1, 3: 1, 4: 2})
        with pytest.raises(TieError):
            T.iet_type()


class TestRauzyMove:
    def test_t_move_on_tau4(self):
        moved, w, l = TAU4.rauzy_move("t")
        assert moved == LabeledPermutation((0, 2, 3, 4), (4, 0, 3, 2))
        assert (w, l) == (4, 0)

    def test_b_move_on_tau4(self):
        moved, w, l = TAU4.rauzy_move("b")
        assert moved == LabeledPermutation((0, 4, 2, 3), (4, 3, 2, 0))
        assert (w, l) == (0, 4)

    def test_t_move_on_pi4(self):
        moved, _, _ = PI4.rauzy_move("t")
        assert moved == LabeledPermutation((0, 2, 3, 1, 4), (4, 0, 3, 2, 1))

    def test_moves_preserve_irreducibility(self):
        frontier = [TAU4, PI4]
        seen = set()
        while frontier:
            p = frontier.pop()
            key = (p.top, p.bottom)
            if key in seen:
                continue
            seen.add(key)
            for eps in "tb":
                q, _, _ = p.rauzy_move(eps)
                assert q.irreducible()
                frontier.append(q)
        assert len(seen) == 7 + 33


def _translation_offsets(perm, lengths):
    """Independent oracle: per-letter offset from explicit start positions."""
    start_top, acc = {}, Fraction(0)
    for c in perm.top:
        start_top[c] = acc
        acc += lengths[c]
    start_bot, acc = {}, Fraction(0)
    for c in perm.bottom:
        start_bot[c] = acc
        acc += lengths[c]
    return {c: start_bot[c] - start_top[c] for c in perm.alphabet}, start_top


class TestApply:
    def test_rotation(self):
        T = Iet(LabeledPermutation((1, 2), (2, 1)), {1: 1, 2: 1})
        assert T.apply(0.25) == 1.25

    def test_identity(self):
        T = Iet(LabeledPermutation((1, 2), (1, 2)), {1: 2, 2: 5})
        for x in (0.5, 1.0, 3.3):
            assert T.apply(x) == x

    def test_tau4_against_offset_oracle(self):
        rng = random.Random(2)
        lengths = {c: Fraction(rng.randint(1, 30), 7) for c in TAU4.alphabet}
        T = Iet(TAU4, lengths)
        offsets, start_top = _translation_offsets(TAU4, lengths)
        for _ in range(300):
            x = Fraction(rng.randint(1, 10**6), 10**6) * T.total_length
            letter = None
            for c in TAU4.top:
                if start_top[c] < x < start_top[c] + lengths[c]:
                    letter = c
                    break
            if letter is None:
                continue
            assert T.apply(x) == x + offsets[letter]

    def test_boundary_raises(self):
        T = Iet(TAU4, {0: 1, 2: 1, 3: 1, 4: 1})
        with pytest.raises(BoundaryError):
            T.apply(1)
        with pytest.raises(BoundaryError):
            T.apply(-Fraction(1, 2))


class TestRauzyStep:
    def test_transvection_rule_shrinks_winner(self):
        T = Iet(TAU4, {0: Fraction(3), 2: Fraction(1), 3: Fraction(1), 4: Fraction(2)})
        stepped = T.rauzy_step()
        # type b: winner 0, loser 4; the winner's length drops by the loser's
        assert stepped.lengths[0] == Fraction(1)
        for c in (2, 3, 4):
            assert stepped.lengths[c] == T.lengths[c]

    def test_total_length_drops_by_loser(self):
        T = Iet(TAU4, {0: Fraction(3), 2: Fraction(1), 3: Fraction(1), 4: Fraction(2)})
        _, _, loser = T.iet_type()
        assert T.rauzy_step().total_length == T.total_length - T.lengths[loser]
        assert T.induced_interval_length() == T.total_length - T.lengths[loser]

    @pytest.mark.parametrize("d", [4, 5, 6])
    def test_first_return_oracle(self, d):
        rng = random.Random(d)
        perm = family_tau(d)
        for _ in range(5):
            lengths = {c: Fraction(rng.randint(1, 997), 997) for c in perm.alphabet}
            T = Iet(perm, lengths)
            try:
                stepped = T.rauzy_step()
            except TieError:
                continue
            limit = T.induced_interval_length()
            for j in range(200):
                x = limit * Fraction(2 * j + 1, 400)
                try:
                    assert stepped.apply(x) == T.first_return(x)
                except BoundaryError:
                    pass


class TestFamilies:
    def test_tau4_table(self):
        assert family_tau(4).to_text() == "0 2 3 4 / 4 3 2 0"

    def test_pi4_table(self):
        assert family_pi(4).to_text() == "0 2 3 1 4 / 4 3 2 1 0"

    def test_genperm_g3_table(self):
        assert family_genperm_odd(3).to_text() == "1 2 2 3 3 4 4 / 5 6 6 7 7 5 1"

    def test_alphabet_sizes(self):
        assert family_tau(7).d == 7
        assert family_pi(7).d == 8
        assert len(family_genperm_odd(5).alphabet) == 11

    def test_range_errors(self):
        with pytest.raises(ValueError):
            family_tau(1)
        with pytest.raises(ValueError):
            family_genperm_odd(2)


class TestGeneralizedPermutation:
    def test_double_occurrence_enforced(self):
        with pytest.raises(ValueError):
            GeneralizedPermutation((1, 2, 2), (3, 3, 3, 1))

    def test_move_keeps_double_occurrence(self):
        g = family_genperm_odd(3)
        for eps in "tbtbtb":
            g, _, _ = g.rauzy_move(eps)  # constructor re-validates
        assert sorted(g.top + g.bottom) == sorted(family_genperm_odd(3).top + family_genperm_odd(3).bottom)


class TestReduce:
    def test_order_two_swap(self):
        assert LabeledPermutation((1, 2), (2, 1)).reduce().perm == (2, 1)

    def test_figure3_glued_pairs(self):
        # the two transition tables printed with the same letter label
        c = LabeledPermutation((0, 2, 4, 3, 1), (4, 1, 0, 3, 2))
        a = LabeledPermutation((0, 1, 4, 2, 3), (4, 3, 0, 2, 1))
        assert c.reduce() == a.reduce()
        b = LabeledPermutation((0, 2, 3, 4, 1), (4, 2, 1, 0, 3))
        d = LabeledPermutation((0, 3, 1, 4, 2), (4, 3, 2, 0, 1))
        assert b.reduce() == d.reduce()

    @settings(max_examples=60, deadline=None)
    @given(st.permutations(list(range(5))), st.permutations(list(range(5))))
    def test_reduce_kills_renumbering(self, images, perm_bottom):
        top = tuple(range(5))
        try:
            perm = LabeledPermutation(top, tuple(perm_bottom))
        except ValueError:
            return
        rho = Renumbering(dict(zip(range(5), images)))
        assert perm.relabel(rho).reduce() == perm.reduce()

    def test_canonical_labeled_roundtrip(self):
        red = TAU4.reduce()
        assert red.canonical_labeled().reduce() == red


class TestSerialization:
    def test_text_roundtrip(self):
        assert LabeledPermutation.from_text(TAU4.to_text()) == TAU4

    def test_json_roundtrip(self):
        assert LabeledPermutation.from_json(PI4.to_json()) == PI4
        assert json.loads(PI4.to_json()) == {"top": [0, 2, 3, 1, 4], "bottom": [4, 3, 2, 1, 0]}

    def test_str_is_two_rows(self):
        assert str(TAU4) == "0 2 3 4\n4 3 2 0"


class TestRenumbering:
    def test_sigma_cycle_order(self):
        sigma = Renumbering.sigma_cycle(5)
        assert sigma.order() == 4
        assert sigma(4) == 1 and sigma(0) == 0 and sigma(5) == 5

    def test_inverse_and_compose(self):
        sigma = Renumbering.sigma_cycle(4)
        ident = sigma.compose(sigma.inverse())
        assert all(ident(c) == c for c in (0, 1, 2, 3, 4))
