import random
from fractions import Fraction

import pytest

from rauzyveech import (
    IntMatrix,
    LabeledPermutation,
    Loop,
    LoopBudgetExceeded,
    OpenPathError,
    RauzyPath,
    build_diagram,
    enumerate_closed_loops,
    family_pi,
    family_tau,
    lift_path,
    path_matrix,
    systole_search,
)
from rauzyveech.paths import (
    check_all_losers_lifts,
    check_step_propagation,
    check_winner_persistence,
    compare_perron_roots,
)
from rauzyveech.families import single_zero_table
from rauzyveech.suspensions import reversed_companion


@pytest.fixture(scope="module")
def tau4():
    return build_diagram(family_tau(4), "labeled")


@pytest.fixture(scope="module")
def pi4_reduced():
    return build_diagram(family_pi(4), "reduced")


@pytest.fixture(scope="module")
def pi4_labeled():
    return build_diagram(family_pi(4), "labeled")


class TestRauzyPath:
    def test_empty_path_is_identity(self):
        path = RauzyPath.from_moves(family_tau(4), "")
        assert path.transition_matrix() == IntMatrix.identity(4)
        assert path.closed

    def test_column_rule_equals_transvection_product(self):
        rng = random.Random(5)
        for _ in range(25):
            moves = "".join(rng.choice("tb") for _ in range(rng.randint(1, 12)))
            path = RauzyPath.from_moves(family_pi(4), moves)
            assert path.transition_matrix() == path.transvection_product()

    def test_appendix_path_matrix(self):
        # g = 2: b, b, t from the reversed companion table
        start = reversed_companion(single_zero_table(2))
        path = RauzyPath.from_moves(start, "bbt")
        assert list(zip(path.winners, path.losers)) == [(1, 4), (1, 2), (4, 1)]
        assert path.transition_matrix() == IntMatrix.from_rows(
            [[2, 1, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0], [1, 0, 0, 1]]
        )

    def test_path_matrix_determinant_is_unimodular(self):
        rng = random.Random(9)
        for _ in range(20):
            moves = "".join(rng.choice("tb") for _ in range(rng.randint(1, 10)))
            path = RauzyPath.from_moves(family_tau(5), moves)
            assert path.transition_matrix().det() == 1


class TestLoops:
    def test_extreme_self_loops(self, tau4):
        loops = enumerate_closed_loops(tau4, 2)
        ones = {(l.base, l.moves) for l in loops if l.length == 1}
        extreme_t = family_tau(4)
        for _ in range(2):
            extreme_t, _, _ = extreme_t.rauzy_move("t")
        extreme_b = family_tau(4)
        for _ in range(2):
            extreme_b, _, _ = extreme_b.rauzy_move("b")
        assert (tau4.index_of(extreme_t), "b") in ones
        assert (tau4.index_of(extreme_b), "t") in ones
        for loop in loops:
            if loop.length == 1:
                assert not path_matrix(loop, want_perron=False).primitive

    def test_loop_must_close(self, tau4):
        with pytest.raises(OpenPathError):
            Loop(tau4, 0, "t")

    def test_count_matches_trace_power_oracle(self, tau4):
        # closed walks of length L counted by tr(A^L) must equal the sum of
        # primitive periods over deduplicated loops of that length
        d = tau4.size
        adj = [[0] * d for _ in range(d)]
        for i in range(d):
            for _, e in tau4.out_edges(i):
                adj[i][e.target] += 1
        loops = enumerate_closed_loops(tau4, 8)
        by_len = {}
        for loop in loops:
            by_len[loop.length] = by_len.get(loop.length, 0) + loop.primitive_period()
        power = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
        for L in range(1, 9):
            power = [
                [sum(power[i][k] * adj[k][j] for k in range(d)) for j in range(d)]
                for i in range(d)
            ]
            trace = sum(power[i][i] for i in range(d))
            assert by_len.get(L, 0) == trace, L

    def test_budget(self, tau4):
        with pytest.raises(LoopBudgetExceeded):
            enumerate_closed_loops(tau4, 8, budget=10)

    def test_rotations_share_charpoly(self, pi4_reduced):
        loops = [l for l in enumerate_closed_loops(pi4_reduced, 6) if l.length >= 2]
        rng = random.Random(3)
        for loop in rng.sample(loops, min(12, len(loops))):
            chi = path_matrix(loop, want_perron=False).charpoly
            for rotated in loop.rotations():
                assert path_matrix(rotated, want_perron=False).charpoly == chi

    def test_primitivity_criterion_on_labeled_loops(self, tau4):
        full = frozenset(family_tau(4).alphabet)
        for loop in enumerate_closed_loops(tau4, 7):
            report = path_matrix(loop, want_perron=False)
            assert report.primitive == (loop.winner_letters() == full)


class TestLift:
    def test_tau_loops_lift_closed(self, tau4):
        for loop in enumerate_closed_loops(tau4, 6):
            start = tau4.vertices[loop.base]
            lifted = RauzyPath.from_moves(start, loop.moves)
            assert lifted.closed

    def test_remark_loop(self, pi4_reduced):
        # the printed example: letter 3 untouched, yet the reduced loop is
        # closed and primitive, and the rotated lift has every letter losing
        start = LabeledPermutation((1, 3, 0, 2, 4), (4, 3, 2, 1, 0))
        path = RauzyPath.from_moves(start, "btbttt")
        assert 3 not in path.winner_letters() | path.loser_letters()
        assert path.end.reduce() == path.start.reduce()
        base_vertex = pi4_reduced.index_of(start)
        assert base_vertex is not None
        loop = Loop(pi4_reduced, base_vertex, "btbttt")
        assert path_matrix(loop, want_perron=False).primitive
        other_base = LabeledPermutation((1, 2, 3, 0, 4), (4, 3, 2, 0, 1))
        lifted = lift_path(pi4_reduced, loop, other_base)
        assert lifted.moves == "tttbtb"
        assert lifted.loser_letters() == frozenset({0, 1, 2, 3, 4})

    def test_power_of_deck_order_closes(self, pi4_reduced):
        loops = enumerate_closed_loops(pi4_reduced, 6)
        checked = 0
        for loop in loops:
            start = pi4_reduced.vertices[loop.base]
            lifted = RauzyPath.from_moves(start, loop.moves)
            rho = lifted.end_renumbering()
            if rho is None:
                continue
            k = rho.order()
            assert RauzyPath.from_moves(start, loop.moves * k).closed
            if k > 1:
                assert not lifted.closed
                checked += 1
        assert checked > 0


class TestStructuralLemmas:
    def test_winner_persistence_tau4(self, tau4):
        for loop in enumerate_closed_loops(tau4, 8):
            assert check_winner_persistence(loop).ok, loop.moves

    def test_combined_checker_dispatches(self, tau4, pi4_reduced, pi4_labeled):
        from rauzyveech import check_structural_lemmas, enumerate_primitive_loops

        for loop, primitive in enumerate_primitive_loops(tau4, 6):
            assert check_structural_lemmas(loop).ok
        for loop, primitive in enumerate_primitive_loops(pi4_reduced, 6):
            assert check_structural_lemmas(loop, pi4_labeled).ok
        some = next(iter(enumerate_closed_loops(pi4_labeled, 6)))
        assert check_structural_lemmas(some).ok
        with pytest.raises(ValueError):
            check_structural_lemmas(
                next(iter(enumerate_closed_loops(pi4_reduced, 4)))
            )

    def test_all_losers_on_small_primitive_loops(self, pi4_reduced, pi4_labeled):
        found = 0
        for loop in enumerate_closed_loops(pi4_reduced, 7):
            if not path_matrix(loop, want_perron=False).primitive:
                continue
            found += 1
            assert check_all_losers_lifts(loop, pi4_labeled).ok, loop.moves
        assert found > 0

    def test_step_propagation_small(self, pi4_labeled):
        for loop in enumerate_closed_loops(pi4_labeled, 8):
            assert check_step_propagation(loop, 4).ok, (loop.base, loop.moves)


class TestSystole:
    def test_floor_two_tau4(self, tau4):
        result = systole_search(tau4, 10)
        assert result.minimum.lo >= 2 - Fraction(1, 10**9)

    def test_floor_two_marked(self, pi4_reduced):
        result = systole_search(pi4_reduced, 10)
        assert result.minimum.lo >= 2 - Fraction(1, 10**9)

    def test_monotone_in_max_len(self, pi4_reduced):
        shorter = systole_search(pi4_reduced, 7)
        longer = systole_search(pi4_reduced, 9)
        assert compare_perron_roots(longer.minimum, shorter.minimum) <= 0

    def test_deterministic_witness(self, tau4):
        a = systole_search(tau4, 9)
        b = systole_search(tau4, 9)
        assert (a.witness.base, a.witness.moves) == (b.witness.base, b.witness.moves)


class TestUnimodularCocycle:
    def test_closed_loop_matrices_unimodular(self, pi4_reduced):
        for loop in enumerate_closed_loops(pi4_reduced, 6):
            report = path_matrix(loop, want_perron=False, verify_cocycle=True)
            assert report.v.det() in (1, -1)
            assert report.v == report.vhat @ report.p_matrix


class TestReciprocalSpectrum:
    def test_inverse_root_shares_minimal_factor(self, pi4_reduced):
        # 1/theta is an eigenvalue too: the reversed charpoly and the charpoly
        # share the factor carrying the Perron root, checked by exact gcd
        found = 0
        for loop in enumerate_closed_loops(pi4_reduced, 7):
            report = path_matrix(loop)
            if not report.primitive:
                continue
            found += 1
            chi = report.charpoly
            rev = chi.reversed_coeffs()
            g = chi.squarefree_part().gcd(rev.squarefree_part())
            assert g.degree >= 1
            root = report.perron
            assert g(root.lo) * g(root.hi) < 0  # the shared factor holds theta
        assert found > 0


class TestLoopReportJson:
    def test_schema(self, pi4_reduced):
        loop = next(
            l
            for l in enumerate_closed_loops(pi4_reduced, 6)
            if path_matrix(l, want_perron=False).primitive
        )
        obj = path_matrix(loop).to_json_obj()
        assert set(obj) == {"loop", "vhat", "p", "v", "charpoly", "primitive", "perron"}
        assert obj["loop"] == {"base": loop.base, "moves": loop.moves}
        assert obj["primitive"] is True and obj["perron"] is not None
