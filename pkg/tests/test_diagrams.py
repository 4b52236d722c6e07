import json

import pytest

from rauzyveech import (
    DiagramTooLarge,
    LabeledPermutation,
    Renumbering,
    build_diagram,
    classify_vertex,
    covering,
    detect_symmetric_vertex,
    family_pi,
    family_tau,
    verify_added_permutations,
    verify_rauzy_recursion,
)
from rauzyveech.diagrams import RauzyDiagram, Edge, deck_is_automorphism

# Figure-1 tables: five printed tables plus the two branch-end vertices with
# self-loops; those two are forced by the move rules (the tables extracted at
# their positions are reducible, hence cannot be diagram vertices).
FIGURE1 = {
    ((0, 2, 3, 4), (4, 3, 2, 0)),
    ((0, 2, 3, 4), (4, 0, 3, 2)),
    ((0, 2, 3, 4), (4, 2, 0, 3)),
    ((0, 4, 2, 3), (4, 3, 0, 2)),
    ((0, 3, 4, 2), (4, 3, 2, 0)),
    ((0, 2, 4, 3), (4, 0, 3, 2)),
    ((0, 4, 2, 3), (4, 3, 2, 0)),
}


class TestBuild:
    def test_tau4_reduced_size(self):
        assert build_diagram(family_tau(4), "reduced").size == 7

    def test_tau4_edge_count(self):
        d = build_diagram(family_tau(4), "labeled")
        assert sum(1 for i in range(d.size) for _ in d.out_edges(i)) == 14

    def test_pi4_sizes(self):
        assert build_diagram(family_pi(4), "reduced").size == 11
        assert build_diagram(family_pi(4), "labeled").size == 33

    @pytest.mark.parametrize("n", range(4, 11))
    def test_tau_cardinality(self, n):
        assert build_diagram(family_tau(n), "reduced").size == 2 ** (n - 1) - 1

    @pytest.mark.parametrize("n", range(4, 9))
    def test_pi_cardinalities(self, n):
        expected = 2 ** (n - 1) - 1 + n
        assert build_diagram(family_pi(n), "reduced").size == expected
        assert build_diagram(family_pi(n), "labeled").size == expected * (n - 1)

    def test_figure1_vertices(self):
        d = build_diagram(family_tau(4), "labeled")
        assert {(v.top, v.bottom) for v in d.vertices} == FIGURE1

    def test_every_vertex_irreducible_outdegree_two(self):
        d = build_diagram(family_pi(5), "labeled")
        for i, v in enumerate(d.vertices):
            assert v.irreducible()
            assert len(list(d.out_edges(i))) == 2

    def test_budget(self):
        with pytest.raises(DiagramTooLarge):
            build_diagram(family_tau(10), "reduced", vertex_budget=16)

    def test_deterministic_numbering(self):
        a = build_diagram(family_pi(4), "labeled")
        b = build_diagram(family_pi(4), "labeled")
        assert [v.to_text() for v in a.vertices] == [v.to_text() for v in b.vertices]


class TestCovering:
    def test_fiber_sizes_pi4(self):
        cover = covering(build_diagram(family_pi(4), "labeled"))
        for r in range(cover.reduced.size):
            assert len(cover.fiber(r)) == 3

    @pytest.mark.parametrize("n", range(4, 9))
    def test_tau_covering_is_bijection(self, n):
        cover = covering(build_diagram(family_tau(n), "labeled"))
        assert cover.is_bijective()

    def test_deck_group_is_sigma_powers(self):
        labeled = build_diagram(family_pi(4), "labeled")
        cover = covering(labeled)
        assert len(cover.deck) == 3
        sigma = Renumbering.sigma_cycle(4)
        assert deck_is_automorphism(labeled, sigma)
        # composing the projection with a deck map leaves it unchanged
        for i, v in enumerate(labeled.vertices):
            j = labeled.index_of(v.relabel(sigma))
            assert cover.vertex_map[i] == cover.vertex_map[j]

    def test_central_fiber_is_sigma_orbit(self):
        labeled = build_diagram(family_pi(5), "labeled")
        base = family_pi(5)
        orbit = {
            labeled.index_of(base.relabel(Renumbering.sigma_cycle(5, e)))
            for e in range(4)
        }
        fiber = {
            i
            for i, v in enumerate(labeled.vertices)
            if v.reduce() == base.reduce()
        }
        assert orbit == fiber and len(fiber) == 4


class TestAddedPermutations:
    @pytest.mark.parametrize("n", range(4, 9))
    def test_tables_and_identification(self, n):
        report = verify_added_permutations(n)
        assert report.ok, report.failures

    def test_n4_k2_table(self):
        report = verify_added_permutations(4)
        assert report.table_matches["bt^2"]
        assert report.table_matches["t"] and report.table_matches["b"]
        assert report.reduced_identifications[2]

    def test_renumbering_power_is_recorded(self):
        # the deck power carrying R_t R_b^k to R_b R_t^k is k-1, not the
        # stated -k; the report keeps the recomputed value
        report = verify_added_permutations(6)
        assert report.renumbering_powers == {2: 1, 3: 2, 4: 3, 5: 4}


class TestClassify:
    def setup_method(self):
        self.diagram = build_diagram(family_pi(4), "labeled")

    def test_sigma_relabel_is_central(self):
        v = family_pi(4).relabel(Renumbering.sigma_cycle(4))
        assert classify_vertex(self.diagram, self.diagram.index_of(v)) == "central"

    def test_figure3_letters_are_transition(self):
        for text in (
            "0 1 4 2 3 / 4 3 0 2 1",
            "0 2 3 4 1 / 4 2 1 0 3",
            "0 2 4 3 1 / 4 1 0 3 2",
            "0 3 4 1 2 / 4 2 0 1 3",
        ):
            v = LabeledPermutation.from_text(text)
            idx = self.diagram.index_of(v)
            assert idx is not None, text
            assert classify_vertex(self.diagram, idx) == "transition", text

    def test_rt2_is_plain(self):
        p = family_pi(4)
        for _ in range(2):
            p, _, _ = p.rauzy_move("t")
        assert classify_vertex(self.diagram, self.diagram.index_of(p)) == "plain"


class TestSymmetricVertex:
    def test_tau_diagram_finds_base(self):
        d = build_diagram(family_tau(5), "reduced")
        found = detect_symmetric_vertex(d)
        assert found is not None and found.fully_reversed
        assert found.permutation.bottom == tuple(reversed(found.permutation.top))

    def test_marked_diagram_finds_corner_vertex(self):
        d = build_diagram(family_pi(4), "reduced")
        found = detect_symmetric_vertex(d)
        assert found is not None and not found.fully_reversed
        v = found.permutation
        assert v.top[0] == v.bottom[-1] and v.top[-1] == v.bottom[0]

    def test_absence_returns_none(self):
        v = LabeledPermutation((1, 2, 3), (3, 1, 2))
        fake = RauzyDiagram(
            "labeled", (v,), ((Edge(0, 3, 2), Edge(0, 2, 3)),)
        )
        assert detect_symmetric_vertex(fake) is None


class TestRecursion:
    @pytest.mark.parametrize("n", range(4, 9))
    def test_branch_recursion(self, n):
        report = verify_rauzy_recursion(n)
        assert report.partition_ok
        assert report.ok, {k: v for k, v in report.cases.items() if not v}


class TestExports:
    def test_dot_deterministic_and_complete(self):
        d = build_diagram(family_tau(4), "labeled")
        dot = d.to_dot()
        assert dot == build_diagram(family_tau(4), "labeled").to_dot()
        assert dot.count("->") == 14
        assert dot.count("[label=") == 7 + 14
        assert "0 2 3 4" in dot

    def test_json_schema(self):
        d = build_diagram(family_tau(4), "reduced")
        obj = json.loads(d.to_json(n=4))
        assert set(obj) == {"mode", "n", "vertices", "edges", "base"}
        assert obj["mode"] == "reduced" and obj["n"] == 4
        assert len(obj["vertices"]) == 7 and len(obj["edges"]) == 14
        assert {"from", "eps", "to", "winner", "loser"} == set(obj["edges"][0])
        assert obj["base"] == 0
