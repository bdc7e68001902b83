import pytest

from ttc import (
    AlphabetMismatch,
    LookaheadTransducer,
    StateId,
    Transducer,
    build_hat_t1,
    build_m,
    domain_automaton,
    enumerate_trees,
    p_construction,
    translate_la_eager,
)
from ttc.machines import enumerate_satisfying
from ttc.trees import NodeAddress, PlaceholderLeaf, StateOverNode, Tree, parse_tree

from .oracles import rewrite_translate

t = parse_tree


def outs(trees):
    return sorted(x.text for x in trees)


class TestShapePredicates:
    def test_domain_automaton_is_automaton(self, worked_pair):
        _, t2 = worked_pair
        assert domain_automaton(t2).is_automaton()

    def test_quadratic_is_not_automaton(self, quadratic):
        assert not quadratic.is_automaton()

    def test_zero_rules_is_automaton(self, quadratic):
        empty = Transducer(
            "empty",
            quadratic.input_alphabet,
            quadratic.input_alphabet,
            [],
            quadratic.initial,
            states=[quadratic.initial],
        )
        assert empty.is_automaton()

    def test_automata_are_linear_nondeleting(self, worked_pair):
        _, t2 = worked_pair
        assert domain_automaton(t2).is_linear_nondeleting()

    def test_deleting_rule_detected(self, del_pair):
        _, t2 = del_pair  # q2(b(x1,x2,x3)) -> q2(x1) deletes x2, x3
        assert not t2.is_linear_nondeleting()

    def test_copying_rule_detected(self, copy_pair):
        _, t2 = copy_pair  # q2(b(x1)) -> f(q2'(x1), q2''(x1)) copies x1
        assert not t2.is_linear_nondeleting()


class TestEvaluate:
    def test_worked_example_output(self, quadratic):
        got = quadratic.evaluate(quadratic.initial, t("a(a(e))"))
        assert outs(got) == ["f(a(e),f(e,e))"]

    def test_three_way_leaf(self, copy_pair):
        t1, _ = copy_pair
        got = t1.evaluate(StateId.base("q1"), t("e"))
        assert outs(got) == ["e1", "e2", "e3"]

    def test_placeholder_yields_marker(self, quadratic):
        q = StateId.base("q")
        hole = Tree(PlaceholderLeaf("b"))
        v = NodeAddress((2, 1))
        got = quadratic.evaluate(q, hole, v)
        assert got == frozenset((Tree(StateOverNode(q, v)),))

    def test_unknown_state(self, quadratic):
        from ttc import UnknownState

        with pytest.raises(UnknownState):
            quadratic.evaluate(StateId.base("nope"), t("e"))


class TestTranslate:
    def test_quadratic(self, quadratic):
        assert outs(quadratic.translate(t("a(a(e))"))) == ["f(a(e),f(e,e))"]

    def test_naive_product_overapproximates(self, copy_pair):
        n, _ = p_construction(*copy_pair)
        assert outs(n.translate(t("a(e)"))) == ["f(e,e')", "f(e,e)"]

    def test_empty_translation(self, del_pair):
        t1, _ = del_pair
        assert t1.translate(t("a(e,e)")) == frozenset()

    def test_foreign_symbol_is_an_error(self, quadratic):
        with pytest.raises(AlphabetMismatch):
            quadratic.translate(t("g(e)"))

    def test_agrees_with_rewrite_oracle(self, quadratic, copy_pair, del_pair, worked_pair):
        machines = [quadratic, *copy_pair, *del_pair, *worked_pair]
        for machine in machines:
            for s in enumerate_trees(machine.input_alphabet, 4):
                assert machine.translate(s) == frozenset(rewrite_translate(machine, s)), (
                    machine.name,
                    s.text,
                )


class TestDomains:
    def test_copy_t2_rejects_e3_under_q2p(self, copy_pair):
        _, t2 = copy_pair
        assert not t2.dom_member(StateId.base("q2'"), t("e3"))
        assert t2.dom_member(StateId.base("q2''"), t("e3"))

    def test_quadratic_domain_is_everything(self, quadratic):
        for s in enumerate_trees(quadratic.input_alphabet, 6):
            assert quadratic.dom_member(quadratic.initial, s)

    def test_dropping_rule_one_shrinks_domain(self, quadratic):
        smaller = Transducer(
            "smaller",
            quadratic.input_alphabet,
            quadratic.output_alphabet,
            quadratic.rules[1:],
            quadratic.initial,
            states=quadratic.states,
        )
        assert not smaller.dom_member(smaller.initial, t("a(e)"))
        assert smaller.dom_member(smaller.initial, t("e"))
        assert [s.text for s in smaller.enumerate_domain(smaller.initial, 6)] == ["e"]

    def test_dom_member_iff_translation_nonempty(self, quadratic, copy_pair, del_pair, worked_pair):
        machines = [quadratic, *copy_pair, *del_pair, *worked_pair]
        for machine in machines:
            for s in enumerate_trees(machine.input_alphabet, 6):
                for q in sorted(machine.states):
                    assert machine.dom_member(q, s) == bool(
                        machine.evaluate(q, s)
                    ), (machine.name, q.name, s.text)

    def test_ruleless_state_has_empty_domain(self, quadratic):
        extra = StateId.base("dead")
        bigger = Transducer(
            "bigger",
            quadratic.input_alphabet,
            quadratic.output_alphabet,
            quadratic.rules,
            quadratic.initial,
            states=set(quadratic.states) | {extra},
        )
        assert bigger.dom_empty(extra)
        assert not bigger.dom_empty(quadratic.initial)

    def test_deleting_pair_set_state_is_empty(self, del_pair):
        t1, t2 = del_pair
        hat = build_hat_t1(t1, t2)
        members = frozenset(
            s for s in hat.states if s.name in ("(q1'',{})", "(q1''',{})")
        )
        assert len(members) == 2
        seeds = [members] + [frozenset([m]) for m in members]
        aut = domain_automaton(hat, seeds=seeds)
        both = StateId.of_set(members)
        assert aut.dom_empty(both)
        # each branch checker alone is satisfiable
        for m in members:
            assert not aut.dom_empty(StateId.of_set([m]))

    def test_dom_empty_iff_enumeration_empty(self, quadratic, copy_pair, del_pair):
        machines = [quadratic, *copy_pair, *del_pair]
        for machine in machines:
            for q in sorted(machine.states):
                assert machine.dom_empty(q) == (machine.enumerate_domain(q, 6) == []), (
                    machine.name,
                    q.name,
                )


class TestEnumerateDomain:
    def test_copy_t1_small(self, copy_pair):
        t1, _ = copy_pair
        got = t1.enumerate_domain(StateId.base("q1"), 2)
        assert [s.text for s in got] == ["e", "a(e)"]

    def test_quadratic_small(self, quadratic):
        got = quadratic.enumerate_domain(quadratic.initial, 2)
        assert [s.text for s in got] == ["e", "a(e)"]

    def test_empty_domain_state(self, del_pair):
        t1, _ = del_pair
        # q1 itself: needs x2 with leftmost leaf both e and c, impossible
        assert t1.enumerate_domain(t1.initial, 6) == []

    def test_matches_dom_member_filter(self, worked_pair):
        t1, _ = worked_pair
        everything = enumerate_trees(t1.input_alphabet, 5)
        expected = [s for s in everything if t1.dom_member(t1.initial, s)]
        assert t1.enumerate_domain(t1.initial, 5) == expected


class TestLookaheadSemantics:
    def test_deleting_m_is_empty(self, del_pair):
        m, _ = build_m(*del_pair)
        for s in enumerate_trees(m.input_alphabet, 5):
            assert m.translate_la(s) == frozenset()

    def test_worked_m_outputs(self, worked_pair):
        m, _ = build_m(*worked_pair)
        assert outs(m.translate_la(t("f(e,d)"))) == ["d"]
        assert outs(m.translate_la(t("f(e,e)"))) == ["f(e,e)"]

    def test_lazy_agrees_with_eager(self, copy_pair, del_pair, worked_pair):
        for pair in (copy_pair, del_pair, worked_pair):
            m, _ = build_m(*pair)
            for s in enumerate_trees(m.input_alphabet, 5):
                assert m.translate_la(s) == translate_la_eager(m, s), (m.name, s.text)

    def test_hand_written_lookahead(self, workspace):
        m = workspace.machines["quadratic_la"]
        assert isinstance(m, LookaheadTransducer)
        assert outs(m.translate_la(t("a(a(e))"))) == ["f(a(e),f(e,e))"]

    def test_la_domain_enumeration(self, worked_pair):
        m, _ = build_m(*worked_pair)
        enumerated = set(m.enumerate_domain(5))
        for s in enumerate_trees(m.input_alphabet, 5):
            assert (s in enumerated) == bool(m.translate_la(s))

    def test_monotone_lookahead(self, copy_pair, worked_pair):
        # bigger state sets have smaller domains
        for _, t2 in (copy_pair, worked_pair):
            aut = domain_automaton(t2)
            sets = [s for s in aut.states if s.kind == "set"]
            trees = enumerate_trees(t2.input_alphabet, 5)
            for small in sets:
                for big in sets:
                    if set(small.parts) <= set(big.parts):
                        for s in trees:
                            if aut.dom_member(big, s):
                                assert aut.dom_member(small, s)


class TestRequirementEnumeration:
    def test_intersection_of_two_states(self, copy_pair):
        _, t2 = copy_pair
        q2p, q2pp = StateId.base("q2'"), StateId.base("q2''")
        both = enumerate_satisfying(t2.input_alphabet, [(t2, q2p), (t2, q2pp)], 3)
        texts = [s.text for s in both]
        assert "e3" not in texts and "e1" in texts and "e2" in texts

    def test_unconstrained_counts(self, quadratic):
        got = enumerate_trees(quadratic.input_alphabet, 4)
        assert [s.text for s in got] == ["e", "a(e)", "a(a(e))", "a(a(a(e)))"]
