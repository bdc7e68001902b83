"""Symbolic constructions on transducers.

Everything here is a pure function from machines to machines: the power-set
domain automaton, the product (p-) construction, the domain-restricted first
component, the triple-state product, the look-ahead transducer M, look-ahead
removal, fusion with a linear nondeleting second component, and the chain
reduction that trades the last two stages of a composition for M.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable

from .errors import (
    AlphabetMismatch,
    ChainTooShort,
    InvalidProvenance,
    NotLinearNondeleting,
    ResourceLimit,
    ValidationError,
)
from .machines import (
    EMPTY_SET_STATE,
    LookaheadTransducer,
    Rule,
    StateId,
    Transducer,
    identity_automaton,
)
from .trees import AnnotatedSymbol, RankedAlphabet, StateOverNode, StateOverVariable, Tree, subtree_at

STATE_CAP = 5000
RULE_CAP = 60000


@dataclass
class BuildReport:
    """What a construction produced: the machine, pruning counts, provenance."""

    label: str
    machine: object
    states_before: int
    states_after: int
    provenance: dict[StateId, str] = field(default_factory=dict)
    stats: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class CompositionChain:
    """Alphabet-compatible sequence of transducers, composed left to right."""

    stages: tuple[Transducer, ...]

    def __post_init__(self):
        if not self.stages:
            raise ValidationError("a composition chain needs at least one stage")
        for left, right in zip(self.stages, self.stages[1:]):
            if left.output_alphabet != right.input_alphabet:
                raise AlphabetMismatch(
                    "output alphabet of %s differs from input alphabet of %s"
                    % (left.name, right.name)
                )

    def __len__(self):
        return len(self.stages)

    def __iter__(self):
        return iter(self.stages)


def domain_automaton(t: Transducer, seeds: Iterable[frozenset[StateId]] = (), name: str | None = None) -> Transducer:
    """Power-set automaton over t's input alphabet recognizing state-set domains.

    One rule per state set S, symbol a, and choice of a non-empty subset of
    right-hand sides per member, with child sets collecting the states that
    occur at each variable; collapsing choices are deduplicated.  Only sets
    reachable from {initial}, the empty set, and the seeds are materialized;
    the empty set realizes the identity.
    """
    sigma = t.input_alphabet
    known: set[frozenset[StateId]] = {frozenset()}
    queue: list[frozenset[StateId]] = []
    ordered_seeds = sorted(
        (frozenset(s) for s in seeds), key=lambda m: sorted(x.name for x in m)
    )
    for members in [frozenset({t.initial})] + ordered_seeds:
        if members not in known:
            known.add(members)
            queue.append(members)

    rules: list[Rule] = []
    seen_rules: set[tuple] = set()
    for sym, k in sigma.items():
        rhs = Tree(sym, tuple(Tree(StateOverVariable(EMPTY_SET_STATE, i)) for i in range(1, k + 1)))
        rules.append(Rule(EMPTY_SET_STATE, sym, k, rhs))

    while queue:
        members = queue.pop(0)
        state = StateId.of_set(members)
        ordered = sorted(members, key=lambda s: s.name)
        for sym, k in sigma.items():
            per_member: list[list[tuple[frozenset[StateId], ...]]] = []
            feasible = True
            for q in ordered:
                own = t.rules_for(q, sym)
                if not own:
                    feasible = False
                    break
                sigs: list[tuple[frozenset[StateId], ...]] = []
                seen_sigs = set()
                for mask in range(1, 1 << len(own)):
                    chosen = [own[i] for i in range(len(own)) if mask >> i & 1]
                    sig = tuple(
                        frozenset().union(*(r.child_states[i] for r in chosen))
                        for i in range(k)
                    )
                    if sig not in seen_sigs:
                        seen_sigs.add(sig)
                        sigs.append(sig)
                per_member.append(sigs)
            if not feasible:
                continue
            for combo in product(*per_member):
                children = tuple(
                    frozenset().union(*(sig[i] for sig in combo)) if combo else frozenset()
                    for i in range(k)
                )
                key = (state.name, sym, tuple(StateId.of_set(c).name for c in children))
                if key in seen_rules:
                    continue
                seen_rules.add(key)
                child_ids = tuple(StateId.of_set(c) for c in children)
                rhs = Tree(sym, tuple(Tree(StateOverVariable(cid, i + 1)) for i, cid in enumerate(child_ids)))
                rules.append(Rule(state, sym, k, rhs))
                if len(rules) > RULE_CAP:
                    raise ResourceLimit("domain automaton exceeds %d rules" % RULE_CAP)
                for c in children:
                    if c not in known:
                        known.add(c)
                        queue.append(c)
                        if len(known) > STATE_CAP:
                            raise ResourceLimit("domain automaton exceeds %d states" % STATE_CAP)

    states = [StateId.of_set(m) for m in known]
    return Transducer(
        name or "dom(%s)" % t.name,
        sigma,
        sigma,
        rules,
        StateId.of_set({t.initial}),
        states=states,
    )


def p_construction(
    t1: Transducer,
    t2: Transducer,
    make_state: Callable[[StateId, StateId], StateId] | None = None,
    pair_filter: Callable[[StateId, StateId], bool] | None = None,
    name: str | None = None,
) -> tuple[Transducer, list[tuple[Rule, Rule]]]:
    """Product construction: translate the right-hand sides of t1 by t2.

    States are pairs (q1,q2) built lazily from the initial pair; each t1 rule
    combined with each t2-translation of its right-hand side (markers acting
    as placeholders) yields one rule.  A pair_filter may veto pairs, in which
    case rules demanding a vetoed pair are dropped entirely.  Returns the
    machine and a (new rule, source t1 rule) pairing for downstream
    annotation.
    """
    if t1.output_alphabet != t2.input_alphabet:
        raise AlphabetMismatch(
            "output alphabet of %s differs from input alphabet of %s" % (t1.name, t2.name)
        )
    make_state = make_state or StateId.pair

    init = (t1.initial, t2.initial)
    seen_pairs = {init}
    queue = [init]
    states = {make_state(*init)}
    rules: list[Rule] = []
    sources: list[tuple[Rule, Rule]] = []
    seen_rules: set[tuple] = set()
    seen_pairs_rule: set[tuple] = set()

    while queue:
        q1, q2 = queue.pop(0)
        head = make_state(q1, q2)
        for src in t1.rules:
            if src.state != q1:
                continue
            for psi in sorted(t2.evaluate(q2, src.rhs), key=lambda p: p.text):
                gamma, demanded, ok = _instantiate(psi, src.rhs, make_state, pair_filter)
                if not ok:
                    continue
                rule = Rule(head, src.symbol, src.variables, gamma)
                pair_key = (rule.state.name, rule.symbol, rule.rhs.text, id(src))
                if pair_key in seen_pairs_rule:
                    continue
                seen_pairs_rule.add(pair_key)
                sources.append((rule, src))
                key = pair_key[:3]
                if key not in seen_rules:
                    seen_rules.add(key)
                    rules.append(rule)
                if len(sources) > RULE_CAP:
                    raise ResourceLimit("product construction exceeds %d rules" % RULE_CAP)
                for pair in demanded:
                    if pair not in seen_pairs:
                        seen_pairs.add(pair)
                        queue.append(pair)
                        states.add(make_state(*pair))
                        if len(states) > STATE_CAP:
                            raise ResourceLimit("product construction exceeds %d states" % STATE_CAP)

    machine = Transducer(
        name or "p(%s,%s)" % (t1.name, t2.name),
        t1.input_alphabet,
        t2.output_alphabet,
        rules,
        make_state(*init),
        states=states,
    )
    return machine, sources


def _instantiate(psi: Tree, xi: Tree, make_state, pair_filter):
    """Replace q2(u) markers in psi by paired-state markers over the variable
    that labels node u of xi."""
    demanded = []
    vetoed = False

    def go(node):
        nonlocal vetoed
        lab = node.label
        if isinstance(lab, StateOverNode):
            marker = subtree_at(xi, lab.node).label
            q1p, q2p = marker.state, lab.state
            if pair_filter is not None and not pair_filter(q1p, q2p):
                vetoed = True
                return node
            demanded.append((q1p, q2p))
            return Tree(StateOverVariable(make_state(q1p, q2p), marker.index))
        if not node.children:
            return node
        return Tree(lab, tuple(go(c) for c in node.children))

    gamma = go(psi)
    return gamma, demanded, not vetoed


def build_hat_t1(t1: Transducer, t2: Transducer, name: str | None = None) -> Transducer:
    """Restrict t1 so its outputs land in the domains t2 will need: the
    p-construction of t1 with the domain automaton of t2."""
    aut = domain_automaton(t2)
    machine, _ = p_construction(t1, aut, name=name or "hat(%s)" % t1.name)
    return machine


def _triple_state(q1: StateId, q2: StateId) -> StateId:
    if q1.kind != "pair" or q1.parts[1].kind != "set":
        raise InvalidProvenance(
            "expected a (state, state-set) pair from the restricted first component, got %s" % q1
        )
    return StateId.triple(q1.parts[0], q1.parts[1], q2)


def _triple_filter(q1: StateId, q2: StateId) -> bool:
    return q1.kind == "pair" and q1.parts[1].kind == "set" and q2 in q1.parts[1].parts


def build_product_n(hat_t1: Transducer, t2: Transducer, name: str | None = None) -> Transducer:
    """Product of the restricted first component with t2, keeping only triple
    states (q,S,q') with q' in S."""
    if hat_t1.initial.kind != "pair" or hat_t1.initial.parts[1].kind != "set":
        raise InvalidProvenance("first argument must come from the hat construction")
    machine, _ = p_construction(
        hat_t1, t2, make_state=_triple_state, pair_filter=_triple_filter, name=name
    )
    return machine


def build_m(t1: Transducer, t2: Transducer) -> tuple[LookaheadTransducer, list[BuildReport]]:
    """The look-ahead transducer M for the composition of t1 and t2.

    Base rules come from the triple product of the restricted first component
    with t2; each rule derived from a hat rule with right-hand side xi is
    annotated with exactly the state sets xi puts on each variable.  The
    look-ahead automaton is the domain automaton of the restricted first
    component, seeded so every annotation is one of its states; empty-domain
    look-ahead states and the rules they kill are pruned.
    """
    reports: list[BuildReport] = []

    def report(label, machine, before, provenance=None, t0=0.0):
        reports.append(
            BuildReport(
                label=label,
                machine=machine,
                states_before=before,
                states_after=len(machine.states) if isinstance(machine, Transducer) else len(machine.base.states),
                provenance=provenance or {},
                stats={"elapsed_ms": round((time.perf_counter() - t0) * 1000.0, 3)},
            )
        )

    t0 = time.perf_counter()
    aut = domain_automaton(t2)
    report("domain-automaton", aut, len(aut.states), {s: "subset of %s states" % t2.name for s in aut.states}, t0)

    t0 = time.perf_counter()
    hat, _ = p_construction(t1, aut, name="hat(%s)" % t1.name)
    report("restricted-first", hat, len(hat.states), {s: "pair over %s and dom(%s)" % (t1.name, t2.name) for s in hat.states}, t0)

    t0 = time.perf_counter()
    n_machine, sources = p_construction(
        hat, t2, make_state=_triple_state, pair_filter=_triple_filter, name="N(%s,%s)" % (t1.name, t2.name)
    )
    report("triple-product", n_machine, len(n_machine.states), {s: "triple (q,S,q')" for s in n_machine.states}, t0)

    annotated_rules = []
    seen_annotated = set()
    seeds = set()
    for rule, src in sources:
        annots = tuple(StateId.of_set(req) for req in src.child_states)
        key = (rule.state.name, rule.symbol, tuple(a.name for a in annots), rule.rhs.text)
        if key in seen_annotated:
            continue
        seen_annotated.add(key)
        seeds.update(frozenset(req) for req in src.child_states)
        annotated_rules.append(
            Rule(rule.state, rule.symbol, rule.variables, rule.rhs, lookahead=annots)
        )

    t0 = time.perf_counter()
    la = domain_automaton(hat, seeds=seeds, name="la(%s,%s)" % (t1.name, t2.name))
    report("look-ahead-automaton", la, len(la.states), {s: "subset of hat states" for s in la.states}, t0)

    base = Transducer(
        "M(%s,%s)" % (t1.name, t2.name),
        n_machine.input_alphabet,
        n_machine.output_alphabet,
        annotated_rules,
        n_machine.initial,
        states=n_machine.states,
        _annotated=True,
    )
    t0 = time.perf_counter()
    before = len(base.states) + len(la.states)
    m = LookaheadTransducer(base, la)
    provenance = {s: "triple (q,S,q')" for s in m.base.states}
    provenance.update({s: "look-ahead state (set of hat states)" for s in m.la.states})
    reports.append(
        BuildReport(
            label="look-ahead-transducer",
            machine=m,
            states_before=before,
            states_after=len(m.base.states) + len(m.la.states),
            provenance=provenance,
            stats={"elapsed_ms": round((time.perf_counter() - t0) * 1000.0, 3)},
        )
    )
    return m, reports


def decompose_la(m: LookaheadTransducer) -> tuple[Transducer, Transducer]:
    """Split a look-ahead transducer into a nondeterministic top-down
    relabeling R and a plain transducer T over the annotated alphabet, with
    translate_la(m, s) equal to the composition of R and T on every ground
    input.

    T carries, besides each base rule, its variants over every look-ahead
    state that covers the rule's annotation (set-provenance supersets), so a
    relabeling run that merged several annotations still matches.
    """
    la, base = m.la, m.base
    ann_symbols: dict[tuple, AnnotatedSymbol] = {}
    r_rules: list[Rule] = []
    for rule in la.rules:
        annots = tuple(c.label.state for c in rule.rhs.children)
        sym = ann_symbols.setdefault((rule.symbol, annots), AnnotatedSymbol(rule.symbol, annots))
        rhs = Tree(sym, tuple(Tree(StateOverVariable(annots[i], i + 1)) for i in range(rule.variables)))
        r_rules.append(Rule(rule.state, rule.symbol, rule.variables, rhs))

    out_alpha = RankedAlphabet({sym: len(sym.annotations) for sym in ann_symbols.values()})
    relabeling = Transducer(
        "R(%s)" % m.name, la.input_alphabet, out_alpha, r_rules, la.initial, states=la.states
    )

    covering: dict[StateId, list[StateId]] = {}
    la_states = sorted(la.states, key=lambda s: s.name)
    for l in la_states:
        if l.kind == "set":
            covering[l] = [
                l2
                for l2 in la_states
                if l2.kind == "set" and set(l.parts) <= set(l2.parts)
            ]
        else:
            covering[l] = [l]

    t_rules: list[Rule] = []
    seen = set()
    for rule in base.rules:
        for variant in product(*(covering[l] for l in rule.lookahead)):
            sym = ann_symbols.get((rule.symbol, tuple(variant)))
            if sym is None:
                continue
            key = (rule.state.name, sym, rule.rhs.text)
            if key in seen:
                continue
            seen.add(key)
            t_rules.append(Rule(rule.state, sym, rule.variables, rule.rhs))

    reader = Transducer(
        "T(%s)" % m.name,
        out_alpha,
        base.output_alphabet,
        t_rules,
        base.initial,
        states=base.states,
    )
    return relabeling, reader


def compose_linear_nondeleting(t1: Transducer, t2: Transducer, name: str | None = None) -> Transducer:
    """Fuse t1 with a linear nondeleting t2 into a single equivalent transducer."""
    if not t2.is_linear_nondeleting():
        raise NotLinearNondeleting("%s is not linear and nondeleting" % t2.name)
    machine, _ = p_construction(t1, t2, name=name or "fuse(%s,%s)" % (t1.name, t2.name))
    return machine


def reduce_chain(chain: CompositionChain) -> tuple[CompositionChain, list[BuildReport]]:
    """Shorten an n-fold chain (n >= 3) to n-1 stages preserving per-input
    singleton-ness: build M for the last pair, split it into a relabeling and
    a reader, and fuse the relabeling into stage n-2."""
    if len(chain) < 3:
        raise ChainTooShort("chain reduction needs at least three stages")
    stages = chain.stages
    m, reports = build_m(stages[-2], stages[-1])
    relabeling, reader = decompose_la(m)
    fused = compose_linear_nondeleting(stages[-3], relabeling)
    reduced = CompositionChain(stages[:-3] + (fused, reader))
    return reduced, reports


def prune(machine):
    """Drop states unreachable from the initial state (and, for look-ahead
    transducers, look-ahead states with empty domain) plus their rules."""
    if isinstance(machine, LookaheadTransducer):
        return LookaheadTransducer(machine.base, machine.la)
    return machine.restricted_to(machine.reachable_states())


def wrap_trivial_lookahead(t: Transducer) -> LookaheadTransducer:
    """View a plain transducer as a look-ahead transducer with a universal
    one-state look-ahead automaton."""
    la = identity_automaton(t.input_alphabet, name="universal(%s)" % t.name)
    u = la.initial
    rules = [
        Rule(r.state, r.symbol, r.variables, r.rhs, lookahead=(u,) * r.variables)
        for r in t.rules
    ]
    base = Transducer(
        t.name, t.input_alphabet, t.output_alphabet, rules, t.initial, states=t.states, _annotated=True
    )
    return LookaheadTransducer(base, la)
