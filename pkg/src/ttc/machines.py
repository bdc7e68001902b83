"""Transducer and automaton data model plus the evaluation semantics.

A transducer is a tuple (states, input alphabet, output alphabet, rules,
initial state).  Rules rewrite state-annotated input trees top-down; the
evaluation of a state on a partial tree returns the finite set of trees
derivable from it, with placeholders turning into state-over-node markers.
Look-ahead transducers additionally constrain each child variable with a
state of a look-ahead automaton; a rule fires only when every child subtree
lies in the domain of its annotation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, product
from typing import Iterable, Sequence

from .errors import (
    AlphabetMismatch,
    ResourceLimit,
    UnknownState,
    ValidationError,
)
from .trees import (
    MARKER_TYPES,
    ROOT,
    AnnotatedSymbol,
    NodeAddress,
    RankedAlphabet,
    StateOverNode,
    StateOverVariable,
    Tree,
    sort_trees,
)


class StateId:
    """Interned state identifier with a provenance tag.

    Provenance is one of base, pair, set, or triple; the canonical rendering
    ("(q,S)", "{q1,q2}", "(q,S,q')") doubles as the equality and hash key.
    Set members are kept sorted so equal sets get equal ids.
    """

    __slots__ = ("kind", "parts", "name")

    def __init__(self, kind, parts, name):
        self.kind = kind
        self.parts = parts
        self.name = name

    @classmethod
    def base(cls, name: str) -> "StateId":
        return cls("base", (name,), name)

    @classmethod
    def pair(cls, left: "StateId", right: "StateId") -> "StateId":
        return cls("pair", (left, right), "(%s,%s)" % (left.name, right.name))

    @classmethod
    def of_set(cls, members: Iterable["StateId"]) -> "StateId":
        members = tuple(sorted(set(members), key=lambda s: s.name))
        return cls("set", members, "{%s}" % ",".join(m.name for m in members))

    @classmethod
    def triple(cls, q: "StateId", s: "StateId", q2: "StateId") -> "StateId":
        return cls("triple", (q, s, q2), "(%s,%s,%s)" % (q.name, s.name, q2.name))

    def members(self) -> tuple["StateId", ...]:
        if self.kind != "set":
            raise ValidationError("state %s has no set provenance" % self.name)
        return self.parts

    def __eq__(self, other):
        if not isinstance(other, StateId):
            return NotImplemented
        return self.name == other.name

    def __lt__(self, other):
        return self.name < other.name

    def __hash__(self):
        return hash(self.name)

    def __str__(self):
        return self.name

    def __repr__(self):
        return "StateId(%s)" % self.name


EMPTY_SET_STATE = StateId.of_set(())


def _child_states(rhs: Tree, k: int) -> tuple[frozenset[StateId], ...]:
    """For each variable x_i, the set of states q with q(x_i) in the rhs."""
    buckets = [set() for _ in range(k)]

    def walk(node):
        lab = node.label
        if isinstance(lab, StateOverVariable):
            buckets[lab.index - 1].add(lab.state)
        for c in node.children:
            walk(c)

    walk(rhs)
    return tuple(frozenset(b) for b in buckets)


@dataclass(frozen=True)
class Rule:
    """One rewrite rule q(a(x1,...,xk)) -> rhs, optionally with look-ahead."""

    state: StateId
    symbol: object
    variables: int
    rhs: Tree
    lookahead: tuple[StateId, ...] | None = None
    child_states: tuple[frozenset[StateId], ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "child_states", _child_states(self.rhs, self.variables))

    def lhs_text(self) -> str:
        if self.variables == 0:
            return "%s(%s)" % (self.state, self.symbol)
        if self.lookahead is None:
            args = ",".join("x%d" % i for i in range(1, self.variables + 1))
        else:
            args = ",".join("x%d:%s" % (i, l) for i, l in enumerate(self.lookahead, start=1))
        return "%s(%s(%s))" % (self.state, self.symbol, args)

    def __str__(self):
        return "%s -> %s" % (self.lhs_text(), self.rhs)


def _check_rhs(rhs: Tree, k: int, states, output_alphabet, where):
    lab = rhs.label
    if isinstance(lab, StateOverVariable):
        if lab.state not in states:
            raise ValidationError("%s: rhs uses undeclared state %s" % (where, lab.state))
        if not 1 <= lab.index <= k:
            raise ValidationError("%s: variable x%d out of range [%d]" % (where, lab.index, k))
        return
    if isinstance(lab, MARKER_TYPES):
        raise ValidationError("%s: unexpected marker %s in rhs" % (where, lab))
    if lab not in output_alphabet:
        raise ValidationError("%s: rhs symbol %s not in the output alphabet" % (where, lab))
    if output_alphabet.rank(lab) != len(rhs.children):
        raise ValidationError(
            "%s: symbol %s has rank %d but %d children"
            % (where, lab, output_alphabet.rank(lab), len(rhs.children))
        )
    for c in rhs.children:
        _check_rhs(c, k, states, output_alphabet, where)


class Transducer:
    """Nondeterministic top-down tree transducer; immutable after construction."""

    def __init__(
        self,
        name: str,
        input_alphabet: RankedAlphabet,
        output_alphabet: RankedAlphabet,
        rules: Sequence[Rule],
        initial: StateId,
        states: Iterable[StateId] | None = None,
        _annotated: bool = False,
    ):
        self.name = name
        self.input_alphabet = input_alphabet
        self.output_alphabet = output_alphabet
        self.rules = tuple(rules)
        self.initial = initial
        inferred = {initial}
        for r in self.rules:
            inferred.add(r.state)
            for req in r.child_states:
                inferred |= req
        self.states = frozenset(states) if states is not None else frozenset(inferred)
        self._validate(_annotated)
        self._by_head: dict[tuple[StateId, object], tuple[Rule, ...]] = {}
        for r in self.rules:
            key = (r.state, r.symbol)
            self._by_head[key] = self._by_head.get(key, ()) + (r,)
        self._dom_memo: dict[tuple[StateId, Tree], bool] = {}
        self._set_prod_memo: dict[frozenset, bool] = {}

    def _validate(self, annotated):
        if self.initial not in self.states:
            raise ValidationError("initial state %s not among the states" % self.initial)
        if not self.states >= {r.state for r in self.rules}:
            raise ValidationError("some rule head is not a declared state")
        state_names = {s.name for s in self.states}
        for alpha in (self.input_alphabet, self.output_alphabet):
            clash = state_names & {s for s in alpha if isinstance(s, str)}
            if clash:
                raise ValidationError("alphabet symbols clash with state names: %s" % sorted(clash))
        for r in self.rules:
            where = "rule %s" % r.lhs_text()
            if r.symbol not in self.input_alphabet:
                raise ValidationError("%s: symbol not in the input alphabet" % where)
            if self.input_alphabet.rank(r.symbol) != r.variables:
                raise ValidationError("%s: symbol rank differs from variable count" % where)
            if annotated:
                if r.lookahead is None or len(r.lookahead) != r.variables:
                    raise ValidationError("%s: expected one look-ahead state per variable" % where)
            elif r.lookahead is not None:
                raise ValidationError("%s: look-ahead annotations on a plain transducer" % where)
            _check_rhs(r.rhs, r.variables, self.states, self.output_alphabet, where)

    def __repr__(self):
        return "Transducer(%s: %d states, %d rules)" % (self.name, len(self.states), len(self.rules))

    def rules_for(self, state: StateId, symbol) -> tuple[Rule, ...]:
        return self._by_head.get((state, symbol), ())

    def rhs(self, state: StateId, symbol) -> tuple[Tree, ...]:
        return tuple(r.rhs for r in self.rules_for(state, symbol))

    def is_automaton(self) -> bool:
        """True iff alphabets coincide and every rule just relabels in place."""
        if self.input_alphabet != self.output_alphabet:
            return False
        for r in self.rules:
            rhs = r.rhs
            if rhs.label != r.symbol or len(rhs.children) != r.variables:
                return False
            for i, c in enumerate(rhs.children, start=1):
                lab = c.label
                if not isinstance(lab, StateOverVariable) or lab.index != i:
                    return False
        return True

    def is_linear_nondeleting(self) -> bool:
        """True iff every variable occurs exactly once in each rule's rhs."""
        for r in self.rules:
            counts = [0] * r.variables

            def walk(node):
                if isinstance(node.label, StateOverVariable):
                    counts[node.label.index - 1] += 1
                for c in node.children:
                    walk(c)

            walk(r.rhs)
            if any(c != 1 for c in counts):
                return False
        return True

    # -- semantics ---------------------------------------------------------

    def evaluate(self, state: StateId, tree: Tree, at: NodeAddress = ROOT, cap: int | None = None) -> frozenset[Tree]:
        """The set of trees derivable from state(tree); placeholders become q(v) markers.

        Any marker or placeholder leaf in the input acts as a placeholder, so
        rule right-hand sides can be evaluated directly.  Memoized per call on
        (state, node address).
        """
        if state not in self.states:
            raise UnknownState("state %s is not a state of %s" % (state, self.name))
        memo: dict[tuple[StateId, NodeAddress], frozenset[Tree]] = {}

        def eval_state(q, s, v):
            key = (q, v)
            if key in memo:
                return memo[key]
            if isinstance(s.label, MARKER_TYPES):
                out = frozenset((Tree(StateOverNode(q, v)),))
            else:
                if s.label not in self.input_alphabet:
                    raise AlphabetMismatch(
                        "symbol %s is not in the input alphabet of %s" % (s.label, self.name)
                    )
                acc = set()
                for rule in self.rules_for(q, s.label):
                    acc |= expand(rule.rhs, s, v)
                    if cap is not None and len(acc) > cap:
                        raise ResourceLimit("output set exceeds cap %d" % cap)
                out = frozenset(acc)
            memo[key] = out
            return out

        def expand(node, s, v):
            lab = node.label
            if isinstance(lab, StateOverVariable):
                return eval_state(lab.state, s.children[lab.index - 1], v.child(lab.index))
            if not node.children:
                return frozenset((node,))
            alts = [expand(c, s, v) for c in node.children]
            if any(not a for a in alts):
                return frozenset()
            count = 1
            for a in alts:
                count *= len(a)
                if cap is not None and count > cap:
                    raise ResourceLimit("output set exceeds cap %d" % cap)
            return frozenset(Tree(lab, combo) for combo in product(*alts))

        return eval_state(state, tree, at)

    def translate(self, tree: Tree, cap: int | None = None) -> frozenset[Tree]:
        """All ground output trees derivable from the initial state on a ground input."""
        self._check_input(tree)
        return self.evaluate(self.initial, tree, ROOT, cap=cap)

    def _check_input(self, tree: Tree):
        if isinstance(tree.label, MARKER_TYPES):
            raise AlphabetMismatch("input tree %s is not ground" % tree)
        if tree.label not in self.input_alphabet:
            raise AlphabetMismatch(
                "symbol %s is not in the input alphabet of %s" % (tree.label, self.name)
            )
        if self.input_alphabet.rank(tree.label) != len(tree.children):
            raise AlphabetMismatch("arity mismatch at %s" % tree.label)
        for c in tree.children:
            self._check_input(c)

    def dom_member(self, state: StateId, tree: Tree) -> bool:
        """True iff some ground output is derivable from state(tree)."""
        memo = self._dom_memo

        def dm(q, s):
            key = (q, s)
            if key in memo:
                return memo[key]
            ok = any(
                all(dm(q2, s.children[i]) for i, req in enumerate(rule.child_states) for q2 in req)
                for rule in self.rules_for(q, s.label)
            )
            memo[key] = ok
            return ok

        self._check_input(tree)
        return dm(state, tree)

    @cached_property
    def productive_states(self) -> frozenset[StateId]:
        """Least fixpoint of: q is productive iff some rule of q has only productive rhs states.

        Exact for automata (one state per child); for general transducers it
        over-approximates non-emptiness, which is why dom_empty works with
        requirement sets instead.
        """
        prod: set[StateId] = set()
        changed = True
        while changed:
            changed = False
            for r in self.rules:
                if r.state in prod:
                    continue
                if all(q in prod for req in r.child_states for q in req):
                    prod.add(r.state)
                    changed = True
        return frozenset(prod)

    def _requirement_alternatives(self, members: frozenset[StateId]):
        """Per symbol, the merged child-requirement vectors opened by choosing
        one rule per member state (projections of subset choices accept the
        same trees, so single choices decide emptiness exactly)."""
        ordered = sorted(members, key=lambda s: s.name)
        for sym, k in self.input_alphabet.items():
            per_member = [self.rules_for(q, sym) for q in ordered]
            if any(not own for own in per_member):
                continue
            seen = set()
            for choice in product(*per_member):
                merged = tuple(
                    frozenset().union(*(r.child_states[i] for r in choice)) if choice else frozenset()
                    for i in range(k)
                )
                if merged not in seen:
                    seen.add(merged)
                    yield merged

    def _set_productive(self, members: frozenset[StateId]) -> bool:
        """True iff some ground tree lies in every member's domain."""
        memo = self._set_prod_memo
        if members in memo:
            return memo[members]
        universe = {members}
        stack = [members]
        alternatives: dict[frozenset, list[tuple]] = {}
        while stack:
            current = stack.pop()
            vecs = list(self._requirement_alternatives(current))
            alternatives[current] = vecs
            for vec in vecs:
                for child in vec:
                    if child not in universe:
                        universe.add(child)
                        stack.append(child)
                        if len(universe) > 100000:
                            raise ResourceLimit("requirement-set universe too large")
        productive: set[frozenset] = set()
        changed = True
        while changed:
            changed = False
            for current in universe:
                if current in productive:
                    continue
                if any(all(child in productive for child in vec) for vec in alternatives[current]):
                    productive.add(current)
                    changed = True
        for current in universe:
            memo[current] = current in productive
        return members in productive

    def dom_empty(self, state: StateId) -> bool:
        if state not in self.states:
            raise UnknownState("state %s is not a state of %s" % (state, self.name))
        return not self._set_productive(frozenset((state,)))

    def enumerate_domain(self, state: StateId, max_size: int) -> list[Tree]:
        """All ground trees of size <= max_size in dom(state), in canonical order."""
        if state not in self.states:
            raise UnknownState("state %s is not a state of %s" % (state, self.name))
        return enumerate_satisfying(self.input_alphabet, ((self, state),), max_size)

    # -- helpers for constructions -----------------------------------------

    def reachable_states(self) -> frozenset[StateId]:
        seen = {self.initial}
        todo = [self.initial]
        while todo:
            q = todo.pop()
            for r in self.rules:
                if r.state != q:
                    continue
                for req in r.child_states:
                    for q2 in req:
                        if q2 not in seen:
                            seen.add(q2)
                            todo.append(q2)
        return frozenset(seen)

    def restricted_to(self, keep: Iterable[StateId], name: str | None = None) -> "Transducer":
        keep = frozenset(keep)
        if self.initial not in keep:
            raise ValidationError("cannot drop the initial state")
        rules = tuple(
            r
            for r in self.rules
            if r.state in keep and all(req <= keep for req in r.child_states)
        )
        return Transducer(
            name or self.name,
            self.input_alphabet,
            self.output_alphabet,
            rules,
            self.initial,
            states=keep,
            _annotated=any(r.lookahead is not None for r in rules),
        )


def identity_automaton(alphabet: RankedAlphabet, state_name: str = "u", name: str = "identity") -> Transducer:
    """The one-state automaton accepting every tree over the alphabet."""
    u = StateId.base(state_name)
    rules = []
    for sym, k in alphabet.items():
        rhs = Tree(sym, tuple(Tree(StateOverVariable(u, i)) for i in range(1, k + 1)))
        rules.append(Rule(u, sym, k, rhs))
    return Transducer(name, alphabet, alphabet, rules, u)


class LookaheadTransducer:
    """Transducer whose rules constrain children by look-ahead automaton states.

    Construction trims the machine: look-ahead states with empty domain are
    removed together with the (dead) rules that mention them, and the base is
    restricted to states reachable from its initial state.
    """

    def __init__(self, base: Transducer, la: Transducer, trim: bool = True):
        if not la.is_automaton():
            raise ValidationError("the look-ahead machine must be an automaton")
        if la.input_alphabet != base.input_alphabet:
            raise ValidationError("look-ahead automaton must read the base input alphabet")
        for r in base.rules:
            if r.lookahead is None or len(r.lookahead) != r.variables:
                raise ValidationError("rule %s lacks look-ahead annotations" % r.lhs_text())
        if trim:
            base, la = _trim_lookahead(base, la)
        for r in base.rules:
            for l in r.lookahead:
                if l not in la.states:
                    raise ValidationError("annotation %s is not a look-ahead state" % l)
        self.base = base
        self.la = la

    @property
    def name(self):
        return self.base.name

    @property
    def input_alphabet(self):
        return self.base.input_alphabet

    @property
    def output_alphabet(self):
        return self.base.output_alphabet

    def __repr__(self):
        return "LookaheadTransducer(%s: %d states, %d rules; la %d states)" % (
            self.base.name,
            len(self.base.states),
            len(self.base.rules),
            len(self.la.states),
        )

    def translate_la(self, tree: Tree, cap: int | None = None) -> frozenset[Tree]:
        """Two-phase semantics, implemented lazily: a rule fires at a node iff
        every child subtree is in the domain of its annotation."""
        self.base._check_input(tree)
        memo: dict[tuple[StateId, NodeAddress], frozenset[Tree]] = {}

        def eval_state(q, s, v):
            key = (q, v)
            if key in memo:
                return memo[key]
            acc = set()
            for rule in self.base.rules_for(q, s.label):
                if all(self.la.dom_member(l, s.children[i]) for i, l in enumerate(rule.lookahead)):
                    acc |= expand(rule.rhs, s, v)
                    if cap is not None and len(acc) > cap:
                        raise ResourceLimit("output set exceeds cap %d" % cap)
            out = frozenset(acc)
            memo[key] = out
            return out

        def expand(node, s, v):
            lab = node.label
            if isinstance(lab, StateOverVariable):
                return eval_state(lab.state, s.children[lab.index - 1], v.child(lab.index))
            if not node.children:
                return frozenset((node,))
            alts = [expand(c, s, v) for c in node.children]
            if any(not a for a in alts):
                return frozenset()
            count = 1
            for a in alts:
                count *= len(a)
                if cap is not None and count > cap:
                    raise ResourceLimit("output set exceeds cap %d" % cap)
            return frozenset(Tree(lab, combo) for combo in product(*alts))

        return eval_state(self.base.initial, tree, ROOT)

    def dom_member(self, state: StateId, tree: Tree) -> bool:
        """Domain membership under the look-ahead semantics."""
        memo: dict[tuple[StateId, Tree], bool] = {}

        def dm(q, s):
            key = (q, s)
            if key in memo:
                return memo[key]
            ok = False
            for rule in self.base.rules_for(q, s.label):
                if not all(self.la.dom_member(l, s.children[i]) for i, l in enumerate(rule.lookahead)):
                    continue
                if all(dm(q2, s.children[i]) for i, req in enumerate(rule.child_states) for q2 in req):
                    ok = True
                    break
            memo[key] = ok
            return ok

        self.base._check_input(tree)
        return dm(state, tree)

    def enumerate_domain(self, max_size: int) -> list[Tree]:
        return enumerate_satisfying(
            self.input_alphabet, ((self, self.base.initial),), max_size
        )


def _trim_lookahead(base: Transducer, la: Transducer) -> tuple[Transducer, Transducer]:
    """Drop empty-domain look-ahead states, dead base rules, unreachable states."""
    live_la = la.productive_states
    live_rules = tuple(r for r in base.rules if all(l in live_la for l in r.lookahead))
    base2 = Transducer(
        base.name,
        base.input_alphabet,
        base.output_alphabet,
        live_rules,
        base.initial,
        states=base.states,
        _annotated=True,
    )
    base2 = base2.restricted_to(base2.reachable_states())
    used = {l for r in base2.rules for l in r.lookahead} | {la.initial}
    keep = set()
    todo = list(used & live_la)
    keep.update(todo)
    if la.initial in live_la:
        keep.add(la.initial)
        todo.append(la.initial)
    while todo:
        l = todo.pop()
        for r in la.rules:
            if r.state != l:
                continue
            for req in r.child_states:
                for l2 in req:
                    if l2 in live_la and l2 not in keep:
                        keep.add(l2)
                        todo.append(l2)
    keep.add(la.initial)
    live_kept = keep & live_la
    la_rules = tuple(
        r
        for r in la.rules
        if r.state in live_kept and all(req <= live_kept for req in r.child_states)
    )
    la2 = Transducer(la.name, la.input_alphabet, la.output_alphabet, la_rules, la.initial, states=keep)
    return base2, la2


def translate_la_eager(m: LookaheadTransducer, tree: Tree, size_guard: int = 12, cap: int | None = None) -> frozenset[Tree]:
    """Eager two-phase semantics: materialize relabeled trees, then translate.

    Each node child is annotated with a set of look-ahead states the automaton
    can arrive in (any subset of the valid ones drawn from the annotations the
    rules actually use); a rule fires when its annotation is in the recorded
    set.  Guarded by a tree-size limit since the annotation fan-out is
    exponential.
    """
    m.base._check_input(tree)
    if tree.size > size_guard:
        raise ResourceLimit(
            "eager relabeling materializes only trees of size <= %d" % size_guard
        )

    ann_universe: dict[tuple[object, int], set[StateId]] = {}
    for r in m.base.rules:
        for i, l in enumerate(r.lookahead):
            ann_universe.setdefault((r.symbol, i), set()).add(l)

    def annotations(node) -> list[Tree]:
        if not node.children:
            return [Tree(AnnotatedSymbol(node.label, ()))]
        per_child = []
        for i, child in enumerate(node.children):
            cands = sorted(ann_universe.get((node.label, i), ()), key=lambda s: s.name)
            valid = [l for l in cands if m.la.dom_member(l, child)]
            parts = [StateId.of_set(c) for n in range(len(valid) + 1) for c in combinations(valid, n)]
            per_child.append(parts)
        child_alts = [annotations(c) for c in node.children]
        out = []
        for parts_combo in product(*per_child):
            for kids in product(*child_alts):
                out.append(Tree(AnnotatedSymbol(node.label, parts_combo), kids))
        return out

    results: set[Tree] = set()
    for relabeled in annotations(tree):
        results |= _translate_annotated(m.base, relabeled, cap)
        if cap is not None and len(results) > cap:
            raise ResourceLimit("output set exceeds cap %d" % cap)
    return frozenset(results)


def _translate_annotated(base: Transducer, relabeled: Tree, cap=None) -> frozenset[Tree]:
    """Run annotated rules over a relabeled tree; a rule fires when each of its
    annotations is a member of the part set recorded at the node."""

    def eval_state(q, s):
        sym = s.label
        acc = set()
        for rule in base.rules_for(q, sym.name):
            if all(l in sym.annotations[i].members() for i, l in enumerate(rule.lookahead)):
                acc |= expand(rule.rhs, s)
        return frozenset(acc)

    def expand(node, s):
        lab = node.label
        if isinstance(lab, StateOverVariable):
            return eval_state(lab.state, s.children[lab.index - 1])
        if not node.children:
            return frozenset((node,))
        alts = [expand(c, s) for c in node.children]
        if any(not a for a in alts):
            return frozenset()
        count = 1
        for a in alts:
            count *= len(a)
            if cap is not None and count > cap:
                raise ResourceLimit("output set exceeds cap %d" % cap)
        return frozenset(Tree(lab, combo) for combo in product(*alts))

    return eval_state(base.initial, relabeled)


# -- domain enumeration ------------------------------------------------------

Atom = tuple  # (machine, state); the machine is a Transducer or LookaheadTransducer


def _atom_alternatives(atom: Atom, symbol, k: int):
    """Child-requirement vectors opened up by one machine state on a symbol."""
    m, q = atom
    if isinstance(m, LookaheadTransducer):
        for rule in m.base.rules_for(q, symbol):
            yield tuple(
                frozenset({(m.la, rule.lookahead[i])})
                | frozenset((m, q2) for q2 in rule.child_states[i])
                for i in range(k)
            )
    else:
        for rule in m.rules_for(q, symbol):
            yield tuple(frozenset((m, q2) for q2 in rule.child_states[i]) for i in range(k))


def _atom_key(atom: Atom):
    m, q = atom
    return (id(m), q)


def enumerate_satisfying(alphabet: RankedAlphabet, atoms: Iterable[Atom], max_size: int) -> list[Tree]:
    """All ground trees of size <= max_size over the alphabet that lie in the
    domain of every (machine, state) requirement, generated by rule-directed
    expansion and returned in canonical (size, text) order."""
    if max_size < 1:
        raise ValidationError("max_size must be >= 1")
    memo: dict[tuple, frozenset[Tree]] = {}
    atoms = tuple(atoms)

    def solve(reqs: frozenset, n: int) -> frozenset[Tree]:
        key = (frozenset(_atom_key(a) for a in reqs), n)
        if key in memo:
            return memo[key]
        out: set[Tree] = set()
        for sym, k in alphabet.items():
            if n < 1 + k:
                continue
            if k == 0 and n != 1:
                continue
            per_atom = []
            feasible = True
            for atom in reqs:
                alts = []
                seen = set()
                for vec in _atom_alternatives(atom, sym, k):
                    sig = tuple(frozenset(_atom_key(a) for a in v) for v in vec)
                    if sig not in seen:
                        seen.add(sig)
                        alts.append(vec)
                if not alts:
                    feasible = False
                    break
                per_atom.append(alts)
            if not feasible:
                continue
            merged_vecs = set()
            for choice in product(*per_atom):
                merged = tuple(frozenset().union(*(vec[i] for vec in choice)) for i in range(k))
                merged_vecs.add(merged)
            for merged in merged_vecs:
                if k == 0:
                    out.add(Tree(sym))
                    continue
                for split in _compositions(n - 1, k):
                    child_sets = [solve(merged[i], split[i]) for i in range(k)]
                    if any(not cs for cs in child_sets):
                        continue
                    for combo in product(*child_sets):
                        out.add(Tree(sym, combo))
        result = frozenset(out)
        memo[key] = result
        return result

    found: set[Tree] = set()
    for n in range(1, max_size + 1):
        found |= solve(frozenset(atoms), n)
    return sort_trees(found)


def _compositions(total: int, k: int):
    """All ways to write total as an ordered sum of k positive integers."""
    if k == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - k + 2):
        for rest in _compositions(total - first, k - 1):
            yield (first,) + rest


def enumerate_trees(alphabet: RankedAlphabet, max_size: int) -> list[Tree]:
    """All ground trees over the alphabet of size <= max_size."""
    return enumerate_satisfying(alphabet, (), max_size)
