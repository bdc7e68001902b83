"""Composition-chain semantics, the bounded functionality checker, and traces.

The checker enumerates the domain of its target (not all trees) up to a size
bound, computes every output per input, and reports the first input with two
distinct outputs in canonical order.  Verdicts are always bound-relative: a
"functional" answer means no counterexample of size up to the bound exists.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import islice

from .constructions import BuildReport, CompositionChain, build_m, reduce_chain, wrap_trivial_lookahead
from .errors import ValidationError
from .machines import LookaheadTransducer, Rule, Transducer
from .trees import ROOT, NodeAddress, StateOverNode, StateOverVariable, Tree, sort_trees, subtree_at

DEFAULT_OUTPUT_CAP = 10**6

FUNCTIONAL = "functional-up-to-bound"
NOT_FUNCTIONAL = "not-functional"


def chain_outputs(chain: CompositionChain | Transducer, tree: Tree, cap: int | None = DEFAULT_OUTPUT_CAP) -> frozenset[Tree]:
    """Left-to-right relational composition of the stage translations."""
    if isinstance(chain, Transducer):
        chain = CompositionChain((chain,))
    outs = frozenset((tree,))
    for stage in chain:
        step = set()
        for t in outs:
            step |= stage.translate(t, cap=cap)
        outs = frozenset(step)
    return outs


@dataclass
class Counterexample:
    input: Tree
    outputs: tuple[Tree, Tree]


@dataclass
class Verdict:
    """Result of a bounded functionality check."""

    status: str
    bound: int
    counterexample: Counterexample | None = None
    stats: dict = field(default_factory=dict)

    @property
    def functional(self) -> bool:
        return self.status == FUNCTIONAL


def check_functional_bounded(target, max_size: int, output_cap: int = DEFAULT_OUTPUT_CAP) -> Verdict:
    """Exhaustively check single-valuedness on all domain members up to max_size.

    The target is a composition chain (a bare transducer counts as a 1-chain)
    or a look-ahead transducer.  Inputs are visited in canonical order, so the
    reported counterexample is reproducible.
    """
    if max_size < 1:
        raise ValidationError("max_size must be >= 1")
    if isinstance(target, Transducer):
        target = CompositionChain((target,))
    if isinstance(target, LookaheadTransducer):
        candidates = target.enumerate_domain(max_size)
        outputs_of = lambda s: target.translate_la(s, cap=output_cap)
    else:
        first = target.stages[0]
        candidates = first.enumerate_domain(first.initial, max_size)
        outputs_of = lambda s: chain_outputs(target, s, cap=output_cap)
    inputs_checked = 0
    outputs_computed = 0
    for s in candidates:
        outs = outputs_of(s)
        inputs_checked += 1
        outputs_computed += len(outs)
        if len(outs) > 1:
            two = tuple(sort_trees(outs)[:2])
            return Verdict(
                NOT_FUNCTIONAL,
                max_size,
                Counterexample(s, two),
                {"inputs_checked": inputs_checked, "outputs_computed": outputs_computed},
            )
    return Verdict(
        FUNCTIONAL,
        max_size,
        None,
        {"inputs_checked": inputs_checked, "outputs_computed": outputs_computed},
    )


def decide_functionality(chain: CompositionChain, max_size: int, output_cap: int = DEFAULT_OUTPUT_CAP) -> tuple[Verdict, list[BuildReport]]:
    """Reduce the chain to two stages, build the look-ahead transducer for the
    final pair, and check it at the bound; returns every intermediate report."""
    reports: list[BuildReport] = []
    while len(chain) > 2:
        chain, step_reports = reduce_chain(chain)
        reports.extend(step_reports)
    if len(chain) == 2:
        m, step_reports = build_m(chain.stages[0], chain.stages[1])
        reports.extend(step_reports)
    else:
        m = wrap_trivial_lookahead(chain.stages[0])
    verdict = check_functional_bounded(m, max_size, output_cap=output_cap)
    return verdict, reports


# -- derivation tracing -------------------------------------------------------


@dataclass
class TraceStep:
    node: NodeAddress
    rule_index: int
    rule: Rule
    form: Tree


@dataclass
class DerivationTrace:
    machine: Transducer
    input: Tree
    steps: tuple[TraceStep, ...]
    final: Tree
    complete: bool

    @property
    def rule_tags(self) -> tuple[int, ...]:
        return tuple(step.rule_index for step in self.steps)


def _markers(form: Tree):
    """Sentential-form markers: (output address, state, input address)."""
    out = []

    def walk(node, path):
        if isinstance(node.label, StateOverNode):
            out.append((NodeAddress(path), node.label.state, node.label.node))
        for i, c in enumerate(node.children, start=1):
            walk(c, path + (i,))

    walk(form, ())
    return out


def _replace_at(form: Tree, addr: NodeAddress, replacement: Tree) -> Tree:
    def go(node, path):
        if path == addr.path:
            return replacement
        if addr.path[: len(path)] != path:
            return node
        return Tree(node.label, tuple(go(c, path + (i,)) for i, c in enumerate(node.children, start=1)))

    return go(form, ())


def _instantiate_rhs(rhs: Tree, input_addr: NodeAddress) -> Tree:
    lab = rhs.label
    if isinstance(lab, StateOverVariable):
        return Tree(StateOverNode(lab.state, input_addr.child(lab.index)))
    return Tree(lab, tuple(_instantiate_rhs(c, input_addr) for c in rhs.children))


def derivations(t: Transducer, tree: Tree):
    """Depth-first stream of maximal rewrite sequences from q0(input).

    At every step the candidate moves are all (pending marker, applicable
    rule) pairs, markers ordered by output address and rules in definition
    order; stuck markers (no applicable rule) simply stay, so a maximal
    sequence ends ground or in a stuck sentential form.
    """
    t._check_input(tree)
    rule_index = {id(r): i + 1 for i, r in enumerate(t.rules)}
    start = Tree(StateOverNode(t.initial, ROOT))

    def rec(form, steps):
        moves = []
        for addr, state, input_addr in sorted(_markers(form), key=lambda m: m[0].path):
            symbol = subtree_at(tree, input_addr).label
            for rule in t.rules_for(state, symbol):
                moves.append((addr, input_addr, rule))
        if not moves:
            yield steps, form
            return
        for addr, input_addr, rule in moves:
            new_form = _replace_at(form, addr, _instantiate_rhs(rule.rhs, input_addr))
            step = TraceStep(addr, rule_index[id(rule)], rule, new_form)
            yield from rec(new_form, steps + (step,))

    yield from rec(start, ())


def trace_derivation(t: Transducer, tree: Tree, branch: int = 0) -> DerivationTrace:
    """One maximal rewrite sequence; `branch` indexes the depth-first
    enumeration of all (node, rule) choice sequences."""
    got = list(islice(derivations(t, tree), branch, branch + 1))
    if not got:
        raise ValidationError("branch %d is out of range" % branch)
    steps, final = got[0]
    return DerivationTrace(t, tree, steps, final, final.is_ground())
