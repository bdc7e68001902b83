"""Renderers: definition-language text, JSON, and DOT for machines, traces,
build reports, and verdicts.

Constructed machines may carry structured state ids ("(q,{p0})") and
annotated symbols that are not legal names in the definition language; the
text serializer then renames them canonically (s0, s1, ... / c0, c1, ...,
sorted by rendering) and records the mapping in comments, so serialized
output always reparses.
"""

from __future__ import annotations

import hashlib
import json

from .constructions import BuildReport, CompositionChain
from .decision import DerivationTrace, Verdict
from .machines import LookaheadTransducer, Rule, StateId, Transducer
from .trees import NAME_RE, AnnotatedSymbol, StateOverVariable, Tree, sort_trees


import re


def _safe(name) -> bool:
    return isinstance(name, str) and NAME_RE.fullmatch(name) is not None


def _safe_name(name: str) -> str:
    if _safe(name):
        return name
    cleaned = re.sub(r"_+", "_", re.sub(r"[^A-Za-z0-9_']", "_", name)).strip("_")
    if not cleaned or not re.match(r"[A-Za-z_]", cleaned):
        cleaned = "m_" + cleaned
    return cleaned


def _state_map(machines) -> dict[StateId, str]:
    states = sorted({s for m in machines for s in m.states}, key=lambda s: s.name)
    if all(_safe(s.name) for s in states):
        return {s: s.name for s in states}
    return {s: "s%d" % i for i, s in enumerate(states)}


def _symbol_map(machines) -> dict[object, str]:
    symbols = []
    for m in machines:
        for alpha in (m.input_alphabet, m.output_alphabet):
            for sym in alpha:
                if sym not in symbols:
                    symbols.append(sym)
    return {sym: sym if _safe(sym) else _content_name(sym) for sym in symbols}


def _content_name(sym) -> str:
    """Deterministic name derived from the symbol itself, so the same symbol
    renders identically in every block (chains stay alphabet-compatible)."""
    text = str(sym)
    body = re.sub(r"_+", "_", re.sub(r"[^A-Za-z0-9_']", "_", text)).strip("_")[:24]
    digest = hashlib.sha1(text.encode("utf-8")).hexdigest()[:6]
    if not body or not re.match(r"[A-Za-z_]", body):
        body = "c"
    return "%s_%s" % (body, digest)


def _render_rhs(tree: Tree, states, symbols) -> str:
    lab = tree.label
    if isinstance(lab, StateOverVariable):
        return "%s(x%d)" % (states[lab.state], lab.index)
    head = symbols[lab]
    if not tree.children:
        return head
    return "%s(%s)" % (head, ", ".join(_render_rhs(c, states, symbols) for c in tree.children))


def _render_rule(rule: Rule, states, symbols, la_states=None) -> str:
    if rule.variables == 0:
        lhs = "%s(%s)" % (states[rule.state], symbols[rule.symbol])
    elif rule.lookahead is None:
        args = ", ".join("x%d" % i for i in range(1, rule.variables + 1))
        lhs = "%s(%s(%s))" % (states[rule.state], symbols[rule.symbol], args)
    else:
        args = ", ".join(
            "x%d:%s" % (i, la_states[l]) for i, l in enumerate(rule.lookahead, start=1)
        )
        lhs = "%s(%s(%s))" % (states[rule.state], symbols[rule.symbol], args)
    return "%s -> %s" % (lhs, _render_rhs(rule.rhs, states, symbols))


def _render_alphabet(alpha, symbols) -> str:
    return "{ %s }" % ", ".join("%s:%d" % (symbols[s], r) for s, r in alpha.items())


def _mapping_comments(mapping, kind) -> list[str]:
    lines = []
    for orig, renamed in mapping.items():
        label = orig.name if isinstance(orig, StateId) else str(orig)
        if label != renamed:
            lines.append("# %s %s = %s" % (kind, renamed, label))
    return lines


def _grouped_rules(rules):
    groups = []
    for rule in rules:
        key = (rule.state, rule.symbol, rule.lookahead)
        if groups and groups[-1][0] == key:
            groups[-1][1].append(rule)
        else:
            groups.append((key, [rule]))
    return groups


def _transducer_block(t: Transducer, name, states, symbols, strip_lookahead=False) -> str:
    lines = _mapping_comments(states, "state") + _mapping_comments(symbols, "symbol")
    lines.append("transducer %s {" % name)
    lines.append("  input %s" % _render_alphabet(t.input_alphabet, symbols))
    lines.append("  output %s" % _render_alphabet(t.output_alphabet, symbols))
    lines.append("  initial %s" % states[t.initial])
    undeclared = t.states - {t.initial} - {r.state for r in t.rules}
    if undeclared:
        lines.append("  states { %s }" % ", ".join(sorted(states[s] for s in undeclared)))
    lines.append("  rules {")
    for _key, group in _grouped_rules(t.rules):
        first = group[0]
        if strip_lookahead and first.lookahead is not None:
            first = Rule(first.state, first.symbol, first.variables, first.rhs)
        rendered = _render_rule(first, states, symbols)
        for extra in group[1:]:
            rendered += " | %s" % _render_rhs(extra.rhs, states, symbols)
        lines.append("    %s;" % rendered)
    lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def serialize_transducer(t: Transducer, name: str | None = None) -> str:
    return _transducer_block(t, _safe_name(name or t.name), _state_map([t]), _symbol_map([t]))


def serialize_lookahead(m: LookaheadTransducer, name: str | None = None) -> str:
    """Three blocks: the base as a plain transducer (annotations stripped, it
    only declares states and alphabets), the look-ahead automaton, and the
    lookahead block holding the annotated rules."""
    name = _safe_name(name or m.name)
    base_states = _state_map([m.base])
    la_states = _state_map([m.la])
    symbols = _symbol_map([m.base])
    out = [
        _transducer_block(m.base, "%s_base" % name, base_states, symbols, strip_lookahead=True),
        _transducer_block(m.la, "%s_la" % name, la_states, _symbol_map([m.la])),
    ]
    lines = ["lookahead %s {" % name]
    lines.append("  base %s_base" % name)
    lines.append("  la %s_la" % name)
    lines.append("  rules {")
    for _key, group in _grouped_rules(m.base.rules):
        rendered = _render_rule(group[0], base_states, symbols, la_states)
        for extra in group[1:]:
            rendered += " | %s" % _render_rhs(extra.rhs, base_states, symbols)
        lines.append("    %s;" % rendered)
    lines.append("  }")
    lines.append("}")
    out.append("\n".join(lines) + "\n")
    return "\n".join(out)


def serialize_machine(machine, name: str | None = None) -> str:
    if isinstance(machine, LookaheadTransducer):
        return serialize_lookahead(machine, name)
    return serialize_transducer(machine, name)


def serialize_chain(chain: CompositionChain, name: str = "chain") -> str:
    blocks = [serialize_transducer(t, name="%s_%d" % (name, i)) for i, t in enumerate(chain.stages, 1)]
    blocks.append("chain %s { %s }\n" % (name, ", ".join("%s_%d" % (name, i) for i in range(1, len(chain.stages) + 1))))
    return "\n".join(blocks)


# -- JSON ---------------------------------------------------------------------


def tree_json(tree: Tree):
    lab = tree.label
    if isinstance(lab, StateOverVariable):
        return {"state": lab.state.name, "variable": lab.index}
    return {"symbol": symbol_json(lab), "children": [tree_json(c) for c in tree.children]}


def symbol_json(sym):
    if isinstance(sym, AnnotatedSymbol):
        return {"name": sym.name, "annotations": [str(a) for a in sym.annotations]}
    return sym


def rule_json(rule: Rule):
    out = {
        "state": rule.state.name,
        "symbol": symbol_json(rule.symbol),
        "variables": rule.variables,
        "rhs": tree_json(rule.rhs),
    }
    if rule.lookahead is not None:
        out["lookahead"] = [l.name for l in rule.lookahead]
    return out


def alphabet_json(alpha):
    return [{"symbol": symbol_json(s), "rank": r} for s, r in alpha.items()]


def transducer_json(t: Transducer):
    return {
        "kind": "transducer",
        "name": t.name,
        "input": alphabet_json(t.input_alphabet),
        "output": alphabet_json(t.output_alphabet),
        "initial": t.initial.name,
        "states": sorted(s.name for s in t.states),
        "rules": [rule_json(r) for r in t.rules],
    }


def machine_json(machine):
    if isinstance(machine, LookaheadTransducer):
        base = transducer_json(machine.base)
        base["kind"] = "lookahead-transducer"
        base["la"] = transducer_json(machine.la)
        return base
    return transducer_json(machine)


def verdict_json(verdict: Verdict):
    ce = None
    if verdict.counterexample is not None:
        ce = {
            "input": verdict.counterexample.input.text,
            "outputs": [o.text for o in verdict.counterexample.outputs],
        }
    return {
        "status": verdict.status,
        "bound": verdict.bound,
        "counterexample": ce,
        "stats": verdict.stats,
    }


def report_json(report: BuildReport):
    return {
        "label": report.label,
        "machine": report.machine.name,
        "states_before": report.states_before,
        "states_after": report.states_after,
        "provenance": {s.name: desc for s, desc in sorted(report.provenance.items(), key=lambda kv: kv[0].name)},
        "stats": report.stats,
    }


def trace_json(trace: DerivationTrace):
    return {
        "machine": trace.machine.name,
        "input": trace.input.text,
        "complete": trace.complete,
        "final": trace.final.text,
        "steps": [
            {"node": str(s.node), "rule": s.rule_index, "form": s.form.text}
            for s in trace.steps
        ],
    }


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# -- DOT ----------------------------------------------------------------------


def _quote(s: str) -> str:
    return '"%s"' % s.replace("\\", "\\\\").replace('"', '\\"')


def machine_dot(machine) -> str:
    base = machine.base if isinstance(machine, LookaheadTransducer) else machine
    lines = ["digraph machine {", "  rankdir=LR;"]
    for s in sorted(base.states, key=lambda s: s.name):
        shape = "doubleoctagon" if s == base.initial else "ellipse"
        lines.append("  %s [shape=%s];" % (_quote(s.name), shape))
    for i, rule in enumerate(base.rules, start=1):
        targets = sorted({q for req in rule.child_states for q in req}, key=lambda s: s.name)
        label = "%d: %s" % (i, rule.lhs_text())
        if not targets:
            lines.append("  %s -> %s [label=%s, style=dotted];" % (_quote(rule.state.name), _quote(str(rule.rhs)), _quote(label)))
        for q in targets:
            lines.append("  %s -> %s [label=%s];" % (_quote(rule.state.name), _quote(q.name), _quote(label)))
    lines.append("}")
    return "\n".join(lines) + "\n"


def render_form(form: Tree, source: Tree) -> str:
    """Render a sentential form with each marker showing its input subtree."""
    from .trees import StateOverNode, subtree_at

    lab = form.label
    if isinstance(lab, StateOverNode):
        return "%s(%s)" % (lab.state, subtree_at(source, lab.node).text)
    if not form.children:
        return str(lab)
    return "%s(%s)" % (lab, ",".join(render_form(c, source) for c in form.children))


def trace_dot(trace: DerivationTrace) -> str:
    """The derivation chain: sentential forms as nodes, rule applications as edges."""
    lines = ["digraph derivation {", "  rankdir=LR;", "  node [shape=box];"]
    forms = ["%s(%s)" % (trace.machine.initial, trace.input.text)]
    for step in trace.steps:
        forms.append(render_form(step.form, trace.input))
    for i, form in enumerate(forms):
        lines.append("  n%d [label=%s];" % (i, _quote(form)))
    for i, step in enumerate(trace.steps):
        lines.append("  n%d -> n%d [label=%s];" % (i, i + 1, _quote("%d @ %s" % (step.rule_index, step.node))))
    lines.append("}")
    return "\n".join(lines) + "\n"


def verdict_dot(verdict: Verdict) -> str:
    lines = ["digraph verdict {", "  node [shape=box];"]
    lines.append("  status [label=%s];" % _quote("%s (bound %d)" % (verdict.status, verdict.bound)))
    if verdict.counterexample is not None:
        lines.append("  input [label=%s];" % _quote(verdict.counterexample.input.text))
        for i, out in enumerate(verdict.counterexample.outputs):
            lines.append("  out%d [label=%s];" % (i, _quote(out.text)))
            lines.append("  input -> out%d;" % i)
    lines.append("}")
    return "\n".join(lines) + "\n"


def verdict_text(verdict: Verdict) -> str:
    lines = ["%s (bound %d)" % (verdict.status, verdict.bound)]
    if verdict.counterexample is not None:
        lines.append("counterexample input: %s" % verdict.counterexample.input.text)
        for out in verdict.counterexample.outputs:
            lines.append("  output: %s" % out.text)
    lines.append(
        "inputs checked: %d, outputs computed: %d"
        % (verdict.stats.get("inputs_checked", 0), verdict.stats.get("outputs_computed", 0))
    )
    return "\n".join(lines) + "\n"


def trace_text(trace: DerivationTrace) -> str:
    lines = ["%s(%s)" % (trace.machine.initial, trace.input.text)]
    for step in trace.steps:
        lines.append(
            "  =%d@%s=> %s" % (step.rule_index, step.node, render_form(step.form, trace.input))
        )
    lines.append("complete" if trace.complete else "stuck")
    return "\n".join(lines) + "\n"


def report_text(report: BuildReport) -> str:
    return "%s: %s, states %d -> %d (%.3f ms)\n" % (
        report.label,
        report.machine.name,
        report.states_before,
        report.states_after,
        report.stats.get("elapsed_ms", 0.0),
    )


def outputs_text(trees) -> str:
    ordered = sort_trees(trees)
    if not ordered:
        return "(empty)\n"
    return "\n".join(t.text for t in ordered) + "\n"
