"""Independent oracles the implementation is checked against.

These deliberately avoid the package's evaluation code paths: translation by
brute-force sentential-form rewriting, composition by staged rewriting, and
look-ahead translation by materializing every relabeling.
"""

from ttc.trees import ROOT, StateOverNode, StateOverVariable, Tree, subtree_at


def rewrite_translate(t, source, state=None):
    """All ground outputs derivable from state(source) by exhaustively
    rewriting sentential forms, one marker at a time."""
    start = Tree(StateOverNode(state or t.initial, ROOT))
    outputs = set()
    stack = [start]
    seen = {start}
    while stack:
        form = stack.pop()
        spot = _first_marker(form, ())
        if spot is None:
            outputs.add(form)
            continue
        path, marker = spot
        subtree = subtree_at(source, marker.node)
        for rule in t.rules_for(marker.state, subtree.label):
            filled = _plug(rule.rhs, marker.node)
            new_form = _replace(form, path, filled)
            if new_form not in seen:
                seen.add(new_form)
                stack.append(new_form)
    return outputs


def _first_marker(form, path):
    if isinstance(form.label, StateOverNode):
        return path, form.label
    for i, child in enumerate(form.children, start=1):
        got = _first_marker(child, path + (i,))
        if got is not None:
            return got
    return None


def _plug(rhs, input_addr):
    lab = rhs.label
    if isinstance(lab, StateOverVariable):
        return Tree(StateOverNode(lab.state, input_addr.child(lab.index)))
    return Tree(lab, tuple(_plug(c, input_addr) for c in rhs.children))


def _replace(form, path, replacement):
    if not path:
        return replacement
    i = path[0]
    kids = list(form.children)
    kids[i - 1] = _replace(kids[i - 1], path[1:], replacement)
    return Tree(form.label, kids)


def staged_compose(stages, source):
    """Relational composition computed stage by stage with the rewrite oracle."""
    outs = {source}
    for stage in stages:
        step = set()
        for tree in outs:
            step |= rewrite_translate(stage, tree)
        outs = step
    return outs
