"""Textual rule-application expressions for prioritized membranes.

For a priority relation given by generator pairs (higher, lower), the
weak expression guards every rule by the disjunction of its immediate
predecessors using ``or-else``, starting from the minimal elements;
disjuncts sharing a guard are factored on the fly.  The strong expression
additionally threads the set of already-applied labels through recursive
``mpr-strong`` calls, guarding each rule by an emptiness test against
the labels above it.

Precedence when rendering: ``;`` binds tighter than ``|``, which binds
tighter than ``or-else`` (left-associative).
"""

# AST nodes: ("r", text) leaf; ("|", (children...)); ("oe", left, right).


def _disj(children):
    """Disjunction node, factoring `a or-else b | a or-else c`."""
    out = []
    for child in children:
        if child[0] == "oe":
            for i, prev in enumerate(out):
                if prev[0] == "oe" and prev[1] == child[1]:
                    merged_right = _disj([prev[2], child[2]])
                    out[i] = ("oe", prev[1], merged_right)
                    break
            else:
                out.append(child)
        else:
            out.append(child)
    if len(out) == 1:
        return out[0]
    return ("|", tuple(out))


def _render(node):
    if node[0] == "r":
        return node[1]
    if node[0] == "|":
        parts = []
        for child in node[1]:
            text = _render(child)
            if child[0] == "oe":
                text = f"({text})"
            parts.append(text)
        return " | ".join(parts)
    left, right = node[1], node[2]
    left_text = _render(left)
    right_text = _render(right)
    if right[0] == "oe":
        right_text = f"({right_text})"
    return f"{left_text} or-else {right_text}"


def _relation_parts(rules, priority):
    rules = sorted(set(rules))
    in_relation = set()
    preds = {}
    for hi, lo in priority:
        in_relation.add(hi)
        in_relation.add(lo)
        preds.setdefault(lo, set()).add(hi)
    minimals = sorted(label for label in in_relation
                      if label not in {hi for hi, _ in priority})
    free = [label for label in rules if label not in in_relation]
    return minimals, free, preds


def weak_expression_ast(rules, priority, leaf=None):
    leaf = leaf or (lambda label: ("r", label))
    minimals, free, preds = _relation_parts(rules, priority)

    def extend(label):
        above = sorted(preds.get(label, ()))
        if not above:
            return leaf(label)
        guard = _disj([extend(p) for p in above])
        return ("oe", guard, leaf(label))

    children = [extend(m) for m in minimals] + [leaf(l) for l in free]
    if not children:
        return ("r", "idle")
    return _disj(children)


def weak_priority_expression(rules, priority):
    """Rule-application expression for the weak reading of priorities."""
    return _render(weak_expression_ast(rules, priority))


def strong_priority_expression(rules, priority, membrane="M"):
    """Expression for the strong reading: every application recurses with
    the applied-label set extended, and guarded rules test that no higher
    label has been applied.  Terminated by ``or-else idle``."""
    rules = sorted(set(rules))
    if not rules:
        return "idle"
    minimals, free, preds = _relation_parts(rules, priority)

    closure = _transitive_higher(rules, priority)

    def alpha(label):
        return ("r", f"{label} ; mpr-strong({membrane}, ('{label}, AR))")

    def extend(label):
        above = sorted(preds.get(label, ()))
        if not above:
            return alpha(label)
        guard = _disj([extend(p) for p in above])
        qids = ", ".join(f"'{l}" for l in sorted(closure[label]))
        guarded = ("r", f"match H s.t. intersection(({qids}), AR) = empty ; "
                        f"{alpha(label)[1]}")
        return ("oe", guard, guarded)

    children = [alpha(l) for l in free] + [extend(m) for m in minimals]
    body = _disj(children)
    return _render(("oe", body, ("r", "idle")))


def _transitive_higher(rules, priority):
    direct = {}
    for hi, lo in priority:
        direct.setdefault(lo, set()).add(hi)
    closure = {}

    def walk(label, seen):
        if label in closure:
            return closure[label]
        acc = set()
        for hi in direct.get(label, ()):
            acc.add(hi)
            if hi not in seen:
                acc |= walk(hi, seen | {label})
        closure[label] = acc
        return acc

    return {label: walk(label, frozenset()) for label in rules}
