"""LTL to Büchi automaton translation (tableau construction).

:func:`ltl_to_buchi` builds an automaton accepting exactly the infinite
words that *violate* the given formula, i.e. the models of its negation;
this is the shape the product-based emptiness check needs.  Guards sit on
states: a run over a word w is a state sequence q1 q2 ... with q1 initial
and w[i] satisfying the literal constraints of q(i+1).
"""

from dataclasses import dataclass

from membranes import lang


@dataclass(frozen=True)
class _Release:
    left: object
    right: object


@dataclass
class BuchiAutomaton:
    atoms: tuple          # atomic subformulas, the alphabet basis
    n_states: int
    initial: frozenset    # state ids
    accepting: frozenset
    pos: list             # pos[q] = frozenset of atoms that must hold
    neg: list             # neg[q] = frozenset of atoms that must not hold
    succ: list            # succ[q] = tuple of state ids

    def state_accepts(self, q, valuation):
        """Does entering state q match a set of true atoms?"""
        return self.pos[q] <= valuation and not (self.neg[q] & valuation)


def _is_atom(f):
    return isinstance(f, (lang.IsAlive, lang.Contains, lang.Brace))


def nnf_negate(f):
    """Negation normal form of the negation of an LTL formula."""
    return _nnf(f, True)


def _nnf(f, neg):
    if isinstance(f, lang.TrueF):
        return lang.FalseF() if neg else f
    if isinstance(f, lang.FalseF):
        return lang.TrueF() if neg else f
    if _is_atom(f):
        return lang.Not(f) if neg else f
    if isinstance(f, lang.Not):
        return _nnf(f.operand, not neg)
    if isinstance(f, lang.And):
        cls = lang.Or if neg else lang.And
        return cls(_nnf(f.left, neg), _nnf(f.right, neg))
    if isinstance(f, lang.Or):
        cls = lang.And if neg else lang.Or
        return cls(_nnf(f.left, neg), _nnf(f.right, neg))
    if isinstance(f, lang.Implies):
        return _nnf(lang.Or(lang.Not(f.left), f.right), neg)
    if isinstance(f, lang.Next):
        return lang.Next(_nnf(f.operand, neg))
    if isinstance(f, lang.Always):
        if neg:
            return lang.Until(lang.TrueF(), _nnf(f.operand, True))
        return _Release(lang.FalseF(), _nnf(f.operand, False))
    if isinstance(f, lang.Eventually):
        if neg:
            return _Release(lang.FalseF(), _nnf(f.operand, True))
        return lang.Until(lang.TrueF(), _nnf(f.operand, False))
    if isinstance(f, lang.Until):
        if neg:
            return _Release(_nnf(f.left, True), _nnf(f.right, True))
        return lang.Until(_nnf(f.left, False), _nnf(f.right, False))
    if isinstance(f, _Release):
        if neg:
            return lang.Until(_nnf(f.left, True), _nnf(f.right, True))
        return _Release(_nnf(f.left, False), _nnf(f.right, False))
    raise lang.MembError(f"not an LTL formula: {f!r}")


class _Node:
    __slots__ = ("id", "incoming", "new", "old", "next")

    def __init__(self, id, incoming, new, old, next):
        self.id = id
        self.incoming = incoming
        self.new = new
        self.old = old
        self.next = next


def _tableau(psi):
    """Classic node-expansion construction over the NNF formula `psi`."""
    INIT = -1
    nodes = []
    counter = [0]

    def fresh(incoming, new, old, next):
        counter[0] += 1
        return _Node(counter[0], set(incoming), set(new), set(old), set(next))

    stack = [fresh({INIT}, {psi}, set(), set())]
    while stack:
        node = stack.pop()
        if not node.new:
            merged = False
            for q in nodes:
                if q.old == node.old and q.next == node.next:
                    q.incoming |= node.incoming
                    merged = True
                    break
            if not merged:
                nodes.append(node)
                stack.append(fresh({node.id}, set(node.next), set(), set()))
            continue
        f = node.new.pop()
        if isinstance(f, lang.TrueF):
            stack.append(node)
        elif isinstance(f, lang.FalseF):
            pass  # contradiction: drop the node
        elif _is_atom(f) or (isinstance(f, lang.Not) and _is_atom(f.operand)):
            contradiction = (lang.Not(f) in node.old
                             or (isinstance(f, lang.Not)
                                 and f.operand in node.old))
            if not contradiction:
                node.old.add(f)
                stack.append(node)
        elif isinstance(f, lang.And):
            node.old.add(f)
            node.new |= {f.left, f.right} - node.old
            stack.append(node)
        elif isinstance(f, lang.Next):
            node.old.add(f)
            node.next.add(f.operand)
            stack.append(node)
        elif isinstance(f, (lang.Or, lang.Until, _Release)):
            node.old.add(f)
            if isinstance(f, lang.Or):
                first_new, first_next = {f.left}, set()
                second_new = {f.right}
            elif isinstance(f, lang.Until):
                first_new, first_next = {f.left}, {f}
                second_new = {f.right}
            else:
                first_new, first_next = {f.right}, {f}
                second_new = {f.left, f.right}
            n1 = fresh(node.incoming, node.new | (first_new - node.old),
                       node.old, node.next | first_next)
            n2 = fresh(node.incoming, node.new | (second_new - node.old),
                       node.old, node.next)
            stack.extend((n1, n2))
        else:
            raise lang.MembError(f"unexpected formula node {f!r}")
    return nodes, INIT


def _collect_atoms(psi, acc):
    if _is_atom(psi):
        acc.append(psi)
    elif isinstance(psi, lang.Not):
        _collect_atoms(psi.operand, acc)
    elif isinstance(psi, (lang.And, lang.Or, lang.Until, _Release)):
        _collect_atoms(psi.left, acc)
        _collect_atoms(psi.right, acc)
    elif isinstance(psi, lang.Next):
        _collect_atoms(psi.operand, acc)


def _until_subformulas(psi, acc):
    if isinstance(psi, lang.Until):
        acc.add(psi)
    if isinstance(psi, (lang.And, lang.Or, lang.Until, _Release)):
        _until_subformulas(psi.left, acc)
        _until_subformulas(psi.right, acc)
    elif isinstance(psi, (lang.Next, lang.Not)):
        _until_subformulas(psi.operand, acc)


def ltl_to_buchi(formula):
    """Automaton for the *negation* of `formula` (its violating words)."""
    psi = nnf_negate(formula)
    nodes, INIT = _tableau(psi)

    atoms = []
    _collect_atoms(psi, atoms)
    atoms = tuple(dict.fromkeys(atoms))

    untils = set()
    _until_subformulas(psi, untils)
    untils = sorted(untils, key=repr)

    # Generalized acceptance: one set per Until subformula.
    gba_sets = []
    for u in untils:
        gba_sets.append(frozenset(
            q.id for q in nodes if u not in q.old or u.right in q.old))

    by_id = {q.id: q for q in nodes}
    gba_succ = {q.id: tuple(sorted(
        p.id for p in nodes if q.id in p.incoming)) for q in nodes}
    gba_initial = frozenset(q.id for q in nodes if INIT in q.incoming)

    def literals(q):
        pos = frozenset(f for f in q.old if _is_atom(f))
        neg = frozenset(f.operand for f in q.old
                        if isinstance(f, lang.Not) and _is_atom(f.operand))
        return pos, neg

    k = len(gba_sets)
    if k == 0:
        ids = sorted(by_id)
        remap = {qid: i for i, qid in enumerate(ids)}
        pos, neg, succ = [], [], []
        for qid in ids:
            p, n = literals(by_id[qid])
            pos.append(p)
            neg.append(n)
            succ.append(tuple(remap[t] for t in gba_succ[qid]))
        return BuchiAutomaton(
            atoms=atoms, n_states=len(ids),
            initial=frozenset(remap[q] for q in gba_initial),
            accepting=frozenset(range(len(ids))),
            pos=pos, neg=neg, succ=succ)

    # Degeneralize with the counter construction: state (q, i) tracks the
    # next acceptance set to satisfy; i advances when q is in set i.
    ids = sorted(by_id)
    product_ids = {}
    for qid in ids:
        for i in range(k):
            product_ids[(qid, i)] = len(product_ids)
    pos = [None] * len(product_ids)
    neg = [None] * len(product_ids)
    succ = [None] * len(product_ids)
    for (qid, i), s in product_ids.items():
        p, n = literals(by_id[qid])
        pos[s] = p
        neg[s] = n
        nxt = (i + 1) % k if qid in gba_sets[i] else i
        succ[s] = tuple(product_ids[(t, nxt)] for t in gba_succ[qid])
    accepting = frozenset(product_ids[(qid, 0)]
                          for qid in ids if qid in gba_sets[0])
    initial = frozenset(product_ids[(qid, 0)] for qid in gba_initial)
    return BuchiAutomaton(
        atoms=atoms, n_states=len(product_ids), initial=initial,
        accepting=accepting, pos=pos, neg=neg, succ=succ)


# ---------------------------------------------------------------------------
# Semantic LTL evaluation on lasso words (independent oracle used by the
# test suite to validate the construction by language sampling).

def ltl_holds_on_lasso(prefix, cycle, formula):
    """Evaluate an LTL formula on the word prefix . cycle^omega.

    `prefix` and `cycle` are sequences of valuations (sets of atoms that
    hold); `cycle` must be nonempty.
    """
    word = list(prefix) + list(cycle)
    n = len(word)
    cycle_start = len(prefix)

    def nxt(i):
        return i + 1 if i + 1 < n else cycle_start

    memo = {}

    def ev(f, i):
        key = (f, i)
        if key in memo:
            return memo[key]
        if isinstance(f, lang.TrueF):
            result = True
        elif isinstance(f, lang.FalseF):
            result = False
        elif _is_atom(f):
            result = f in word[i]
        elif isinstance(f, lang.Not):
            result = not ev(f.operand, i)
        elif isinstance(f, lang.And):
            result = ev(f.left, i) and ev(f.right, i)
        elif isinstance(f, lang.Or):
            result = ev(f.left, i) or ev(f.right, i)
        elif isinstance(f, lang.Implies):
            result = (not ev(f.left, i)) or ev(f.right, i)
        elif isinstance(f, lang.Next):
            result = ev(f.operand, nxt(i))
        elif isinstance(f, lang.Always):
            result = all(ev(f.operand, j) for j in _positions_from(i, n,
                                                                   cycle_start))
        elif isinstance(f, lang.Eventually):
            result = any(ev(f.operand, j) for j in _positions_from(i, n,
                                                                   cycle_start))
        elif isinstance(f, lang.Until):
            result = False
            for j in _positions_from(i, n, cycle_start):
                if ev(f.right, j):
                    result = True
                    break
                if not ev(f.left, j):
                    break
        else:
            raise lang.MembError(f"not an LTL formula: {f!r}")
        memo[key] = result
        return result

    return ev(formula, 0)


def _positions_from(i, n, cycle_start):
    """Positions visited from i onward (each recurring position once)."""
    seen = []
    j = i
    while j not in seen:
        seen.append(j)
        j = j + 1 if j + 1 < n else cycle_start
    return seen
