"""Temporal-logic checking over the evolution-step graph.

LTL properties are decided by a Büchi product with nested depth-first
search, producing rule-labeled lasso counterexamples.  Branching-time
properties are decided by fixpoint iteration; CTL embeds into the
fixpoint fragment by the standard translation.
"""

from dataclasses import dataclass

from membranes import core, lang
from membranes.buchi import ltl_to_buchi
from membranes.graph import STUTTER, eval_prop
from membranes.lang import MembError


@dataclass(frozen=True)
class Holds:
    pass


@dataclass(frozen=True)
class LassoCounterexample:
    """prefix . cycle^omega is a real path violating the formula.

    Both parts hold (state index, applied labels) pairs; each label is
    the one on the edge to the next state in the lasso (the last cycle
    entry's edge returns to the cycle start).
    """

    prefix: tuple
    cycle: tuple


@dataclass(frozen=True)
class StateSetResult:
    holds: bool
    states: frozenset


def verdict_holds(verdict):
    return isinstance(verdict, Holds) or (
        isinstance(verdict, StateSetResult) and verdict.holds)


# ---------------------------------------------------------------------------
# LTL via Büchi product + nested DFS

def check_ltl(graph, formula):
    """Holds iff every infinite path from the initial state satisfies
    the formula (the graph is stutter-extended, so all paths are
    infinite); otherwise returns a lasso counterexample."""
    ba = ltl_to_buchi(formula)
    valuations = _Valuations(graph, ba.atoms)

    def product_succ(state):
        s, q = state
        for t, _ in graph.edges[s]:
            val = valuations.get(t)
            for q2 in ba.succ[q]:
                if ba.state_accepts(q2, val):
                    yield (t, q2)

    init_val = valuations.get(graph.initial)
    initials = sorted((graph.initial, q) for q in ba.initial
                      if ba.state_accepts(q, init_val))

    # Nested DFS: blue search in postorder seeds a red search from each
    # accepting state, looking for a cycle back to the seed.
    blue = set()
    red = set()
    parent = {}

    for init in initials:
        if init in blue:
            continue
        parent[init] = None
        stack = [(init, iter(sorted(product_succ(init))))]
        blue.add(init)
        while stack:
            state, it = stack[-1]
            advanced = False
            for nxt in it:
                if nxt not in blue:
                    blue.add(nxt)
                    parent[nxt] = state
                    stack.append((nxt, iter(sorted(product_succ(nxt)))))
                    advanced = True
                    break
            if advanced:
                continue
            stack.pop()
            if state[1] in ba.accepting:
                cycle = _red_search(state, product_succ, red)
                if cycle is not None:
                    return _build_lasso(graph, parent, state, cycle)
    return Holds()


def _red_search(seed, product_succ, red):
    """Find a path seed -> ... -> seed; returns it as a state list."""
    rparent = {}
    stack = [seed]
    local = set()
    while stack:
        state = stack.pop()
        for nxt in sorted(product_succ(state)):
            if nxt == seed:
                path = [state]
                while path[-1] != seed:
                    path.append(rparent[path[-1]])
                path.reverse()
                return path + [seed]
            if nxt not in red and nxt not in local:
                local.add(nxt)
                rparent[nxt] = state
                stack.append(nxt)
    red |= local
    red.add(seed)
    return None


def _build_lasso(graph, parent, seed, cycle_states):
    chain = []
    state = seed
    while state is not None:
        chain.append(state)
        state = parent.get(state)
    chain.reverse()                      # init .. seed
    prefix_states = [s for s, _ in chain[:-1]]
    cycle_graph = [s for s, _ in cycle_states[:-1]]  # seed .. last

    def edge_label(a, b):
        for t, applied in graph.edges[a]:
            if t == b:
                return applied
        raise MembError("counterexample edge vanished from the graph")

    prefix = []
    walk = prefix_states + [cycle_graph[0]]
    for a, b in zip(walk, walk[1:]):
        prefix.append((a, edge_label(a, b)))
    cycle = []
    for i, a in enumerate(cycle_graph):
        b = cycle_graph[(i + 1) % len(cycle_graph)]
        cycle.append((a, edge_label(a, b)))
    # The product may revisit a graph state with a different automaton
    # state before closing the cycle; rotate such repeats out of the
    # prefix so the printed lasso is minimal.
    while prefix and prefix[-1][0] == cycle[-1][0]:
        cycle = [prefix.pop()] + cycle[:-1]
    return LassoCounterexample(prefix=tuple(prefix), cycle=tuple(cycle))


class _Valuations:
    def __init__(self, graph, atoms):
        self.graph = graph
        self.atoms = atoms
        self.cache = {}

    def get(self, i):
        val = self.cache.get(i)
        if val is None:
            cfg = self.graph.states[i]
            val = frozenset(a for a in self.atoms if eval_prop(a, cfg))
            self.cache[i] = val
        return val


# ---------------------------------------------------------------------------
# Fixpoint fragment

def check_mu(graph, formula):
    """Denotation of a closed fixpoint formula; holds iff the initial
    state is in it.  Box/Diamond range over all edges, stutter included."""
    nnf = mu_nnf(formula)
    states = check_denotation(graph, nnf)
    return StateSetResult(graph.initial in states, states)


def mu_nnf(formula):
    """Push negations to the atoms, dualizing fixpoints and modalities."""
    return _mu_nnf(formula, False, frozenset())


def _mu_nnf(f, neg, flipped):
    if isinstance(f, (lang.TrueF, lang.FalseF)):
        if neg:
            return lang.FalseF() if isinstance(f, lang.TrueF) else lang.TrueF()
        return f
    if isinstance(f, (lang.IsAlive, lang.Contains, lang.Brace)):
        return lang.Not(f) if neg else f
    if isinstance(f, lang.FixVar):
        if neg != (f.name in flipped):
            raise MembError(
                f"fixpoint variable {f.name} occurs under negation")
        return f
    if isinstance(f, lang.Not):
        return _mu_nnf(f.operand, not neg, flipped)
    if isinstance(f, lang.And):
        cls = lang.Or if neg else lang.And
        return cls(_mu_nnf(f.left, neg, flipped),
                   _mu_nnf(f.right, neg, flipped))
    if isinstance(f, lang.Or):
        cls = lang.And if neg else lang.Or
        return cls(_mu_nnf(f.left, neg, flipped),
                   _mu_nnf(f.right, neg, flipped))
    if isinstance(f, lang.Implies):
        return _mu_nnf(lang.Or(lang.Not(f.left), f.right), neg, flipped)
    if isinstance(f, lang.Box):
        cls = lang.Diamond if neg else lang.Box
        return cls(_mu_nnf(f.operand, neg, flipped))
    if isinstance(f, lang.Diamond):
        cls = lang.Box if neg else lang.Diamond
        return cls(_mu_nnf(f.operand, neg, flipped))
    if isinstance(f, lang.Mu):
        if neg:
            return lang.Nu(f.var, _mu_nnf(f.body, True, flipped | {f.var}))
        return lang.Mu(f.var, _mu_nnf(f.body, False, flipped - {f.var}))
    if isinstance(f, lang.Nu):
        if neg:
            return lang.Mu(f.var, _mu_nnf(f.body, True, flipped | {f.var}))
        return lang.Nu(f.var, _mu_nnf(f.body, False, flipped - {f.var}))
    raise MembError(f"not a fixpoint formula: {f!r}")


def check_denotation(graph, formula, env=None):
    """Evaluate a negation-normal fixpoint formula to a state set."""
    env = env or {}
    n = graph.state_count
    full = frozenset(range(n))

    if isinstance(formula, lang.TrueF):
        return full
    if isinstance(formula, lang.FalseF):
        return frozenset()
    if isinstance(formula, (lang.IsAlive, lang.Contains, lang.Brace)):
        return frozenset(i for i in range(n)
                         if eval_prop(formula, graph.states[i]))
    if isinstance(formula, lang.Not):
        return full - check_denotation(graph, formula.operand, env)
    if isinstance(formula, lang.And):
        return (check_denotation(graph, formula.left, env)
                & check_denotation(graph, formula.right, env))
    if isinstance(formula, lang.Or):
        return (check_denotation(graph, formula.left, env)
                | check_denotation(graph, formula.right, env))
    if isinstance(formula, lang.FixVar):
        return env[formula.name]
    if isinstance(formula, lang.Box):
        inner = check_denotation(graph, formula.operand, env)
        return frozenset(i for i in range(n)
                         if all(t in inner for t, _ in graph.edges[i]))
    if isinstance(formula, lang.Diamond):
        inner = check_denotation(graph, formula.operand, env)
        return frozenset(i for i in range(n)
                         if any(t in inner for t, _ in graph.edges[i]))
    if isinstance(formula, (lang.Mu, lang.Nu)):
        current = frozenset() if isinstance(formula, lang.Mu) else full
        while True:
            env2 = dict(env)
            env2[formula.var] = current
            new = check_denotation(graph, formula.body, env2)
            if new == current:
                return current
            current = new
    raise MembError(f"not a fixpoint formula: {formula!r}")


# ---------------------------------------------------------------------------
# CTL via the fixpoint fragment

def ctl_to_mu(formula):
    """Standard embedding of CTL into the fixpoint fragment.

    Valid on total transition relations (the graph is stutter-extended).
    """
    counter = [0]

    def fresh():
        counter[0] += 1
        return f"Z{counter[0]}"

    def tr(f):
        if isinstance(f, (lang.TrueF, lang.FalseF, lang.IsAlive,
                          lang.Contains, lang.Brace)):
            return f
        if isinstance(f, lang.Not):
            return lang.Not(tr(f.operand))
        if isinstance(f, lang.And):
            return lang.And(tr(f.left), tr(f.right))
        if isinstance(f, lang.Or):
            return lang.Or(tr(f.left), tr(f.right))
        if isinstance(f, lang.Implies):
            return lang.Implies(tr(f.left), tr(f.right))
        if isinstance(f, (lang.Exists, lang.ForAll)):
            exists = isinstance(f, lang.Exists)
            path = f.path
            step = lang.Diamond if exists else lang.Box
            if isinstance(path, lang.Next):
                return step(tr(path.operand))
            if isinstance(path, lang.Eventually):
                var = fresh()
                return lang.Mu(var, lang.Or(tr(path.operand),
                                            step(lang.FixVar(var))))
            if isinstance(path, lang.Always):
                var = fresh()
                return lang.Nu(var, lang.And(tr(path.operand),
                                             step(lang.FixVar(var))))
            if isinstance(path, lang.Until):
                var = fresh()
                return lang.Mu(var, lang.Or(
                    tr(path.right),
                    lang.And(tr(path.left), step(lang.FixVar(var)))))
        raise MembError(f"not a CTL formula: {formula!r}")

    return tr(formula)


def check_formula(graph, formula):
    """Dispatch on the formula's temporal layer."""
    layer = lang.formula_layer(formula)
    if layer in (lang.LTL_LAYER, lang.PROP_LAYER):
        return check_ltl(graph, formula)
    if layer == lang.CTL_LAYER:
        return check_mu(graph, ctl_to_mu(formula))
    return check_mu(graph, formula)


# ---------------------------------------------------------------------------
# Counterexample rendering

def format_trace(verdict, graph, sep="·"):
    """Text form of a lasso: '| ' prefix states, 'X ' cycle states,
    transitions as 'v with <labels> in <membrane>, ...'."""
    if not isinstance(verdict, LassoCounterexample):
        raise MembError("verdict is not a counterexample")
    entries = list(verdict.prefix) + list(verdict.cycle)
    marks = ["|"] * len(verdict.prefix) + ["X"] * len(verdict.cycle)
    lines = []
    for i, ((state, applied), mark) in enumerate(zip(entries, marks)):
        lines.append(f"{mark} {core.render_configuration(graph.states[state], sep)}")
        if i + 1 < len(entries):
            lines.append("v " + render_applied(applied))
    return "\n".join(lines)


def render_applied(applied):
    if applied == STUTTER:
        return "(stutter)"
    parts = []
    for name, labels in applied:
        text = " ".join(label for label, count in labels
                        for _ in range(count))
        parts.append(f"{text} in {name}")
    return "with " + ", ".join(parts)
