"""Evolution-step transition graph and atomic-proposition evaluation."""

from collections import deque
from dataclasses import dataclass, field

from membranes import core, lang
from membranes.engine import Bounds, evolution_step
from membranes.lang import MembError

STUTTER = ()


class GraphSizeError(MembError):
    """The state-space cap was exceeded; never silently truncated."""


@dataclass
class KripkeGraph:
    """Finite state graph: canonical configurations, labeled edges.

    Every state has at least one outgoing edge; deadlocks and
    bound-truncated states carry a stutter self-loop (empty label).
    """

    states: list
    edges: list                      # edges[i] = ((j, applied), ...)
    initial: int = 0
    deadlock: frozenset = frozenset()
    truncated: frozenset = frozenset()
    index: dict = field(default_factory=dict, repr=False)

    @property
    def state_count(self):
        return len(self.states)

    def successors(self, i):
        return self.edges[i]


def build_graph(config, spec, mode=None, bounds=None, max_states=100_000):
    """BFS closure of evolution_step from `config`.

    States at depth >= bounds.max_steps or holding >= bounds.max_objects
    objects become absorbing (stutter self-loop, truncated flag); genuine
    deadlocks get a stutter self-loop and the deadlock flag.  Exceeding
    `max_states` raises GraphSizeError.
    """
    if bounds is None:
        bounds = Bounds()
    start = core.canonicalize(config)
    states = [start]
    index = {start: 0}
    edges = []
    deadlock = set()
    truncated = set()
    queue = deque([(0, 0)])
    expanded = set()

    while queue:
        i, depth = queue.popleft()
        if i in expanded:
            continue
        expanded.add(i)
        cfg = states[i]
        over_bound = (
            (bounds.max_steps is not None and depth >= bounds.max_steps)
            or (bounds.max_objects is not None
                and core.num_objs_rec(cfg) >= bounds.max_objects))
        if over_bound:
            truncated.add(i)
            _ensure_edges(edges, i)
            edges[i] = ((i, STUTTER),)
            continue
        results = evolution_step(cfg, spec, mode)
        _ensure_edges(edges, i)
        if not results:
            deadlock.add(i)
            edges[i] = ((i, STUTTER),)
            continue
        out = []
        for res in results:
            j = index.get(res.config)
            if j is None:
                j = len(states)
                if j >= max_states:
                    raise GraphSizeError(
                        f"state space exceeds {max_states} states")
                index[res.config] = j
                states.append(res.config)
                queue.append((j, depth + 1))
            out.append((j, res.applied))
        edges[i] = tuple(sorted(set(out)))

    for i in range(len(states)):
        _ensure_edges(edges, i)

    return KripkeGraph(states=states, edges=edges, initial=0,
                       deadlock=frozenset(deadlock),
                       truncated=frozenset(truncated), index=index)


def _ensure_edges(edges, i):
    while len(edges) <= i:
        edges.append(((len(edges), STUTTER),))


# ---------------------------------------------------------------------------
# Atomic propositions

def eval_prop(prop, config):
    """Evaluate a ground atomic proposition on a configuration.

    isAlive and contains are existential over same-named membranes;
    count sums over all of them.
    """
    if isinstance(prop, lang.TrueF):
        return True
    if isinstance(prop, lang.FalseF):
        return False
    if isinstance(prop, lang.IsAlive):
        for _ in core.iter_membranes(config, prop.name):
            return True
        return False
    if isinstance(prop, lang.Contains):
        for item, _ in core.iter_membranes(config, prop.name):
            objects, _, _ = core.partition_soup(item[2])
            if core.soup_contains(prop.objects, objects):
                return True
        return False
    if isinstance(prop, lang.Brace):
        return _eval_cmp(prop.expr, config)
    raise MembError(f"not an atomic proposition: {prop!r}")


def _eval_cmp(cmp, config):
    left = _eval_nat(cmp.left, config)
    right = _eval_nat(cmp.right, config)
    op = cmp.op
    if op == "=":
        return left == right
    if op == "divides":
        return left > 0 and right % left == 0
    if op == "<":
        return left < right
    if op == "<=":
        return left <= right
    if op == ">":
        return left > right
    return left >= right


def _eval_nat(expr, config):
    if isinstance(expr, lang.NatLit):
        return expr.value
    if isinstance(expr, lang.Count):
        total = 0
        for item, count in core.iter_membranes(config, expr.name):
            objects, _, _ = core.partition_soup(item[2])
            total += count * core.count_submultiset(objects, expr.objects)
        return total
    left = _eval_nat(expr.left, config)
    right = _eval_nat(expr.right, config)
    if expr.op == "+":
        return left + right
    if expr.op == "*":
        return left * right
    return left ** right
