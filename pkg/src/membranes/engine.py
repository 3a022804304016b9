"""Evolution engine: maximal-parallel steps, communication, division,
dissolution, and multi-step computation.

An evolution step runs in phases: (1) each membrane applies a maximal
multiset of its rules, admissible for the selected priority mode, with
every product frozen inside a target message; (2) messages are delivered
(here/out/in); (3) division messages split their membrane; (4) membranes
holding ``delta`` dissolve.  Phase 1 is computed by exhaustive sequential
application with canonical-state memoization, which yields exactly the
maximal admissible multisets (the outcome set is independent of the
application order, so reorderings are collapsed by the memo table).

Promoters and inhibitors use static allocation: they are evaluated
against the membrane contents captured at the start of the step.
"""

import itertools
import logging
import weakref
from dataclasses import dataclass

from membranes import core, lang
from membranes import kernel as K
from membranes.lang import MembError, STRONG, WEAK

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Bounds:
    max_steps: int | None = None
    max_objects: int | None = None
    max_solutions: int | None = None

    def __post_init__(self):
        for name in ("max_steps", "max_objects", "max_solutions"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ValueError(f"{name} must be >= 1")


@dataclass(frozen=True)
class RuleInstance:
    rule: lang.RuleDef
    subst: tuple            # sorted (variable, value) pairs
    site: tuple             # () = top multiset; (object, start) inside object
    consumed: tuple         # object multiset removed on application
    produces: tuple         # message items added on application

    def sort_key(self):
        return (self.rule.label, self.subst, self.site)


@dataclass(frozen=True)
class StepResult:
    config: tuple
    applied: tuple          # ((membrane name, ((label, count), ...)), ...)


# ---------------------------------------------------------------------------
# Pattern matching and instantiation

def _unify_arg(pat, value, subst):
    """Extend subst to make the argument expression equal `value`."""
    tag = pat[0]
    if tag == "lit":
        lit = pat[1]
        if lit == value and isinstance(lit, bool) == isinstance(value, bool):
            return subst
        return None
    if tag == "var":
        name = pat[1]
        if name in subst:
            bound = subst[name]
            ok = bound == value and \
                isinstance(bound, bool) == isinstance(value, bool)
            return subst if ok else None
        new = dict(subst)
        new[name] = value
        return new
    if tag == "succ":
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            return None
        return _unify_arg(pat[1], value - 1, subst)
    # bnot
    if not isinstance(value, bool):
        return None
    return _unify_arg(pat[1], not value, subst)


def _match_object(pattern, obj, subst):
    if pattern[0] != core.COMPOUND:
        return subst if pattern == obj else None
    if obj[0] != core.COMPOUND or obj[1] != pattern[1] \
            or len(obj[2]) != len(pattern[2]):
        return None
    for pat_arg, val in zip(pattern[2], obj[2]):
        subst = _unify_arg(pat_arg, val, subst)
        if subst is None:
            return None
    return subst


def _match_soup(patterns, avail, subst, out):
    """Enumerate substitutions placing all `patterns` into `avail`.

    `patterns` is a flat list of object patterns; consumed copies are
    tracked by decrementing a mutable count list parallel to `avail`.
    """
    if not patterns:
        out.append(subst)
        return
    pattern, rest = patterns[0], patterns[1:]
    for i, (obj, _) in enumerate(avail):
        if avail[i][1] <= 0:
            continue
        new = _match_object(pattern, obj, subst)
        if new is not None:
            avail[i] = (obj, avail[i][1] - 1)
            _match_soup(rest, avail, new, out)
            avail[i] = (obj, avail[i][1] + 1)


def _soup_matches(pattern_soup, ground_soup, base=None):
    patterns = []
    for item, count in pattern_soup:
        patterns.extend([item] * count)
    # Ground patterns first: they prune without branching.
    patterns.sort(key=lambda p: (p[0] == core.COMPOUND, p))
    out = []
    _match_soup(patterns, list(ground_soup), base or {}, out)
    seen = set()
    result = []
    for subst in out:
        key = tuple(sorted(subst.items()))
        if key not in seen:
            seen.add(key)
            result.append(subst)
    return result


def _inst_arg(arg, subst):
    tag = arg[0]
    if tag == "lit":
        return arg[1]
    if tag == "var":
        return subst[arg[1]]
    if tag == "succ":
        return _inst_arg(arg[1], subst) + 1
    return not _inst_arg(arg[1], subst)


def _inst_object(pattern, subst):
    if pattern[0] != core.COMPOUND:
        return pattern
    return core.compound(pattern[1],
                         [_inst_arg(a, subst) for a in pattern[2]])


def _inst_soup(pattern_soup, subst):
    return K.from_pairs((_inst_object(item, subst), count)
                        for item, count in pattern_soup)


def _inst_messages(rule, subst):
    msgs = []
    for part in rule.rhs:
        if isinstance(part, lang.RhsDirected):
            msgs.append(core.directed(part.target,
                                      _inst_soup(part.payload, subst)))
        else:
            msgs.append(core.division(_inst_soup(part.left, subst),
                                      _inst_soup(part.right, subst)))
    return tuple(msgs)


# ---------------------------------------------------------------------------
# Applicability

def applicable_instances(mdef, soup, initial, identity=None):
    """All rule instances applicable to the (unfrozen) object soup.

    `initial` is the membrane's object multiset at the start of the step;
    promoters and inhibitors are evaluated against it (static allocation).
    """
    instances = []
    seen = set()
    for rule in mdef.rules:
        if rule.kind == lang.XEV:
            for inst in _xev_instances(rule, soup, identity):
                if inst.sort_key() not in seen:
                    seen.add(inst.sort_key())
                    instances.append(inst)
            continue
        for subst in _soup_matches(rule.lhs, soup):
            consumed = _inst_soup(rule.lhs, subst)
            if rule.kind == lang.CEV:
                full_substs = _cev_substs(rule, subst, initial)
            else:
                full_substs = [subst]
            for full in full_substs:
                produces = _inst_messages(rule, full)
                key = (rule.label, consumed, produces)
                if key in seen:
                    continue
                seen.add(key)
                instances.append(RuleInstance(
                    rule=rule,
                    subst=tuple(sorted(full.items())),
                    site=(),
                    consumed=consumed,
                    produces=produces))
    instances.sort(key=RuleInstance.sort_key)
    return instances


def _cev_substs(rule, subst, initial):
    """Extend a left-hand-side match over the promoters, then filter by
    the inhibitors; both checks run jointly with the lhs against the
    step-initial contents."""
    lhs_ground = _inst_soup(rule.lhs, subst)
    if not K.contains(lhs_ground, initial):
        return []
    remaining = K.subtract(initial, lhs_ground)
    if rule.promoters:
        candidates = _soup_matches(rule.promoters, remaining, base=subst)
    else:
        candidates = [subst]
    out = []
    for full in candidates:
        if rule.inhibitors:
            blocked = K.add(lhs_ground, _inst_soup(rule.inhibitors, full))
            if K.contains(blocked, initial):
                continue
        out.append(full)
    return out


def _xev_instances(rule, soup, identity):
    (lhs_item, _), = rule.lhs
    lhs_atoms = core.seq_atoms(lhs_item)
    part = rule.rhs[0]
    (rhs_item, _), = part.payload or ((core.atom(identity), 1),)
    rhs_atoms = core.seq_atoms(rhs_item) if part.payload else ()
    width = len(lhs_atoms)
    out = []
    for obj, _ in soup:
        if obj[0] == core.COMPOUND:
            continue
        atoms = core.seq_atoms(obj)
        for start in range(len(atoms) - width + 1):
            if atoms[start:start + width] != lhs_atoms:
                continue
            new_atoms = [a for a in
                         atoms[:start] + rhs_atoms + atoms[start + width:]
                         if a != identity]
            new_obj = core.seq_or_atom(new_atoms, identity)
            message = core.directed(part.target, core.soup_of([new_obj]))
            out.append(RuleInstance(
                rule=rule,
                subst=(),
                site=(obj, start),
                consumed=((obj, 1),),
                produces=(message,)))
    return out


def locally_enabled(instances, priority, mode, applied):
    """Filter instances by the priority relation, considered locally.

    `priority` maps each label to the set of strictly higher labels
    (transitive).  An instance of rule r survives iff no higher rule has
    an applicable instance; in strong mode, additionally no higher rule
    occurs in the `applied` label multiset.
    """
    applicable = {inst.rule.label for inst in instances}
    applied_labels = {label for label, _ in applied} if applied else set()
    out = []
    for inst in instances:
        higher = priority.get(inst.rule.label, frozenset())
        if higher:
            if not higher.isdisjoint(applicable):
                continue
            if mode == STRONG and not higher.isdisjoint(applied_labels):
                continue
        out.append(inst)
    return out


def apply_instance(soup, instance):
    """Apply one instance: remove its consumed objects, add its messages.

    Returns the new soup; products are frozen inside target messages and
    thus invisible to further rule applications within the step.
    """
    new = K.subtract(soup, instance.consumed)
    for message in instance.produces:
        new = core.soup_insert_message(new, message)
    return new


# ---------------------------------------------------------------------------
# Maximal parallel step per membrane

def membrane_max_parallel(mdef, soup, mode, priority=None, identity=None):
    """All outcomes of a maximal parallel application of `mdef`'s rules.

    Returns a frozenset of (result soup including messages, label
    multiset) pairs.  The soup must contain only objects.
    """
    if priority is None:
        priority = mdef.higher_than()
    initial = soup
    start = (soup, K.EMPTY, K.EMPTY)
    seen = {start}
    stack = [start]
    outcomes = set()
    inst_cache = {}
    while stack:
        objs, msgs, labels = stack.pop()
        insts = inst_cache.get(objs)
        if insts is None:
            insts = applicable_instances(mdef, objs, initial, identity)
            inst_cache[objs] = insts
        enabled = locally_enabled(insts, priority, mode, labels)
        if not enabled:
            outcomes.add((K.add(objs, msgs), labels))
            continue
        for inst in enabled:
            new_objs = K.subtract(objs, inst.consumed)
            new_msgs = msgs
            for message in inst.produces:
                new_msgs = core.soup_insert_message(new_msgs, message)
            new_labels = K.insert(labels, inst.rule.label)
            state = (new_objs, new_msgs, new_labels)
            if state not in seen:
                seen.add(state)
                stack.append(state)
    return frozenset(outcomes)


# ---------------------------------------------------------------------------
# Whole-configuration evolution step

_spec_caches = weakref.WeakKeyDictionary()


def _cache_for(spec):
    cache = _spec_caches.get(spec)
    if cache is None:
        cache = {
            "higher": {name: mdef.higher_than()
                       for name, mdef in spec.membranes.items()},
            "mmp": {},
        }
        _spec_caches[spec] = cache
    return cache


def _merge_applied(a, b):
    if not b:
        return a
    merged = dict(a)
    for name, labels in b.items():
        if name in merged:
            merged[name] = K.add(merged[name], labels)
        else:
            merged[name] = labels
    return merged


def _canon_applied(applied_map):
    return tuple(sorted((name, labels)
                        for name, labels in applied_map.items() if labels))


def evolution_step(config, spec, mode=None):
    """All successors of `config` under one evolution step.

    Returns a sorted list of StepResult; empty when irreducible.
    """
    if mode is None:
        mode = spec.priority_mode
    cache = _cache_for(spec)
    identity = spec.signature.seq_identity

    def evolve_membrane(item):
        name, inner = item[1], item[2]
        mdef = spec.membranes.get(name)
        if mdef is None:
            raise MembError(f"unknown membrane name {name}")
        objs, msgs, membs = core.partition_soup(inner)
        key = (name, objs, mode)
        mmp = cache["mmp"].get(key)
        if mmp is None:
            mmp = sorted(membrane_max_parallel(
                mdef, objs, mode, cache["higher"][name], identity))
            cache["mmp"][key] = mmp
        variants = []
        for child_part, child_applied in _evolve_children(membs):
            for out_soup, labels in mmp:
                soup_parts = K.add(K.add(out_soup, msgs), child_part)
                applied = _merge_applied(
                    {name: labels} if labels else {}, child_applied)
                variants.append((core.membrane(name, soup_parts), applied))
        return variants

    def _evolve_children(membs):
        variants = [(K.EMPTY, {})]
        for item, count in membs:
            options = evolve_membrane(item)
            combos = list(
                itertools.combinations_with_replacement(range(len(options)),
                                                        count))
            new_variants = []
            for part, applied in variants:
                for combo in combos:
                    new_part = part
                    new_applied = applied
                    for idx in combo:
                        child_item, child_applied = options[idx]
                        new_part = K.insert(new_part, child_item)
                        new_applied = _merge_applied(new_applied,
                                                     child_applied)
                    new_variants.append((new_part, new_applied))
            variants = new_variants
        return variants

    objs, msgs, membs = core.partition_soup(config)
    top_fixed = K.add(objs, msgs)

    results = set()
    for child_part, applied in _evolve_children(membs):
        if not applied:
            continue  # at least one rule must fire in the whole system
        candidate = K.add(top_fixed, child_part)
        for delivered in communicate(candidate):
            final = apply_dissolutions(apply_divisions(delivered))
            results.add(StepResult(final, _canon_applied(applied)))
    return sorted(results, key=lambda r: (r.applied, r.config))


# ---------------------------------------------------------------------------
# Communication phase

def communicate(config):
    """Deliver all target messages; returns the list of normal forms.

    `in N` messages branch over same-named children; a message whose
    destination does not exist kills that branch (dead letter).
    """
    variants = _comm_soup(config, top=True)
    out = sorted({soup for soup, _ in variants})
    return out


def _comm_soup(ms, top=False):
    fixed = []
    here_payload = K.EMPTY
    out_payload = K.EMPTY
    in_msgs = []
    children = []
    for item, count in ms:
        kind = item[0]
        if kind <= core.COMPOUND or kind == core.DIVMSG:
            fixed.append((item, count))
        elif kind == core.MEMB:
            children.append((item, count))
        else:
            target = item[1]
            if target == core.HERE:
                here_payload = K.add(here_payload, item[2])
            elif target == core.OUT:
                if top:
                    fixed.append((item, count))  # no enclosing membrane
                else:
                    out_payload = K.add(out_payload, item[2])
            else:
                in_msgs.append((target[1], item[2]))

    # Resolve children first; each may branch internally.
    assembled = [((), K.EMPTY)]
    for item, count in children:
        options = _comm_membrane(item)
        combos = list(itertools.combinations_with_replacement(options, count))
        new_assembled = []
        for child_list, delivered in assembled:
            for combo in combos:
                new_list = child_list
                new_delivered = delivered
                for child_item, child_out in combo:
                    new_list = new_list + (child_item,)
                    new_delivered = K.add(new_delivered, child_out)
                new_assembled.append((new_list, new_delivered))
        assembled = new_assembled

    results = []
    for child_list, delivered in assembled:
        states = [list(child_list)]
        for name, payload in in_msgs:
            next_states = []
            for state in states:
                for i, child in enumerate(state):
                    if child[1] == name:
                        updated = list(state)
                        updated[i] = core.membrane(name,
                                                   K.add(child[2], payload))
                        next_states.append(updated)
            states = next_states
            if not states:
                log.debug("dead letter: no membrane named %s for an "
                          "'in' message", name)
                break
        for state in states:
            pairs = list(fixed)
            pairs.extend((child, 1) for child in state)
            for soup_part in (here_payload, delivered):
                pairs.extend(soup_part)
            results.append((core.soup(pairs), out_payload))
    # Dedup branches that converged.
    return sorted(set(results))


def _comm_membrane(item):
    name = item[1]
    return [(core.membrane(name, inner), out)
            for inner, out in _comm_soup(item[2])]


# ---------------------------------------------------------------------------
# Division and dissolution phases

def apply_divisions(config):
    """Split every non-skin membrane holding a division message.

    Division messages in a skin (top-level) membrane are inert.  The
    result is unique regardless of processing order.
    """
    return _div_soup(config, divisible=False)


def _div_soup(ms, divisible):
    pairs = []
    for item, count in ms:
        if item[0] != core.MEMB:
            pairs.append((item, count))
            continue
        inner = _div_soup(item[2], divisible=True)
        if divisible:
            for copy in _expand_divisions(item[1], inner):
                pairs.append((copy, count))
        else:
            pairs.append((core.membrane(item[1], inner), count))
    return core.soup(pairs)


def _expand_divisions(name, inner):
    worklist = [inner]
    done = []
    while worklist:
        soup = worklist.pop()
        div = next((item for item, _ in soup if item[0] == core.DIVMSG), None)
        if div is None:
            done.append(core.membrane(name, soup))
        else:
            rest = K.discard(soup, div)
            worklist.append(K.add(rest, div[1]))
            worklist.append(K.add(rest, div[2]))
    return done


def apply_dissolutions(config):
    """Dissolve every non-skin membrane containing delta.

    One delta is consumed per dissolution; the remaining contents (and
    any further deltas) spill into the parent.  The skin is exempt.
    """
    pairs = []
    for item, count in config:
        if item[0] == core.MEMB:
            pairs.append((_dis_membrane(item), count))
        else:
            pairs.append((item, count))
    return core.soup(pairs)


def _dis_membrane(item):
    name = item[1]
    pairs = []
    for sub, count in item[2]:
        if sub[0] != core.MEMB:
            pairs.append((sub, count))
            continue
        child = _dis_membrane(sub)
        if K.contains(((core.DELTA, 1),), child[2]):
            spilled = K.discard(child[2], core.DELTA)
            for _ in range(count):
                pairs.extend(spilled)
        else:
            pairs.append((child, count))
    return core.membrane(name, core.soup(pairs))


# ---------------------------------------------------------------------------
# Computations

def compute_irreducible(config, spec, mode=None, bounds=None, search="bfs"):
    """Search for configurations with no successors, reached in >= 1 step.

    States that reach `bounds.max_objects` objects or `bounds.max_steps`
    depth are emitted as solutions without further expansion.  Returns
    (solutions, limited): `limited` is True when `bounds.max_solutions`
    cut the enumeration.  Cyclic systems terminate thanks to visited-state
    deduplication; unbounded infinite-state systems require a bound.
    """
    if bounds is None:
        bounds = Bounds()
    if mode is None:
        mode = spec.priority_mode
    start = core.canonicalize(config)
    solutions = []

    def bound_hit(cfg, depth):
        if bounds.max_steps is not None and depth >= bounds.max_steps:
            return True
        if bounds.max_objects is not None \
                and core.num_objs_rec(cfg) >= bounds.max_objects:
            return True
        return False

    def emit(cfg):
        solutions.append(cfg)
        return (bounds.max_solutions is not None
                and len(solutions) >= bounds.max_solutions)

    visited = {start}
    if search == "bfs":
        level = [start]
        depth = 0
        while level:
            next_level = set()
            for cfg in sorted(level):
                if depth > 0 and bound_hit(cfg, depth):
                    if emit(cfg):
                        return solutions, True
                    continue
                if depth == 0 and bound_hit(cfg, depth):
                    continue
                succs = {r.config for r in evolution_step(cfg, spec, mode)}
                if not succs:
                    if depth > 0 and emit(cfg):
                        return solutions, True
                    continue
                for nxt in succs:
                    if nxt not in visited:
                        visited.add(nxt)
                        next_level.add(nxt)
            level = next_level
            depth += 1
    elif search == "dfs":
        stack = [(start, 0)]
        while stack:
            cfg, depth = stack.pop()
            if depth > 0 and bound_hit(cfg, depth):
                if emit(cfg):
                    return solutions, True
                continue
            if depth == 0 and bound_hit(cfg, depth):
                continue
            succs = {r.config for r in evolution_step(cfg, spec, mode)}
            if not succs:
                if depth > 0 and emit(cfg):
                    return solutions, True
                continue
            for nxt in sorted(succs, reverse=True):
                if nxt not in visited:
                    visited.add(nxt)
                    stack.append((nxt, depth + 1))
    else:
        raise ValueError(f"unknown search order {search!r}")
    return solutions, False
