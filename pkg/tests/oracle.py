"""Brute-force evolution-step oracle and random-system generator.

The oracle enumerates ALL rule multisets per membrane, filters them by
the textbook definitions (applicability, weak/strong admissibility,
maximality among admissible applicable extensions), and applies each
choice atomically.  It is restricted to ground two-membrane systems
(skin M1, optional child M2), which is all the generator produces.
Communication, division, and dissolution phases are shared with the
engine; phase 1 is the independently-computed part.
"""

import random

from membranes import core, lang
from membranes import kernel as K
from membranes.engine import (apply_dissolutions, apply_divisions,
                              communicate)
from membranes.lang import (MembraneDef, RhsDirected, RuleDef, Signature,
                            SystemSpec)

NONE_MODE = "none"
ALL_MODES = (NONE_MODE, lang.WEAK, lang.STRONG)


def atoms_soup(names):
    return core.soup_of([core.atom(n) for n in names])


# ---------------------------------------------------------------------------
# Choice enumeration per membrane

def _lhs_total(mdef, choice):
    total = K.EMPTY
    for label, count in choice.items():
        rule = mdef.rule(label)
        for _ in range(count):
            total = K.add(total, rule.lhs)
    return total


def can_apply(mdef, choice, objects):
    return K.contains(_lhs_total(mdef, choice), objects)


def _below_map(mdef):
    """label -> set of labels strictly below it (transitive)."""
    higher = mdef.higher_than()
    below = {r.label: set() for r in mdef.rules}
    for label, above in higher.items():
        for hi in above:
            below[hi].add(label)
    return below


def weak_admissible(mdef, choice, objects):
    below = _below_map(mdef)
    for rule in mdef.rules:
        lows = below[rule.label]
        if all(choice.get(lo, 0) == 0 for lo in lows):
            continue
        zeroed = {l: c for l, c in choice.items() if l not in lows}
        zeroed[rule.label] = zeroed.get(rule.label, 0) + 1
        if can_apply(mdef, zeroed, objects):
            return False
    return True


def strong_admissible(mdef, choice, objects):
    if not weak_admissible(mdef, choice, objects):
        return False
    below = _below_map(mdef)
    for label, count in choice.items():
        if count > 0 and any(choice.get(lo, 0) > 0 for lo in below[label]):
            return False
    return True


def admissible(mdef, choice, objects, mode):
    if mode == NONE_MODE:
        return True
    if mode == lang.WEAK:
        return weak_admissible(mdef, choice, objects)
    return strong_admissible(mdef, choice, objects)


def membrane_choices(mdef, objects, mode):
    """All admissible, maximal rule multisets applicable to `objects`.

    Maximality: no single-rule extension is both applicable and
    admissible (for weak/none this coincides with plain applicability
    maximality; for strong it must account for the applied-rule ban).
    """
    rules = list(mdef.rules)
    all_choices = []

    def enumerate_from(i, choice, used):
        if i == len(rules):
            all_choices.append(dict(choice))
            return
        rule = rules[i]
        k = 0
        while True:
            if k:
                choice[rule.label] = k
            enumerate_from(i + 1, choice, K.add(used, _times(rule.lhs, k)))
            if not K.contains(_times(rule.lhs, k + 1),
                              K.subtract(objects, used)):
                break
            k += 1
        choice.pop(rule.label, None)

    enumerate_from(0, {}, K.EMPTY)

    result = []
    for choice in all_choices:
        if not can_apply(mdef, choice, objects):
            continue
        if not admissible(mdef, choice, objects, mode):
            continue
        maximal = True
        for rule in rules:
            extension = dict(choice)
            extension[rule.label] = extension.get(rule.label, 0) + 1
            if can_apply(mdef, extension, objects) \
                    and admissible(mdef, extension, objects, mode):
                maximal = False
                break
        if maximal:
            result.append(choice)
    return result


def _times(ms, k):
    if k == 0:
        return K.EMPTY
    return K.from_pairs((item, count * k) for item, count in ms)


def apply_choice(mdef, objects, choice):
    """Atomic application: remove all left-hand sides, emit all messages."""
    remaining = K.subtract(objects, _lhs_total(mdef, choice))
    soup = remaining
    for label, count in choice.items():
        rule = mdef.rule(label)
        for _ in range(count):
            for part in rule.rhs:
                soup = core.soup_insert_message(
                    soup, core.directed(part.target, part.payload))
    return soup


def _labels_ms(choice):
    return K.from_pairs((label, count) for label, count in choice.items()
                        if count)


# ---------------------------------------------------------------------------
# Whole-step oracle for <M1 | W1 [<M2 | W2>]> configurations

def oracle_step(config, spec, mode):
    """Set of (config, applied) successor pairs per the definitions."""
    top_objs, top_msgs, top_membs = core.partition_soup(config)
    (skin, scount), = top_membs
    assert scount == 1
    w1_objs, w1_msgs, membs = core.partition_soup(skin[2])
    child = None
    if membs:
        (child, ccount), = membs
        assert ccount == 1

    m1 = spec.membranes[skin[1]]
    choices1 = membrane_choices(m1, w1_objs, mode)
    if child is not None:
        w2_objs, w2_msgs, _ = core.partition_soup(child[2])
        choices2 = membrane_choices(spec.membranes[child[1]], w2_objs, mode)
    else:
        choices2 = [{}]

    results = set()
    for c1 in choices1:
        for c2 in choices2:
            if not c1 and not c2:
                continue
            inner1 = K.add(apply_choice(m1, w1_objs, c1), w1_msgs)
            if child is not None:
                inner2 = K.add(
                    apply_choice(spec.membranes[child[1]], w2_objs, c2),
                    w2_msgs)
                inner1 = K.insert(inner1, core.membrane(child[1], inner2))
            candidate = K.insert(K.add(top_objs, top_msgs),
                                 core.membrane(skin[1], inner1))
            applied = {}
            if c1:
                applied[skin[1]] = _labels_ms(c1)
            if c2:
                applied[child[1]] = _labels_ms(c2)
            canon = tuple(sorted(applied.items()))
            for delivered in communicate(candidate):
                final = apply_dissolutions(apply_divisions(delivered))
                results.add((final, canon))
    return results


# ---------------------------------------------------------------------------
# Random small systems

ALPHABET = ("a", "b", "c", "d")


def random_multiset(rng, max_items, alphabet=ALPHABET):
    n = rng.randint(0, max_items)
    return atoms_soup([rng.choice(alphabet) for _ in range(n)])


def random_system(rng):
    """A random 1- or 2-membrane ground system plus an initial config."""
    has_child = rng.random() < 0.6

    def make_rules(prefix, targets, allow_delta):
        rules = []
        for i in range(rng.randint(1, 4)):
            lhs = random_multiset(rng, 2)
            while not lhs:
                lhs = random_multiset(rng, 2)
            parts = []
            for _ in range(rng.randint(1, 2)):
                payload = random_multiset(rng, 2)
                if allow_delta and rng.random() < 0.15:
                    payload = K.insert(payload, core.DELTA)
                parts.append(RhsDirected(rng.choice(targets), payload))
            rules.append(RuleDef(label=f"{prefix}r{i + 1}", kind=lang.EV,
                                 lhs=lhs, rhs=tuple(parts)))
        labels = [r.label for r in rules]
        pairs = []
        for _ in range(rng.randint(0, 3)):
            if len(labels) < 2:
                break
            i, j = sorted(rng.sample(range(len(labels)), 2))
            pairs.append((labels[i], labels[j]))
        return tuple(rules), tuple(sorted(set(pairs)))

    m1_targets = [core.HERE, core.OUT]
    if has_child:
        m1_targets.append(core.target_in("M2"))
    rules1, prio1 = make_rules("a", m1_targets, allow_delta=False)
    membranes = {"M1": MembraneDef("M1", rules1, prio1)}
    if has_child:
        rules2, prio2 = make_rules("b", [core.HERE, core.OUT],
                                   allow_delta=True)
        membranes["M2"] = MembraneDef("M2", rules2, prio2)

    spec = SystemSpec(signature=Signature(atoms=frozenset(ALPHABET)),
                      membranes=membranes)

    w1 = random_multiset(rng, 5)
    inner = w1
    if has_child:
        inner = K.insert(inner, core.membrane("M2", random_multiset(rng, 4)))
    config = core.soup_of([core.membrane("M1", inner)])
    return spec, config


def strip_priorities(spec):
    membranes = {name: MembraneDef(m.name, m.rules, (), dict(m.var_sorts))
                 for name, m in spec.membranes.items()}
    return SystemSpec(signature=spec.signature, membranes=membranes)


def make_rng(seed):
    return random.Random(seed)
