"""Canonical data model for membrane configurations.

Every value is an immutable nested tuple whose first element is an integer
kind tag, so plain tuple comparison yields a total order and plain tuple
equality is structural equality.  A *soup* is a canonical multiset (see
:mod:`membranes.kernel`) of such items; a configuration is a top-level soup
(normally a single skin membrane, possibly with objects expelled past it).

Kinds and shapes:

  (ATOM, name)                      plain object, e.g. ``a`` or ``delta``
  (SEQ, (name, ...))                sequence object, e.g. ``(a . a . b)``
  (COMPOUND, symbol, (arg, ...))    structured object, args int/bool/str
  (MSG, target, payload_soup)       directed target message
  (DIVMSG, left_soup, right_soup)   membrane-division message
  (MEMB, name, soup)                nested membrane

Targets are ``(0,)`` for here, ``(1,)`` for out, ``(2, name)`` for in.

Soups are canonical by construction: items sorted, counts positive, and
directed messages with equal targets merged.  Two configurations are equal
as nested multisets iff they are equal as Python values.
"""

from membranes import kernel as K

ATOM = 0
SEQ = 1
COMPOUND = 2
MSG = 3
DIVMSG = 4
MEMB = 5

HERE = (0,)
OUT = (1,)

DELTA_NAME = "delta"


def atom(name):
    return (ATOM, name)


DELTA = atom(DELTA_NAME)


def seq_or_atom(names, identity):
    """Normalized sequence object: [] -> identity atom, [x] -> atom x."""
    if not names:
        return (ATOM, identity)
    if len(names) == 1:
        return (ATOM, names[0])
    return (SEQ, tuple(names))


def compound(symbol, args):
    return (COMPOUND, symbol, tuple(args))


def target_in(name):
    return (2, name)


def directed(target, payload):
    return (MSG, target, payload)


def division(left, right):
    return (DIVMSG, left, right)


def membrane(name, soup):
    return (MEMB, name, soup)


def kind(item):
    return item[0]


def is_object(item):
    return item[0] <= COMPOUND


def is_membrane(item):
    return item[0] == MEMB


def is_message(item):
    return item[0] == MSG or item[0] == DIVMSG


def seq_atoms(item):
    """View an atom or sequence object as a tuple of atom names."""
    if item[0] == ATOM:
        return (item[1],)
    return item[1]


EMPTY_SOUP = K.EMPTY


def soup(pairs):
    """Canonical soup from (item, count) pairs, merging directed messages."""
    plain = []
    by_target = {}
    for item, count in pairs:
        if count and item[0] == MSG:
            target = item[1]
            if target in by_target:
                by_target[target] = K.add(by_target[target], item[2])
            else:
                by_target[target] = item[2]
        else:
            plain.append((item, count))
    for target, payload in by_target.items():
        plain.append(((MSG, target, payload), 1))
    return K.from_pairs(plain)


def soup_of(items):
    """Canonical soup from an iterable of items (each with multiplicity 1)."""
    return soup((item, 1) for item in items)


def soup_insert_message(ms, item):
    """Insert a message item, merging directed payloads with equal targets."""
    if item[0] == MSG:
        for other, _ in ms:
            if other[0] == MSG and other[1] == item[1]:
                merged = (MSG, item[1], K.add(other[2], item[2]))
                return K.insert(K.discard(ms, other), merged)
    return K.insert(ms, item)


def partition_soup(ms):
    """Split a soup into (objects, messages, membranes) canonical parts."""
    objs, msgs, membs = [], [], []
    for item, count in ms:
        k = item[0]
        if k <= COMPOUND:
            objs.append((item, count))
        elif k == MEMB:
            membs.append((item, count))
        else:
            msgs.append((item, count))
    return tuple(objs), tuple(msgs), tuple(membs)


def canonicalize(value):
    """Recursively rebuild a soup (or single item) into canonical form.

    Idempotent; accepts soups whose nested parts were assembled by hand,
    e.g. with unmerged directed messages or unsorted pairs.
    """
    if isinstance(value, tuple) and value and isinstance(value[0], int):
        return _canon_item(value)
    return soup((_canon_item(item), count) for item, count in value)


def _canon_item(item):
    k = item[0]
    if k <= COMPOUND:
        return item
    if k == MSG:
        return (MSG, item[1], canonicalize(item[2]))
    if k == DIVMSG:
        return (DIVMSG, canonicalize(item[1]), canonicalize(item[2]))
    return (MEMB, item[1], canonicalize(item[2]))


# ---------------------------------------------------------------------------
# Multiset algebra on soups

def soup_contains(sub, sup):
    """True iff `sub` occurs in `sup` with at least its multiplicities."""
    return K.contains(sub, sup)


def count_submultiset(contents, pattern):
    """Largest k such that k copies of `pattern` jointly fit in `contents`.

    The pattern must be nonempty and ground.
    """
    return K.count_max(contents, pattern)


def num_objs_rec(ms):
    """Total object count of a soup, recursing into membranes and payloads.

    ``delta`` counts as an object; messages and membranes themselves do not.
    """
    n = 0
    for item, count in ms:
        k = item[0]
        if k <= COMPOUND:
            n += count
        elif k == MSG:
            n += count * num_objs_rec(item[2])
        elif k == DIVMSG:
            n += count * (num_objs_rec(item[1]) + num_objs_rec(item[2]))
        else:
            n += count * num_objs_rec(item[2])
    return n


def iter_membranes(ms, name=None):
    """Yield (membrane item, count) at every depth, optionally by name."""
    for item, count in ms:
        if item[0] == MEMB:
            if name is None or item[1] == name:
                yield item, count
            yield from iter_membranes(item[2], name)
        elif item[0] == MSG:
            pass  # payloads hold objects only


# ---------------------------------------------------------------------------
# Rendering.  Output re-parses to an equal canonical form; display order
# puts delta first inside a soup (matching the usual presentation) and
# otherwise follows the canonical item order.

def render_soup(ms, sep="·"):
    if not ms:
        return "empty"
    parts = []
    rest = []
    for item, count in ms:
        text = render_item(item, sep)
        target = parts if item == DELTA else rest
        target.extend([text] * count)
    parts.extend(rest)
    return " ".join(parts)


def render_item(item, sep="·"):
    k = item[0]
    if k == ATOM:
        return item[1]
    if k == SEQ:
        return "(" + f" {sep} ".join(item[1]) + ")"
    if k == COMPOUND:
        args = ", ".join(_render_arg(a) for a in item[2])
        return f"{item[1]}({args})"
    if k == MSG:
        return f"({render_soup(item[2], sep)}, {_render_target(item[1])})"
    if k == DIVMSG:
        left = render_soup(item[1], sep)
        right = render_soup(item[2], sep)
        return f"({left}, {right}, div)"
    return f"< {item[1]} | {render_soup(item[2], sep)} >"


def _render_arg(a):
    if a is True:
        return "true"
    if a is False:
        return "false"
    if isinstance(a, int):
        return str(a)
    return a


def _render_target(target):
    if target == HERE:
        return "here"
    if target == OUT:
        return "out"
    return f"in {target[1]}"


def render_configuration(config, sep="·"):
    """Render a top-level soup in the configuration syntax."""
    return render_soup(config, sep)
