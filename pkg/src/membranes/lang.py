"""ASTs for membrane specifications and temporal-logic formulas.

Rule patterns reuse the tuple encoding of :mod:`membranes.core`, except
that compound argument positions hold *argument expressions*:

  ("lit", value)     literal (int, bool, or atom name)
  ("var", name)      declared variable
  ("succ", expr)     successor of a Nat expression
  ("bnot", expr)     negation of a Bool expression

Formulas are frozen dataclasses; a formula mixes at most one temporal
layer (plain LTL operators, path-quantified CTL operators, or fixpoint
operators), which :func:`formula_layer` classifies and enforces.
"""

from dataclasses import dataclass, field

from membranes import core


class MembError(Exception):
    """Base error for the workbench."""


@dataclass(frozen=True)
class Diagnostic:
    line: int
    col: int
    message: str

    def __str__(self):
        return f"{self.line}:{self.col}: {self.message}"


class DiagnosticsError(MembError):
    """Raised by parsers; carries one diagnostic per problem."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


# ---------------------------------------------------------------------------
# Specification AST

WEAK = "weak"
STRONG = "strong"

EV, XEV, CEV = "ev", "xev", "cev"


@dataclass(frozen=True)
class Signature:
    atoms: frozenset = frozenset()
    compounds: dict = field(default_factory=dict)  # symbol -> tuple of sorts
    seq_identity: str | None = None                # identity atom of the seq op
    imports_nat: bool = False
    explicit: bool = False                         # a signature block was given

    def knows_atom(self, name):
        return name in self.atoms or name == core.DELTA_NAME


@dataclass(frozen=True)
class RuleDef:
    label: str
    kind: str                      # EV | XEV | CEV
    lhs: tuple                     # pattern soup: ((pattern, count), ...)
    rhs: tuple                     # tuple of RhsPart
    promoters: tuple = ()
    inhibitors: tuple = ()


@dataclass(frozen=True)
class RhsDirected:
    target: tuple                  # core.HERE / core.OUT / core.target_in(n)
    payload: tuple                 # pattern soup


@dataclass(frozen=True)
class RhsDivision:
    left: tuple                    # pattern soup
    right: tuple


@dataclass(frozen=True)
class MembraneDef:
    name: str
    rules: tuple = ()
    priorities: tuple = ()         # generator pairs (higher, lower)
    var_sorts: dict = field(default_factory=dict)  # var name -> "Nat" | "Bool"

    def rule(self, label):
        for r in self.rules:
            if r.label == label:
                return r
        raise KeyError(label)

    def higher_than(self):
        """Transitive closure: label -> frozenset of strictly higher labels."""
        direct = {}
        for hi, lo in self.priorities:
            direct.setdefault(lo, set()).add(hi)
        closure = {}

        def walk(label, seen):
            if label in closure:
                return closure[label]
            seen = seen | {label}
            acc = set()
            for hi in direct.get(label, ()):
                acc.add(hi)
                if hi not in seen:
                    acc |= walk(hi, seen)
            closure[label] = acc
            return acc

        return {r.label: frozenset(walk(r.label, frozenset()))
                for r in self.rules}


@dataclass(frozen=True, eq=False)  # identity equality: holds dict fields
class SystemSpec:
    signature: Signature = Signature()
    membranes: dict = field(default_factory=dict)  # name -> MembraneDef
    priority_mode: str = STRONG
    commands: tuple = ()           # top-level command lines found in the file

    def membrane_names(self):
        return frozenset(self.membranes)


# ---------------------------------------------------------------------------
# Formula AST

class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


@dataclass(frozen=True)
class IsAlive(Formula):
    name: str


@dataclass(frozen=True)
class Contains(Formula):
    name: str
    objects: tuple                 # ground object soup


@dataclass(frozen=True)
class Brace(Formula):
    expr: "Cmp"


@dataclass(frozen=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Next(Formula):
    operand: Formula


@dataclass(frozen=True)
class Always(Formula):
    operand: Formula


@dataclass(frozen=True)
class Eventually(Formula):
    operand: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    path: Formula                  # Next/Always/Eventually/Until node


@dataclass(frozen=True)
class ForAll(Formula):
    path: Formula


@dataclass(frozen=True)
class Mu(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Nu(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Box(Formula):
    operand: Formula


@dataclass(frozen=True)
class Diamond(Formula):
    operand: Formula


@dataclass(frozen=True)
class FixVar(Formula):
    name: str


# Arithmetic expressions inside { ... } propositions.

@dataclass(frozen=True)
class NatLit:
    value: int


@dataclass(frozen=True)
class Count:
    name: str
    objects: tuple                 # ground, nonempty object soup


@dataclass(frozen=True)
class NatOp:
    op: str                        # "+" | "*" | "^"
    left: object
    right: object


@dataclass(frozen=True)
class Cmp:
    op: str                        # "=", "divides", "<", "<=", ">", ">="
    left: object
    right: object


LTL_LAYER, CTL_LAYER, MU_LAYER, PROP_LAYER = "ltl", "ctl", "mu", "prop"


def formula_layer(f):
    """Classify the temporal layer of a formula; raise on a mix."""
    layers = set()

    def walk(g, quantified):
        if isinstance(g, (TrueF, FalseF, IsAlive, Contains, Brace, FixVar)):
            return
        if isinstance(g, Not):
            walk(g.operand, quantified)
        elif isinstance(g, (And, Or, Implies)):
            walk(g.left, quantified)
            walk(g.right, quantified)
        elif isinstance(g, (Next, Always, Eventually)):
            layers.add(CTL_LAYER if quantified else LTL_LAYER)
            walk(g.operand, False)
        elif isinstance(g, Until):
            layers.add(CTL_LAYER if quantified else LTL_LAYER)
            walk(g.left, False)
            walk(g.right, False)
        elif isinstance(g, (Exists, ForAll)):
            layers.add(CTL_LAYER)
            walk(g.path, True)
        elif isinstance(g, (Mu, Nu)):
            layers.add(MU_LAYER)
            walk(g.body, False)
        elif isinstance(g, (Box, Diamond)):
            layers.add(MU_LAYER)
            walk(g.operand, False)
        else:
            raise TypeError(f"unknown formula node {g!r}")

    walk(f, False)
    if len(layers) > 1:
        raise DiagnosticsError(
            [Diagnostic(1, 1, "formula mixes temporal layers: "
                        + ", ".join(sorted(layers)))])
    return layers.pop() if layers else PROP_LAYER


def render_formula(f):
    return _render_f(f, 0)


# Precedence levels used when rendering (higher binds tighter):
# 0 binders (mu/nu body, implies), 1 or, 2 and, 3 until, 4 unary/primary.

def _render_f(f, level):
    if isinstance(f, TrueF):
        return "True"
    if isinstance(f, FalseF):
        return "False"
    if isinstance(f, IsAlive):
        return f"isAlive({f.name})"
    if isinstance(f, Contains):
        return f"contains({f.name}, {core.render_soup(f.objects)})"
    if isinstance(f, Brace):
        return "{ " + render_bool_expr(f.expr) + " }"
    if isinstance(f, FixVar):
        return f.name
    if isinstance(f, Not):
        return "~ " + _render_f(f.operand, 4)
    if isinstance(f, Next):
        return "O " + _render_f(f.operand, 4)
    if isinstance(f, Always):
        return "[] " + _render_f(f.operand, 4)
    if isinstance(f, Eventually):
        return "<> " + _render_f(f.operand, 4)
    if isinstance(f, Box):
        return "[.] " + _render_f(f.operand, 4)
    if isinstance(f, Diamond):
        return "<.> " + _render_f(f.operand, 4)
    if isinstance(f, (Exists, ForAll)):
        q = "E" if isinstance(f, Exists) else "A"
        path = f.path
        if isinstance(path, Until):
            return (f"{q} [ {_render_f(path.left, 4)} U "
                    f"{_render_f(path.right, 3)} ]")
        op = {Next: "O", Always: "[]", Eventually: "<>"}[type(path)]
        return f"{q} {op} " + _render_f(path.operand, 4)
    if isinstance(f, (Mu, Nu)):
        word = "mu" if isinstance(f, Mu) else "nu"
        text = f"{word} {f.var} . {_render_f(f.body, 0)}"
        return f"({text})" if level > 0 else text
    if isinstance(f, Until):
        text = _render_f(f.left, 4) + " U " + _render_f(f.right, 3)
        return f"({text})" if level > 3 else text
    if isinstance(f, And):
        text = _render_f(f.left, 3) + " /\\ " + _render_f(f.right, 3)
        return f"({text})" if level > 2 else text
    if isinstance(f, Or):
        text = _render_f(f.left, 2) + " \\/ " + _render_f(f.right, 2)
        return f"({text})" if level > 1 else text
    if isinstance(f, Implies):
        text = _render_f(f.left, 1) + " -> " + _render_f(f.right, 0)
        return f"({text})" if level > 0 else text
    raise TypeError(f"unknown formula node {f!r}")


def render_bool_expr(e):
    return (f"{render_nat_expr(e.left, 0)} {e.op} "
            f"{render_nat_expr(e.right, 0)}")


def render_nat_expr(e, level):
    if isinstance(e, NatLit):
        return str(e.value)
    if isinstance(e, Count):
        return f"count({e.name}, {core.render_soup(e.objects)})"
    prec = {"+": 1, "*": 2, "^": 3}[e.op]
    left = render_nat_expr(e.left, prec + (0 if e.op == "^" else 0))
    right = render_nat_expr(e.right, prec + (0 if e.op == "^" else 1))
    text = f"{left} {e.op} {right}"
    return f"({text})" if level > prec else text


# ---------------------------------------------------------------------------
# Pattern helpers

def pattern_vars(pattern_soup):
    """All variable names occurring in a pattern soup."""
    out = set()
    for item, _ in pattern_soup:
        if item[0] == core.COMPOUND:
            for arg in item[2]:
                _arg_vars(arg, out)
    return out


def _arg_vars(arg, out):
    tag = arg[0]
    if tag == "var":
        out.add(arg[1])
    elif tag in ("succ", "bnot"):
        _arg_vars(arg[1], out)


def pattern_is_ground(pattern_soup):
    return not pattern_vars(pattern_soup)


def pattern_arg_shapes_ok(pattern_soup, deep):
    """True iff args are literals/vars only (deep=False) or any shape."""
    if deep:
        return True
    for item, _ in pattern_soup:
        if item[0] == core.COMPOUND:
            for arg in item[2]:
                if arg[0] not in ("lit", "var"):
                    return False
    return True


def contains_delta(pattern_soup):
    for item, _ in pattern_soup:
        if item == core.DELTA:
            return True
    return False


# ---------------------------------------------------------------------------
# Validation

def validate_spec(spec):
    """Check all SystemSpec/RuleDef invariants; return a diagnostic list."""
    diags = []
    at = lambda msg: diags.append(Diagnostic(0, 0, msg))

    for mdef in spec.membranes.values():
        labels = [r.label for r in mdef.rules]
        seen = set()
        for label in labels:
            if label in seen:
                at(f"membrane {mdef.name}: duplicate rule label {label}")
            seen.add(label)

        for hi, lo in mdef.priorities:
            for label in (hi, lo):
                if label not in seen:
                    at(f"membrane {mdef.name}: unknown rule label {label}")

        higher = _closure_or_cycle(mdef, diags)

        for rule in mdef.rules:
            _validate_rule(spec, mdef, rule, diags)

    return diags


def _closure_or_cycle(mdef, diags):
    direct = {}
    for hi, lo in mdef.priorities:
        direct.setdefault(lo, set()).add(hi)

    state = {}

    def visit(label):
        if state.get(label) == 1:
            return True
        if state.get(label) == 2:
            return False
        state[label] = 1
        for hi in direct.get(label, ()):
            if visit(hi):
                return True
        state[label] = 2
        return False

    for label in list(direct):
        if visit(label):
            diags.append(Diagnostic(
                0, 0, f"membrane {mdef.name}: priority cycle involving {label}"))
            return None
    return direct


def _validate_rule(spec, mdef, rule, diags):
    where = f"membrane {mdef.name}, rule {rule.label}"
    at = lambda msg: diags.append(Diagnostic(0, 0, f"{where}: {msg}"))

    if not rule.lhs:
        at("empty left-hand side")
    if contains_delta(rule.lhs) or contains_delta(rule.promoters) \
            or contains_delta(rule.inhibitors):
        at("delta may appear only in right-hand sides")

    if not pattern_arg_shapes_ok(rule.lhs, deep=False):
        at("left-hand side arguments must be literals or bare variables")

    lhs_vars = pattern_vars(rule.lhs)
    prom_vars = pattern_vars(rule.promoters)
    bound = lhs_vars | prom_vars

    inh_vars = pattern_vars(rule.inhibitors)
    fresh_inh = inh_vars - bound
    if fresh_inh:
        at("inhibitor binds new variable "
           + ", ".join(sorted(fresh_inh)))

    rhs_vars = set()
    for part in rule.rhs:
        if isinstance(part, RhsDirected):
            rhs_vars |= pattern_vars(part.payload)
        else:
            rhs_vars |= pattern_vars(part.left) | pattern_vars(part.right)
    unbound = rhs_vars - bound
    if unbound:
        at("right-hand side uses unbound variable "
           + ", ".join(sorted(unbound)))

    for name in bound | inh_vars:
        if name not in mdef.var_sorts:
            at(f"undeclared variable {name}")

    if rule.kind == XEV:
        if len(rule.rhs) != 1 or not isinstance(rule.rhs[0], RhsDirected):
            at("xev rules have at most one target")
        if K_total(rule.lhs) != 1:
            at("xev left-hand side must be a single object")
        elif rule.rhs and isinstance(rule.rhs[0], RhsDirected) \
                and K_total(rule.rhs[0].payload) > 1:
            at("xev right-hand side must be a single object")
        for item, _ in rule.lhs:
            if item[0] == core.COMPOUND:
                at("xev patterns are sequences of atoms")
    if rule.kind != CEV and (rule.promoters or rule.inhibitors):
        at("promoters/inhibitors require a cev rule")

    for part in rule.rhs:
        if isinstance(part, RhsDirected) and part.target[0] == 2:
            if part.target[1] not in spec.membranes:
                at(f"unknown membrane name {part.target[1]}")


def K_total(pattern_soup):
    return sum(count for _, count in pattern_soup)
