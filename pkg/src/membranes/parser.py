"""Lexer and parsers for .memb files, configuration terms, and formulas.

Statements end with ``.``; ``***`` starts a comment running to end of line.
The middle dot ``·`` (sequence concatenation) is a distinct token from
the statement terminator.
"""

from membranes import core, lang
from membranes.lang import (
    Diagnostic, DiagnosticsError, MembraneDef, RhsDirected, RhsDivision,
    RuleDef, Signature, SystemSpec,
)

_MULTI_PUNCT = ("[.]", "<.>", "[]", "<>", "->", "/\\", "\\/", "<=", ">=")
_SINGLE_PUNCT = set("(){}[]<>|,.~=+*^:·")

_COMMAND_WORDS = {"help", "quit", "load", "show", "set", "trans",
                  "compute", "dfs", "check"}
_TERM_COMMANDS = {"trans", "compute", "dfs", "check"}


class Token:
    __slots__ = ("kind", "text", "line", "col", "pos", "end")

    def __init__(self, kind, text, line, col, pos, end):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col
        self.pos = pos
        self.end = end

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, {self.line}:{self.col})"


def tokenize(text):
    tokens = []
    i, line, bol = 0, 1, 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            i += 1
            bol = i
            continue
        if c.isspace():
            i += 1
            continue
        if text.startswith("***", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        col = i - bol + 1
        if c.isalpha() or c == "_":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("ident", text[i:j], line, col, i, j))
            i = j
            continue
        if c.isdigit():
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("nat", text[i:j], line, col, i, j))
            i = j
            continue
        for p in _MULTI_PUNCT:
            if text.startswith(p, i):
                tokens.append(Token("punct", p, line, col, i, i + len(p)))
                i += len(p)
                break
        else:
            if c in _SINGLE_PUNCT:
                tokens.append(Token("punct", c, line, col, i, i + 1))
                i += 1
            else:
                raise DiagnosticsError(
                    [Diagnostic(line, col, f"unexpected character {c!r}")])
    tokens.append(Token("eof", "", line, n - bol + 1, n, n))
    return tokens


class TokenStream:
    def __init__(self, text):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self, ahead=0):
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def next(self):
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def at(self, text):
        return self.peek().text == text and self.peek().kind != "eof"

    def at_kind(self, kind):
        return self.peek().kind == kind

    def accept(self, text):
        if self.at(text):
            return self.next()
        return None

    def expect(self, text):
        tok = self.peek()
        if tok.text != text or tok.kind == "eof":
            self.fail(f"expected {text!r}, found {tok.text!r}"
                      if tok.kind != "eof" else f"expected {text!r}, found end of input")
        return self.next()

    def expect_ident(self, what="identifier"):
        tok = self.peek()
        if tok.kind != "ident":
            self.fail(f"expected {what}, found {tok.text!r}" if tok.kind != "eof"
                      else f"expected {what}, found end of input")
        return self.next()

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise DiagnosticsError([Diagnostic(tok.line, tok.col, message)])


# ---------------------------------------------------------------------------
# Specification files

def parse_spec(text):
    """Parse a .memb specification; raises DiagnosticsError on bad input.

    Returns a SystemSpec whose ``commands`` field holds any top-level
    command lines found in the file, in order.
    """
    ts = TokenStream(text)
    diags = []
    sig = None
    membranes = {}
    commands = []

    while not ts.at_kind("eof"):
        tok = ts.peek()
        try:
            if tok.text == "signature":
                block = _parse_signature(ts)
                if sig is not None:
                    diags.append(Diagnostic(tok.line, tok.col,
                                            "duplicate signature block"))
                else:
                    sig = block
            elif tok.text == "membrane":
                mdef = _parse_membrane(ts, sig)
                if mdef.name in membranes:
                    diags.append(Diagnostic(tok.line, tok.col,
                                            f"duplicate membrane name {mdef.name}"))
                membranes[mdef.name] = mdef
            elif tok.text in _COMMAND_WORDS and tok.kind == "ident":
                commands.append(_capture_command(ts))
            else:
                ts.fail(f"expected signature, membrane, or command, "
                        f"found {tok.text!r}")
        except DiagnosticsError as err:
            diags.extend(err.diagnostics)
            _skip_statement(ts)

    if diags:
        raise DiagnosticsError(diags)

    if sig is None:
        # No signature block: atoms are collected implicitly from the rules.
        atoms = set()
        for mdef in membranes.values():
            for rule in mdef.rules:
                _collect_atoms(rule, atoms)
        sig = Signature(atoms=frozenset(atoms), explicit=False)

    return SystemSpec(signature=sig, membranes=membranes,
                      commands=tuple(commands))


def _skip_statement(ts):
    while not ts.at_kind("eof"):
        tok = ts.next()
        if tok.text == "." or tok.text == "end":
            return


def _capture_command(ts):
    start = ts.peek()
    word = start.text
    if word in _TERM_COMMANDS:
        # Runs to a '.' token that closes the line (formulas contain
        # interior dots, e.g. fixpoint binders).
        while not ts.at_kind("eof"):
            tok = ts.next()
            if tok.text == ".":
                nxt = ts.peek()
                if nxt.kind == "eof" or nxt.line > tok.line:
                    return ts.text[start.pos:tok.end].strip()
        ts.fail("command not terminated with '.'", start)
    else:
        last = start
        while not ts.at_kind("eof") and ts.peek().line == start.line:
            last = ts.next()
        return ts.text[start.pos:last.end].strip()


def _parse_signature(ts):
    ts.expect("signature")
    ts.expect("is")
    atoms = set()
    compounds = {}
    seq_identity = None
    imports_nat = False

    while not ts.at("end"):
        if ts.at_kind("eof"):
            ts.fail("signature block not closed with 'end'")
        if ts.accept("import"):
            mod = ts.expect_ident("module name")
            if mod.text != "NAT":
                ts.fail(f"unsupported import {mod.text}", mod)
            imports_nat = True
            ts.expect(".")
            continue
        kw = ts.peek()
        if kw.text not in ("ob", "obs"):
            ts.fail(f"expected ob/obs/import declaration, found {kw.text!r}")
        ts.next()

        symbols = []
        mixfix = False
        while True:
            tok = ts.peek()
            if tok.kind == "ident":
                if tok.text == "_" and ts.peek(1).text == "·" \
                        and ts.peek(2).text == "_":
                    ts.next(), ts.next(), ts.next()
                    mixfix = True
                    symbols.append("_·_")
                else:
                    symbols.append(ts.next().text)
            else:
                break
        if not symbols:
            ts.fail("expected at least one object symbol")

        sorts = []
        if ts.accept(":"):
            while ts.peek().text in ("Nat", "Bool", "Obj"):
                sorts.append(ts.next().text)
            if not sorts:
                ts.fail("expected sorts Nat, Bool, or Obj")

        identity = None
        if ts.accept("["):
            ts.expect("assoc")
            ts.expect("id")
            ts.expect(":")
            identity = ts.expect_ident("identity atom").text
            if ts.accept("prec"):
                if not ts.at_kind("nat"):
                    ts.fail("expected precedence number")
                ts.next()
            ts.expect("]")
        ts.expect(".")

        if mixfix or identity is not None:
            if not mixfix:
                ts.fail("assoc attribute requires the _·_ operator")
            if seq_identity is not None:
                ts.fail("at most one sequence operator may be declared")
            if sorts != ["Obj", "Obj"]:
                ts.fail("the sequence operator must have sorts Obj Obj")
            seq_identity = identity
            atoms.add(identity)
        elif sorts:
            for sym in symbols:
                compounds[sym] = tuple(sorts)
        else:
            atoms.update(symbols)

    ts.expect("end")
    return Signature(atoms=frozenset(atoms), compounds=compounds,
                     seq_identity=seq_identity, imports_nat=imports_nat,
                     explicit=True)


def _parse_membrane(ts, sig):
    ts.expect("membrane")
    name = ts.expect_ident("membrane name").text
    ts.expect("is")
    rules = []
    priorities = []
    var_sorts = {}

    while not ts.at("end"):
        tok = ts.peek()
        if ts.at_kind("eof"):
            ts.fail(f"membrane {name} not closed with 'end'")
        if tok.text == "var":
            ts.next()
            names = []
            while ts.at_kind("ident") and not ts.at(":"):
                names.append(ts.next().text)
            ts.expect(":")
            sort = ts.expect_ident("variable sort").text
            if sort not in ("Nat", "Bool"):
                ts.fail(f"variable sorts are Nat or Bool, not {sort}")
            ts.expect(".")
            for v in names:
                var_sorts[v] = sort
        elif tok.text in (lang.EV, lang.XEV, lang.CEV):
            rules.append(_parse_rule(ts, sig, var_sorts))
        elif tok.text == "pr":
            ts.next()
            left, right = [], []
            side = left
            while not ts.at("."):
                if ts.at(">"):
                    ts.next()
                    side = right
                    continue
                side.append(ts.expect_ident("rule label").text)
            ts.expect(".")
            if not left or not right:
                ts.fail("priority declaration needs labels on both sides")
            for hi in left:
                for lo in right:
                    priorities.append((hi, lo))
        else:
            ts.fail(f"expected var, ev, xev, cev, pr, or end, "
                    f"found {tok.text!r}")

    ts.expect("end")
    return MembraneDef(name=name, rules=tuple(rules),
                       priorities=tuple(priorities), var_sorts=var_sorts)


def _parse_rule(ts, sig, var_sorts):
    kind = ts.next().text
    label = ts.expect_ident("rule label").text
    ts.expect(":")
    tp = _TermParser(ts, sig, var_sorts, ground=False)
    lhs = tp.parse_soup(stop={"->"})
    ts.expect("->")

    rhs = []
    while not ts.at(".") and not ts.at("with") and not ts.at("without"):
        if ts.at("("):
            part = tp.parse_paren_or_message()
            if isinstance(part, (RhsDirected, RhsDivision)):
                rhs.append(part)
            else:
                rhs.append(RhsDirected(core.HERE, part))
        else:
            payload = tp.parse_soup(stop={"->", "with", "without"},
                                    single_item=True)
            rhs.append(RhsDirected(core.HERE, payload))

    promoters = core.EMPTY_SOUP
    inhibitors = core.EMPTY_SOUP
    if ts.accept("with"):
        promoters = tp.parse_soup(stop={"without"})
    if ts.accept("without"):
        inhibitors = tp.parse_soup(stop=set())
    ts.expect(".")

    # Merge adjacent bare here-parts into one.
    merged = []
    here_payload = core.EMPTY_SOUP
    for part in rhs:
        if isinstance(part, RhsDirected) and part.target == core.HERE:
            here_payload = _soup_add(here_payload, part.payload)
        else:
            merged.append(part)
    if here_payload:
        merged.insert(0, RhsDirected(core.HERE, here_payload))

    return RuleDef(label=label, kind=kind, lhs=lhs, rhs=tuple(merged),
                   promoters=promoters, inhibitors=inhibitors)


def _soup_add(a, b):
    from membranes import kernel
    return kernel.add(a, b)


def _collect_atoms(rule, atoms):
    def scan(pattern_soup):
        for item, _ in pattern_soup:
            if item[0] == core.ATOM and item[1] != core.DELTA_NAME:
                atoms.add(item[1])
            elif item[0] == core.SEQ:
                atoms.update(item[1])

    scan(rule.lhs)
    scan(rule.promoters)
    scan(rule.inhibitors)
    for part in rule.rhs:
        if isinstance(part, RhsDirected):
            scan(part.payload)
        else:
            scan(part.left)
            scan(part.right)


# ---------------------------------------------------------------------------
# Terms (soups, objects, messages, membranes)

_SOUP_STOP = {".", "->", "with", "without", ",", ")", ">", "|", "end",
              "satisfies", "U"}


class _TermParser:
    """Parses soups either as ground terms or as rule patterns.

    In pattern mode, identifiers declared with ``var`` parse as variables
    and compound arguments may use ``s(...)`` and ``not ...`` expressions.
    """

    def __init__(self, ts, sig, var_sorts=None, ground=True):
        self.ts = ts
        self.sig = sig or Signature()
        self.var_sorts = var_sorts or {}
        self.ground = ground

    def parse_soup(self, stop=frozenset(), single_item=False):
        ts = self.ts
        if ts.at("empty"):
            ts.next()
            return core.EMPTY_SOUP
        items = []
        while True:
            tok = ts.peek()
            if tok.kind == "eof" or tok.text in stop or tok.text in _SOUP_STOP:
                break
            items.append(self.parse_item())
            if single_item:
                break
        if not items:
            ts.fail("expected a soup (or 'empty')")
        return core.soup((item, 1) for item in items)

    def parse_item(self):
        ts = self.ts
        tok = ts.peek()
        if tok.text == "<":
            return self._parse_membrane_term()
        if tok.text == "(":
            part = self.parse_paren_or_message()
            if isinstance(part, (RhsDirected, RhsDivision)):
                if self.ground:
                    if isinstance(part, RhsDivision):
                        return core.division(part.left, part.right)
                    return core.directed(part.target, part.payload)
                ts.fail("messages are not allowed in rule patterns here")
            if len(part) == 1 and part[0][1] == 1:
                return part[0][0]
            ts.fail("parenthesized group must be a single object")
        if tok.kind != "ident":
            ts.fail(f"expected an object, found {tok.text!r}")
        return self._parse_object()

    def _parse_membrane_term(self):
        ts = self.ts
        if not self.ground:
            ts.fail("membranes cannot occur in rule patterns")
        ts.expect("<")
        name = ts.expect_ident("membrane name").text
        ts.expect("|")
        inner = self.parse_soup()
        ts.expect(">")
        return core.membrane(name, inner)

    def parse_paren_or_message(self):
        """After '(' — a seq/object group, or a (soup, target) message,
        or a (soup, soup, div) division message."""
        ts = self.ts
        ts.expect("(")
        first = self.parse_soup(stop={",", ")"})
        if ts.accept(","):
            tok = ts.peek()
            if tok.text in ("here", "out", "in"):
                target = self._parse_target()
                ts.expect(")")
                return RhsDirected(target, first)
            second = self.parse_soup(stop={",", ")"})
            ts.expect(",")
            ts.expect("div")
            ts.expect(")")
            return RhsDivision(first, second)
        ts.expect(")")
        return first

    def _parse_target(self):
        ts = self.ts
        if ts.accept("here"):
            return core.HERE
        if ts.accept("out"):
            return core.OUT
        ts.expect("in")
        name = ts.expect_ident("membrane name").text
        return core.target_in(name)

    def _parse_object(self):
        ts = self.ts
        tok = ts.expect_ident("object symbol")
        name = tok.text

        # Only declared compound symbols take arguments; for an atom, a
        # following '(' starts the next soup item.
        if ts.at("(") and name in self.sig.compounds:
            obj = self._parse_compound(name, tok)
        else:
            obj = self._atom(name, tok)

        if ts.at("·"):
            parts = list(core.seq_atoms(obj)) if obj[0] != core.COMPOUND \
                else ts.fail("structured objects cannot occur in sequences", tok)
            while ts.accept("·"):
                nxt = ts.expect_ident("sequence atom")
                parts.extend(core.seq_atoms(self._atom(nxt.text, nxt)))
            identity = self.sig.seq_identity
            if identity is None:
                ts.fail("no sequence operator declared in the signature", tok)
            parts = [p for p in parts if p != identity]
            return core.seq_or_atom(parts, identity)
        return obj

    def _atom(self, name, tok):
        if name in self.var_sorts and not self.ground:
            self.ts.fail(f"variable {name} cannot stand alone as an object",
                         tok)
        # With an explicit signature, unknown symbols are errors; without
        # one, ground terms are checked against the atoms the rules use
        # implicitly (rule parsing itself runs unchecked and collects them).
        if not self.sig.knows_atom(name) \
                and (self.sig.explicit or (self.ground and self.sig.atoms)):
            if name in self.sig.compounds:
                self.ts.fail(f"object symbol {name} expects arguments", tok)
            self.ts.fail(f"unknown object symbol {name}", tok)
        return core.atom(name)

    def _parse_compound(self, name, tok):
        ts = self.ts
        sorts = self.sig.compounds.get(name)
        if sorts is None:
            ts.fail(f"unknown object symbol {name}", tok)
        ts.expect("(")
        args = []
        if not ts.at(")"):
            args.append(self._parse_arg(sorts, len(args), tok))
            while ts.accept(","):
                args.append(self._parse_arg(sorts, len(args), tok))
        ts.expect(")")
        if len(args) != len(sorts):
            ts.fail(f"{name} expects {len(sorts)} arguments, got {len(args)}",
                    tok)
        if self.ground:
            return core.compound(name, [a[1] for a in args])
        return (core.COMPOUND, name, tuple(args))

    def _parse_arg(self, sorts, index, ctx):
        ts = self.ts
        if index >= len(sorts):
            ts.fail("too many arguments", ctx)
        sort = sorts[index]
        expr = self._parse_arg_expr(sort)
        return expr

    def _parse_arg_expr(self, sort):
        ts = self.ts
        tok = ts.peek()
        if tok.kind == "nat":
            ts.next()
            if sort != "Nat":
                ts.fail(f"expected a {sort} argument, found number", tok)
            self._check_nat_enabled(tok)
            return ("lit", int(tok.text))
        if tok.text in ("true", "false") and sort == "Bool":
            ts.next()
            self._check_nat_enabled(tok)
            return ("lit", tok.text == "true")
        if tok.text == "s" and ts.peek(1).text == "(" and sort == "Nat":
            ts.next()
            ts.expect("(")
            inner = self._parse_arg_expr("Nat")
            ts.expect(")")
            if self.ground:
                return ("lit", inner[1] + 1)
            return ("succ", inner)
        if tok.text == "not" and sort == "Bool" \
                and ts.peek(1).text != "," and ts.peek(1).text != ")":
            ts.next()
            inner = self._parse_arg_expr("Bool")
            if self.ground:
                return ("lit", not inner[1])
            return ("bnot", inner)
        if tok.kind == "ident":
            ts.next()
            name = tok.text
            if not self.ground and name in self.var_sorts:
                if self.var_sorts[name] != sort:
                    ts.fail(f"variable {name} has sort {self.var_sorts[name]},"
                            f" expected {sort}", tok)
                return ("var", name)
            if sort != "Obj":
                ts.fail(f"expected a {sort} argument, found {name!r}", tok)
            if self.sig.explicit and not self.sig.knows_atom(name):
                ts.fail(f"unknown object symbol {name}", tok)
            return ("lit", name)
        ts.fail(f"expected an argument, found {tok.text!r}", tok)

    def _check_nat_enabled(self, tok):
        if self.sig.explicit and not self.sig.imports_nat:
            self.ts.fail("Nat/Bool literals require 'import NAT .'", tok)


def parse_configuration(text, spec):
    """Parse a ground configuration term against a loaded spec."""
    ts = TokenStream(text)
    tp = _TermParser(ts, spec.signature, ground=True)
    config = tp.parse_soup()
    tok = ts.peek()
    if tok.kind != "eof" and tok.text != ".":
        ts.fail(f"unexpected input after configuration: {tok.text!r}")
    _check_membrane_names(config, spec, ts)
    return config


def _check_membrane_names(ms, spec, ts):
    for item, _ in ms:
        if item[0] == core.MEMB:
            if item[1] not in spec.membranes:
                ts.fail(f"unknown membrane name {item[1]}",
                        Token("ident", item[1], 1, 1, 0, 0))
            _check_membrane_names(item[2], spec, ts)
        elif item[0] == core.MSG:
            if item[1][0] == 2 and item[1][1] not in spec.membranes:
                ts.fail(f"unknown membrane name {item[1][1]}",
                        Token("ident", item[1][1], 1, 1, 0, 0))


# ---------------------------------------------------------------------------
# Formulas

def parse_formula(text, spec=None):
    """Parse a temporal formula; checks binding and layer coherence."""
    ts = TokenStream(text)
    fp = _FormulaParser(ts, spec)
    f = fp.parse_formula()
    tok = ts.peek()
    if tok.kind != "eof" and tok.text != ".":
        ts.fail(f"unexpected input after formula: {tok.text!r}")
    _check_bound_fixvars(f, frozenset(), ts)
    lang.formula_layer(f)
    return f


def _check_bound_fixvars(f, bound, ts):
    if isinstance(f, lang.FixVar):
        if f.name not in bound:
            ts.fail(f"unbound fixpoint variable {f.name}",
                    Token("ident", f.name, 1, 1, 0, 0))
    elif isinstance(f, (lang.Mu, lang.Nu)):
        _check_bound_fixvars(f.body, bound | {f.var}, ts)
    elif isinstance(f, lang.Not):
        _check_bound_fixvars(f.operand, bound, ts)
    elif isinstance(f, (lang.And, lang.Or, lang.Implies, lang.Until)):
        _check_bound_fixvars(f.left, bound, ts)
        _check_bound_fixvars(f.right, bound, ts)
    elif isinstance(f, (lang.Next, lang.Always, lang.Eventually,
                        lang.Box, lang.Diamond)):
        _check_bound_fixvars(f.operand, bound, ts)
    elif isinstance(f, (lang.Exists, lang.ForAll)):
        _check_bound_fixvars(f.path, bound, ts)


_FORMULA_KEYWORDS = {"isAlive", "contains", "count", "mu", "nu",
                     "True", "False", "U", "A", "E", "O", "divides",
                     "satisfies"}


class _FormulaParser:
    def __init__(self, ts, spec=None):
        self.ts = ts
        self.spec = spec

    def parse_formula(self):
        ts = self.ts
        if ts.at("mu") or ts.at("nu"):
            word = ts.next().text
            var = ts.expect_ident("fixpoint variable").text
            ts.expect(".")
            body = self.parse_formula()
            return (lang.Mu if word == "mu" else lang.Nu)(var, body)
        return self._implies()

    def _implies(self):
        left = self._or()
        if self.ts.accept("->"):
            right = self.parse_formula()
            return lang.Implies(left, right)
        return left

    def _or(self):
        f = self._and()
        while self.ts.accept("\\/"):
            f = lang.Or(f, self._and())
        return f

    def _and(self):
        f = self._until()
        while self.ts.accept("/\\"):
            f = lang.And(f, self._until())
        return f

    def _until(self):
        f = self._unary()
        if self.ts.at("U"):
            self.ts.next()
            return lang.Until(f, self._until())
        return f

    def _unary(self):
        ts = self.ts
        tok = ts.peek()
        if tok.text == "~":
            ts.next()
            return lang.Not(self._unary())
        if tok.text == "O" and tok.kind == "ident":
            ts.next()
            return lang.Next(self._unary())
        if tok.text == "[]":
            ts.next()
            return lang.Always(self._unary())
        if tok.text == "<>":
            ts.next()
            return lang.Eventually(self._unary())
        if tok.text == "[.]":
            ts.next()
            return lang.Box(self._unary())
        if tok.text == "<.>":
            ts.next()
            return lang.Diamond(self._unary())
        if tok.text in ("A", "E") and tok.kind == "ident":
            ts.next()
            path = self._path(tok.text)
            return (lang.Exists if tok.text == "E" else lang.ForAll)(path)
        return self._primary()

    def _path(self, quantifier):
        ts = self.ts
        tok = ts.peek()
        if tok.text == "O" and tok.kind == "ident":
            ts.next()
            return lang.Next(self._unary())
        if tok.text == "[]":
            ts.next()
            return lang.Always(self._unary())
        if tok.text == "<>":
            ts.next()
            return lang.Eventually(self._unary())
        if tok.text in ("[", "("):
            closing = "]" if tok.text == "[" else ")"
            ts.next()
            inner = self.parse_formula()
            ts.expect(closing)
            if isinstance(inner, lang.Until):
                return inner
            ts.fail(f"path quantifier {quantifier} requires a temporal "
                    "operator (O, [], <>, or U)", tok)
        ts.fail(f"expected a path formula after {quantifier}", tok)

    def _primary(self):
        ts = self.ts
        tok = ts.peek()
        if tok.text == "(":
            ts.next()
            f = self.parse_formula()
            ts.expect(")")
            return f
        if tok.text == "{":
            ts.next()
            expr = self._cmp()
            ts.expect("}")
            return lang.Brace(expr)
        if tok.text == "True":
            ts.next()
            return lang.TrueF()
        if tok.text == "False":
            ts.next()
            return lang.FalseF()
        if tok.text == "isAlive":
            ts.next()
            ts.expect("(")
            name = ts.expect_ident("membrane name").text
            ts.expect(")")
            return lang.IsAlive(name)
        if tok.text == "contains":
            ts.next()
            ts.expect("(")
            name = ts.expect_ident("membrane name").text
            ts.expect(",")
            objects = self._ground_soup()
            ts.expect(")")
            return lang.Contains(name, objects)
        if tok.kind == "ident" and tok.text not in _FORMULA_KEYWORDS:
            ts.next()
            return lang.FixVar(tok.text)
        ts.fail(f"expected a formula, found {tok.text!r}")

    def _ground_soup(self):
        sig = self.spec.signature if self.spec else Signature()
        tp = _TermParser(self.ts, sig, ground=True)
        return tp.parse_soup(stop={")"})

    def _cmp(self):
        left = self._nat_expr()
        tok = self.ts.peek()
        if tok.text in ("=", "<", "<=", ">", ">=", "divides"):
            op = self.ts.next().text
        else:
            self.ts.fail(f"expected a comparison operator, found {tok.text!r}")
        right = self._nat_expr()
        return lang.Cmp(op, left, right)

    def _nat_expr(self):
        e = self._nat_term()
        while self.ts.at("+"):
            self.ts.next()
            e = lang.NatOp("+", e, self._nat_term())
        return e

    def _nat_term(self):
        e = self._nat_pow()
        while self.ts.at("*"):
            self.ts.next()
            e = lang.NatOp("*", e, self._nat_pow())
        return e

    def _nat_pow(self):
        e = self._nat_atom()
        if self.ts.at("^"):
            self.ts.next()
            return lang.NatOp("^", e, self._nat_pow())
        return e

    def _nat_atom(self):
        ts = self.ts
        tok = ts.peek()
        if tok.kind == "nat":
            ts.next()
            return lang.NatLit(int(tok.text))
        if tok.text == "count":
            ts.next()
            ts.expect("(")
            name = ts.expect_ident("membrane name").text
            ts.expect(",")
            objects = self._ground_soup()
            ts.expect(")")
            if not objects:
                ts.fail("count pattern must be nonempty", tok)
            return lang.Count(name, objects)
        if tok.text == "(":
            ts.next()
            e = self._nat_expr()
            ts.expect(")")
            return e
        ts.fail(f"expected a number or count(...), found {tok.text!r}")


# ---------------------------------------------------------------------------
# Rendering of definitions (for the `show` command)

def render_rule(rule):
    parts = [rule.kind, rule.label, ":", render_pattern_soup(rule.lhs), "->"]
    rhs_texts = []
    for part in rule.rhs:
        if isinstance(part, RhsDirected):
            if part.target == core.HERE:
                rhs_texts.append(render_pattern_soup(part.payload))
            else:
                rhs_texts.append(f"({render_pattern_soup(part.payload)}, "
                                 f"{_target_text(part.target)})")
        else:
            rhs_texts.append(f"({render_pattern_soup(part.left)}, "
                             f"{render_pattern_soup(part.right)}, div)")
    parts.append(" ".join(rhs_texts) if rhs_texts else "empty")
    if rule.promoters:
        parts.append("with")
        parts.append(render_pattern_soup(rule.promoters))
    if rule.inhibitors:
        parts.append("without")
        parts.append(render_pattern_soup(rule.inhibitors))
    parts.append(".")
    return " ".join(parts)


def _target_text(target):
    if target == core.HERE:
        return "here"
    if target == core.OUT:
        return "out"
    return f"in {target[1]}"


def render_pattern_soup(pattern_soup):
    if not pattern_soup:
        return "empty"
    out = []
    for item, count in pattern_soup:
        out.extend([render_pattern_item(item)] * count)
    return " ".join(out)


def render_pattern_item(item):
    if item[0] == core.COMPOUND:
        args = ", ".join(_render_arg_expr(a) for a in item[2])
        return f"{item[1]}({args})"
    return core.render_item(item)


def _render_arg_expr(arg):
    tag = arg[0]
    if tag == "lit":
        return core._render_arg(arg[1])
    if tag == "var":
        return arg[1]
    if tag == "succ":
        return f"s({_render_arg_expr(arg[1])})"
    return f"not {_render_arg_expr(arg[1])}"


def render_membrane_def(mdef):
    lines = [f"membrane {mdef.name} is"]
    if mdef.var_sorts:
        by_sort = {}
        for name, sort in mdef.var_sorts.items():
            by_sort.setdefault(sort, []).append(name)
        for sort in sorted(by_sort):
            lines.append(f"  var {' '.join(sorted(by_sort[sort]))} : {sort} .")
    for rule in mdef.rules:
        lines.append("  " + render_rule(rule))
    for hi, lo in mdef.priorities:
        lines.append(f"  pr {hi} > {lo} .")
    lines.append("end")
    return "\n".join(lines)
