"""Specification, configuration, and formula parsing plus validation."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from membranes import core, lang
from membranes.lang import DiagnosticsError
from membranes.parser import parse_configuration, parse_formula, parse_spec
from membranes.systems import read

ALL_SYSTEMS = ["divisors", "nsquare", "strings", "sat", "sat_promoters"]


@pytest.fixture(scope="module")
def divisors():
    return parse_spec(read("divisors"))


@pytest.fixture(scope="module")
def sat():
    return parse_spec(read("sat"))


class TestParseSpec:
    def test_divisors_shape(self, divisors):
        m2 = divisors.membranes["M2"]
        assert [r.label for r in m2.rules] \
            == ["r21", "r22", "r23", "r24", "r25", "r26"]
        assert set(m2.priorities) == {("r24", "r26"), ("r25", "r26")}

    def test_ruleless_membrane(self):
        spec = parse_spec("membrane M1 is end")
        assert spec.membranes["M1"].rules == ()

    def test_unknown_priority_label(self):
        spec = parse_spec("membrane M is ev r : a -> b . pr r > rX . end")
        diags = lang.validate_spec(spec)
        assert any("unknown rule label rX" in d.message for d in diags)

    @pytest.mark.parametrize("name", ALL_SYSTEMS)
    def test_bundled_systems_validate(self, name):
        spec = parse_spec(read(name))
        assert lang.validate_spec(spec) == []

    def test_priority_cycle(self):
        spec = parse_spec(
            "membrane M is ev r1 : a -> b . ev r2 : b -> a . "
            "pr r1 > r2 . pr r2 > r1 . end")
        diags = lang.validate_spec(spec)
        assert any("priority cycle" in d.message for d in diags)

    def test_inhibitor_fresh_variable(self):
        spec = parse_spec(
            "signature is import NAT . ob f : Nat . end "
            "membrane M is var H K : Nat . "
            "cev r : f(H) -> f(H) without f(K) . end")
        diags = lang.validate_spec(spec)
        assert any("inhibitor binds new variable" in d.message for d in diags)

    def test_duplicate_membrane(self):
        with pytest.raises(DiagnosticsError) as err:
            parse_spec("membrane M is end membrane M is end")
        assert any("duplicate membrane" in d.message
                   for d in err.value.diagnostics)

    def test_syntax_error_has_location(self):
        with pytest.raises(DiagnosticsError) as err:
            parse_spec("membrane M is ev r1 a -> b . end")
        diag = err.value.diagnostics[0]
        assert diag.line == 1 and diag.col > 0

    def test_delta_only_in_rhs(self):
        spec = parse_spec("membrane M is ev r : delta -> a . end")
        diags = lang.validate_spec(spec)
        assert any("delta" in d.message for d in diags)

    def test_commands_captured(self):
        text = read("divisors") + "\ncompute < M1 | a a tic < M2 | empty > > .\n"
        spec = parse_spec(text)
        assert len(spec.commands) == 1
        assert spec.commands[0].startswith("compute")

    def test_multiline_command_capture(self):
        text = ("membrane M1 is ev r : a -> a . end\n"
                "trans < M1 | a\n a a > .\n")
        spec = parse_spec(text)
        assert spec.commands == ("trans < M1 | a\n a a > .",)

    def test_unsupported_import(self):
        with pytest.raises(DiagnosticsError) as err:
            parse_spec("signature is import STRING . end")
        assert any("unsupported import" in d.message
                   for d in err.value.diagnostics)

    def test_xev_multiple_targets_rejected(self):
        spec = parse_spec(
            "signature is ob _·_ : Obj Obj [assoc id: eps] . obs a b . end "
            "membrane M is xev r : a -> (a, out) (b, here) . end")
        diags = lang.validate_spec(spec)
        assert any("xev" in d.message for d in diags)


class TestParseConfiguration:
    def test_nested(self, divisors):
        cfg = parse_configuration("< M1 | a a a tic < M2 | d tac > >",
                                  divisors)
        assert core.render_configuration(cfg) \
            == "< M1 | a a a tic < M2 | d tac > >"

    def test_empty_soup(self, divisors):
        cfg = parse_configuration("< M2 | empty >", divisors)
        assert cfg == core.soup_of([core.membrane("M2", core.EMPTY_SOUP)])

    def test_compound_args(self, sat):
        cfg = parse_configuration("< M1 | and(0, 1, 2) var(1) not(2, 1) >",
                                  sat)
        (skin, _), = cfg
        objects, _, _ = core.partition_soup(skin[2])
        assert (core.compound("and", (0, 1, 2)), 1) in objects
        assert (core.compound("not", (2, 1)), 1) in objects

    def test_unknown_membrane(self, divisors):
        with pytest.raises(DiagnosticsError) as err:
            parse_configuration("< M9 | a >", divisors)
        assert "unknown membrane" in str(err.value)

    def test_unknown_symbol(self, divisors):
        with pytest.raises(DiagnosticsError):
            parse_configuration("< M1 | zz >", divisors)

    def test_arity_mismatch(self, sat):
        with pytest.raises(DiagnosticsError) as err:
            parse_configuration("< M1 | var(1, 2) >", sat)
        assert "argument" in str(err.value)

    def test_message_terms(self, divisors):
        cfg = parse_configuration("< M1 | (a tic, in M2) < M2 | empty > >",
                                  divisors)
        (skin, _), = cfg
        _, msgs, _ = core.partition_soup(skin[2])
        assert msgs == ((core.directed(core.target_in("M2"),
                                       core.soup_of([core.atom("a"),
                                                     core.atom("tic")])), 1),)

    def test_roundtrip_bundled_configs(self, divisors):
        for text in ("< M1 | a a tic < M2 | empty > >",
                     "< M2 | delta d d >",
                     "< M1 | (a b, out) c >"):
            cfg = parse_configuration(text, divisors)
            again = parse_configuration(
                core.render_configuration(cfg), divisors)
            assert cfg == again


class TestParseFormula:
    def test_ltl_always_implies_next(self):
        f = parse_formula("[] (contains(M2, tac) -> O contains(M2, tic))")
        assert f == lang.Always(lang.Implies(
            lang.Contains("M2", core.soup_of([core.atom("tac")])),
            lang.Next(lang.Contains("M2", core.soup_of([core.atom("tic")])))))

    def test_ctl_exists_eventually(self):
        f = parse_formula("E <> { count(M1, d) divides 12 }")
        assert isinstance(f, lang.Exists)
        assert isinstance(f.path, lang.Eventually)
        brace = f.path.operand
        assert brace.expr.op == "divides"

    def test_mu_degenerate(self):
        f = parse_formula("mu Z . Z")
        assert f == lang.Mu("Z", lang.FixVar("Z"))

    def test_nu_formula(self):
        f = parse_formula(
            "nu Z . (isAlive(M2) /\\ [.] (~ isAlive(M2) \\/ [.] Z))")
        assert isinstance(f, lang.Nu)
        assert isinstance(f.body, lang.And)

    def test_unbound_fixvar(self):
        with pytest.raises(DiagnosticsError) as err:
            parse_formula("[.] Z")
        assert "unbound fixpoint variable" in str(err.value)

    def test_mixed_layers_rejected(self):
        with pytest.raises(DiagnosticsError) as err:
            parse_formula("([] isAlive(M1)) /\\ (mu Z . Z)")
        assert "mixes temporal layers" in str(err.value)

    def test_until_and_brackets(self):
        one = parse_formula("E [ isAlive(M1) U isAlive(M2) ]")
        two = parse_formula("E (isAlive(M1) U isAlive(M2))")
        assert one == two

    def test_nat_expr_precedence(self):
        f = parse_formula("{ count(M1, d) ^ 2 = count(M1, e) }")
        assert f.expr.left == lang.NatOp(
            "^", lang.Count("M1", core.soup_of([core.atom("d")])),
            lang.NatLit(2))

    def test_arith_layers(self):
        f = parse_formula("{ 1 + 2 * 3 ^ 2 = 19 }")
        assert f.expr.left == lang.NatOp(
            "+", lang.NatLit(1),
            lang.NatOp("*", lang.NatLit(2),
                       lang.NatOp("^", lang.NatLit(3), lang.NatLit(2))))


# Round trips: render then reparse gives the same AST.

def _formulas(depth):
    leaves = st.sampled_from([
        lang.TrueF(), lang.FalseF(),
        lang.IsAlive("M1"), lang.IsAlive("M2"),
        lang.Contains("M1", core.soup_of([core.atom("a")])),
        lang.Brace(lang.Cmp("=", lang.Count(
            "M1", core.soup_of([core.atom("d")])), lang.NatLit(2))),
    ])
    unary = [lang.Not, lang.Next, lang.Always, lang.Eventually]
    binary = [lang.And, lang.Or, lang.Implies, lang.Until]
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            st.builds(lambda c, f: c(f), st.sampled_from(unary), sub),
            st.builds(lambda c, l, r: c(l, r), st.sampled_from(binary),
                      sub, sub)),
        max_leaves=depth)


@given(f=_formulas(6))
def test_ltl_formula_roundtrip(f):
    assert parse_formula(lang.render_formula(f)) == f


@given(f=_formulas(4))
def test_ctl_formula_roundtrip(f):
    layer = lang.formula_layer(f)
    if layer == lang.LTL_LAYER:
        return  # quantify only path-shaped formulas
    for quant in (lang.Exists, lang.ForAll):
        for path in (lang.Always(f), lang.Eventually(f), lang.Next(f),
                     lang.Until(f, f)):
            g = quant(path)
            assert parse_formula(lang.render_formula(g)) == g


def test_mu_formula_roundtrip():
    f = parse_formula(
        "nu Z . (isAlive(M2) /\\ [.] (~ isAlive(M2) \\/ [.] Z))")
    assert parse_formula(lang.render_formula(f)) == f
    g = parse_formula("mu Z . (isAlive(M1) \\/ <.> Z)")
    assert parse_formula(lang.render_formula(g)) == g
