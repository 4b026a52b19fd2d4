from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgqa.kg import AttributeValue
from kgqa.pylf import (
    And,
    Arg,
    Cmp,
    ConstraintProfile,
    Count,
    Datatype,
    EntityClass,
    EntityRef,
    IntegerCount,
    Join,
    Mention,
    PylfParseError,
    PylfTypeError,
    RelationRef,
    Start,
    Stop,
    infer_type,
    parse_pylf,
    print_pylf,
    profile_constraints,
    resolve_exact,
    validate,
)

from generators import random_ast

Q2_TEXT = "STOP(AND(JOIN('R_producing', START('Boeing Company'), neg=True), CMP('<', 'mass', 2.32e+03)))"

Q2_AST = Stop(
    inner=And(
        left=Join(
            rel=RelationRef("producing"),
            inner=Start(leaf=Mention("Boeing Company")),
            reversed=True,
            neg=True,
        ),
        right=Cmp(op="<", rel=RelationRef("mass"), bound=AttributeValue("float", 2320.0)),
    )
)


class TestParser:
    def test_q2(self):
        assert parse_pylf(Q2_TEXT) == Q2_AST

    def test_minimal_program(self):
        assert parse_pylf("STOP(START('Saturn'))") == Stop(inner=Start(leaf=Mention("Saturn")))

    def test_nested_count_rejected(self):
        with pytest.raises(PylfParseError, match="COUNT"):
            parse_pylf("STOP(COUNT(COUNT(START('x'))))")

    def test_whitespace_insensitive(self):
        spread = "STOP(\n  AND( JOIN('R_producing',\n START('Boeing Company'), neg=True),\n CMP('<','mass',2.32e+03) ) )"
        assert parse_pylf(spread) == Q2_AST

    def test_omitted_neg_defaults_false(self):
        expr = parse_pylf("STOP(JOIN('producing', START('Saturn')))")
        assert expr.inner.neg is False
        assert expr.inner.reversed is False

    def test_reversed_prefix(self):
        expr = parse_pylf("STOP(JOIN('R_producing', START('x')))")
        assert expr.inner.reversed is True
        assert expr.inner.rel.name == "producing"

    def test_positional_neg(self):
        expr = parse_pylf("STOP(JOIN('r', START('x'), True))")
        assert expr.inner.neg is True

    def test_bare_string_is_start_shorthand(self):
        assert parse_pylf("STOP(JOIN('producing', 'Saturn'))") == parse_pylf(
            "STOP(JOIN('producing', START('Saturn')))"
        )

    def test_nary_and_left_nested(self):
        expr = parse_pylf("STOP(AND(START('a'), START('b'), START('c')))")
        assert isinstance(expr.inner, And)
        assert isinstance(expr.inner.left, And)

    def test_assignment_style(self):
        text = """
        e1 = START('Boeing Company')
        e2 = JOIN('R_producing', e1, neg=True)
        e3 = CMP('<', 'mass', 2.32e+03)
        STOP(AND(e2, e3))
        """
        assert parse_pylf(text) == Q2_AST

    def test_unknown_function(self):
        with pytest.raises(PylfParseError, match="unknown function"):
            parse_pylf("STOP(JOINN('x', START('y')))")

    def test_missing_stop(self):
        with pytest.raises(PylfParseError, match="STOP"):
            parse_pylf("JOIN('r', START('x'))")

    def test_nested_stop(self):
        with pytest.raises(PylfParseError, match="root"):
            parse_pylf("STOP(STOP(START('x')))")

    def test_arity_error(self):
        with pytest.raises(PylfParseError, match="too many arguments"):
            parse_pylf("STOP(COUNT(START('x'), START('y')))")

    def test_syntax_error_carries_position(self):
        with pytest.raises(PylfParseError) as err:
            parse_pylf("STOP(JOIN('r' START('x')))")
        assert err.value.pos is not None

    def test_bad_cmp_operator(self):
        with pytest.raises(PylfParseError, match="operator"):
            parse_pylf("STOP(CMP('!=', 'mass', 1.0))")

    def test_bad_arg_mode(self):
        with pytest.raises(PylfParseError, match="ARG mode"):
            parse_pylf("STOP(ARG('MAX', START('x'), 'mass'))")

    def test_cmp_date_bound(self):
        expr = parse_pylf("STOP(CMP('>', 'founded', '1990-01-01'))")
        assert expr.inner.bound == AttributeValue("date", "1990-01-01")

    def test_double_quotes_accepted(self):
        assert parse_pylf('STOP(START("Saturn"))') == parse_pylf("STOP(START('Saturn'))")


class TestPrinter:
    def test_q2_round_trip(self):
        assert parse_pylf(print_pylf(Q2_AST)) == Q2_AST

    def test_trivial(self):
        assert print_pylf(Stop(inner=Start(leaf=Mention("Saturn")))) == "STOP(START('Saturn'))"

    def test_neg_printed_explicitly(self):
        text = print_pylf(parse_pylf("STOP(JOIN('r', START('x')))"))
        assert "neg=False" in text
        assert parse_pylf(text) == parse_pylf("STOP(JOIN('r', START('x')))")

    def test_seeded_round_trip(self):
        rng = random.Random(7)
        for _ in range(300):
            ast = random_ast(rng)
            assert parse_pylf(print_pylf(ast)) == ast

    @settings(max_examples=200, deadline=None)
    @given(st.integers(min_value=0, max_value=10**9))
    def test_hypothesis_round_trip(self, seed):
        ast = random_ast(random.Random(seed))
        assert parse_pylf(print_pylf(ast)) == ast


class TestTypes:
    def test_join_output_class(self, rockets):
        expr = resolve_exact(parse_pylf("STOP(JOIN('producing', START('Saturn')))"), rockets)
        assert infer_type(expr, rockets) == EntityClass.of("rocket_manufacturer")

    def test_count_is_integer(self, rockets):
        expr = resolve_exact(
            parse_pylf("STOP(COUNT(JOIN('producing', START('Saturn'))))"), rockets
        )
        assert infer_type(expr, rockets) == IntegerCount()

    def test_and_common_type(self, rockets):
        expr = resolve_exact(
            parse_pylf(
                "STOP(AND(JOIN('R_producing', START('BoeingCompany')), CMP('<', 'mass', 2.32e3)))"
            ),
            rockets,
        )
        assert infer_type(expr, rockets) == EntityClass.of("rocket")

    def test_reversed_join_datatype_range(self, rockets):
        expr = resolve_exact(parse_pylf("STOP(JOIN('R_mass', START('Saturn')))"), rockets)
        assert infer_type(expr, rockets) == Datatype("float")

    def test_domain_mismatch_is_an_issue(self, rockets):
        expr = resolve_exact(parse_pylf("STOP(JOIN('mass', START('BoeingCompany')))"), rockets)
        issues = validate(expr, rockets)
        assert len(issues) == 1
        with pytest.raises(PylfTypeError):
            infer_type(expr, rockets)

    def test_cmp_non_numeric_range(self, rockets):
        expr = resolve_exact(parse_pylf("STOP(CMP('<', 'producing', 5.0))"), rockets)
        assert len(validate(expr, rockets)) == 1

    def test_q2_validates_clean(self, rockets):
        expr = resolve_exact(
            parse_pylf(
                "STOP(AND(JOIN('R_producing', START('BoeingCompany'), neg=True), CMP('<', 'mass', 2.32e3)))"
            ),
            rockets,
        )
        assert validate(expr, rockets) == []

    def test_string_cmp_bound_rejected(self, rockets):
        expr = resolve_exact(parse_pylf("STOP(CMP('<', 'mass', 'heavy'))"), rockets)
        assert any("string" in issue.message for issue in validate(expr, rockets))

    def test_unresolved_mention_is_an_issue(self, rockets):
        expr = parse_pylf("STOP(START('Saturn'))")
        assert any("unresolved" in issue.message for issue in validate(expr, rockets))

    def test_and_children_with_no_common_class(self, rockets):
        # manufacturer set intersected with rocket set can never be satisfied
        expr = resolve_exact(
            parse_pylf("STOP(AND(START('BoeingCompany'), START('Saturn')))"), rockets
        )
        assert any("no class in common" in issue.message for issue in validate(expr, rockets))

    def test_type_soundness_on_random_kgs(self):
        # When inference yields an entity class, every evaluated entity is an
        # instance of one of the inferred classes.
        import random as _random

        from kgqa.executor import Entities, evaluate
        from generators import random_grounded_expr, random_kg

        rng = _random.Random(31)
        for _ in range(15):
            kg = random_kg(rng)
            for _ in range(5):
                expr = random_grounded_expr(rng, kg)
                inferred = infer_type(expr, kg)
                result = evaluate(expr, kg)
                if isinstance(inferred, EntityClass) and isinstance(result, Entities):
                    allowed = frozenset().union(
                        *(kg.instances_of(c) for c in inferred.classes)
                    )
                    assert result.ids <= allowed


class TestProfile:
    def test_q2_profile(self):
        profile = profile_constraints(Q2_AST)
        assert profile == ConstraintProfile(
            reasoning_paths=1, calc_constraints=1, has_negative=True, function_type="comparative"
        )
        assert profile.total == 2

    def test_trivial_profile(self):
        profile = profile_constraints(parse_pylf("STOP(START('x'))"))
        assert profile == ConstraintProfile(0, 0, False, "none")
        assert profile.total == 0

    def test_count_profile(self):
        expr = parse_pylf("STOP(COUNT(AND(JOIN('a', START('x')), JOIN('b', START('y')))))")
        profile = profile_constraints(expr)
        assert profile == ConstraintProfile(2, 1, False, "count")
        assert profile.total == 3

    def test_superlative_beats_comparative(self):
        expr = parse_pylf(
            "STOP(ARG('ARGMAX', AND(JOIN('a', START('x')), CMP('<', 'v', 1)), 'v'))"
        )
        assert profile_constraints(expr).function_type == "superlative"

    def test_and_commutation_invariance(self):
        rng = random.Random(3)
        for _ in range(100):
            ast = random_ast(rng)
            swapped = _swap_ands(ast)
            assert profile_constraints(ast) == profile_constraints(swapped)


def _swap_ands(node):
    if isinstance(node, Stop):
        return Stop(inner=_swap_ands(node.inner))
    if isinstance(node, Count):
        return Count(inner=_swap_ands(node.inner))
    if isinstance(node, Join):
        return Join(rel=node.rel, inner=_swap_ands(node.inner), reversed=node.reversed, neg=node.neg)
    if isinstance(node, And):
        return And(left=_swap_ands(node.right), right=_swap_ands(node.left))
    if isinstance(node, Arg):
        return Arg(mode=node.mode, inner=_swap_ands(node.inner), rel=node.rel)
    return node


class TestResolveExact:
    def test_resolves_ids(self, rockets):
        expr = resolve_exact(parse_pylf("STOP(JOIN('producing', START('Saturn')))"), rockets)
        assert expr.inner.rel.resolved
        assert expr.inner.inner.leaf == EntityRef("Saturn")

    def test_unknown_id_fails(self, rockets):
        with pytest.raises(Exception, match="unknown entity"):
            resolve_exact(parse_pylf("STOP(START('NoSuchRocket'))"), rockets)
