"""Integer-parameter grounding: naming, enumeration order, substitution, simplification."""
import itertools

import pytest

from planforge import (
    BOOL,
    Action,
    ArrayType,
    CompilationError,
    Effect,
    Equals,
    Fluent,
    IntType,
    Not,
    Param,
    Problem,
    ground_int_params,
)
from conftest import build_robot_problem


@pytest.fixture
def robot_result():
    return ground_int_params(build_robot_problem())


class TestMoveRightGolden:
    def test_six_actions_in_row_major_order(self, robot_result):
        names = [n for n in robot_result.compiled.actions if n.startswith("move_right")]
        assert names == ["move_right_0_0", "move_right_0_1", "move_right_1_0",
                         "move_right_1_1", "move_right_2_0", "move_right_2_1"]

    def test_action_0_1_matches_substituted_listing(self, robot_result):
        at = Fluent("at_robot", ArrayType(3, ArrayType(3, BOOL)),
                    default=[[False] * 3] * 3)
        action = robot_result.compiled.actions["move_right_0_1"]
        assert action.parameters == ()
        assert action.preconditions == (at[0][1],)
        # the (1 + 1) index is computed during compilation
        assert action.effects == (Effect(at[0][2], True), Effect(at[0][1], False))

    def test_no_constant_arithmetic_survives(self, robot_result):
        for action in robot_result.compiled.actions.values():
            for eff in action.effects:
                for expr in (eff.target, eff.value):
                    for node in expr.walk():
                        if node.op in ("plus", "minus", "times"):
                            assert not all(a.op == "int" for a in node.args)


class TestCountPreservation:
    def test_product_of_domain_sizes(self, robot_result):
        source = build_robot_problem()
        expected = 0
        for action in source.actions.values():
            sizes = [p.type.upper - p.type.lower + 1 for p in action.int_parameters()]
            expected += max(1, 1 if not sizes else _prod(sizes))
        assert len(robot_result.compiled.actions) == expected == 24

    def test_action_map_covers_all(self, robot_result):
        assert set(robot_result.action_map) == set(robot_result.compiled.actions)
        assert robot_result.action_map["move_right_2_1"] == ("move_right", {"r": 2, "c": 1})


def _prod(xs):
    out = 1
    for x in xs:
        out *= x
    return out


class TestPassThrough:
    def test_action_without_int_params_identity(self):
        p = Problem("p")
        t = p.add_user_type("T")
        p.add_object("x", "T")
        f = p.add_fluent(Fluent("f", BOOL, (("v", t),), default=False))
        v = Param("v", t)
        p.add_action(Action("touch", (v,), (Not(f(v)),), (Effect(f(v), True),)))
        result = ground_int_params(p)
        assert result.action_map == {"touch": ("touch", {})}
        assert result.compiled.actions["touch"].parameters == (v,)


class TestNegativeValues:
    def test_negative_values_render_with_minus(self):
        p = Problem("p")
        f = p.add_fluent(Fluent("f", ArrayType(3, BOOL), default=[False] * 3))
        m = Param("m", IntType(-2, 2))
        p.add_action(Action("shift", (m,), (), (Effect(f[m + 2], True),)))
        result = ground_int_params(p)
        assert "shift_-2" in result.compiled.actions
        assert "shift_2" in result.compiled.actions
        assert len(result.compiled.actions) == 5


class TestCollisionsAndNotes:
    def test_name_collision_reported(self):
        p = Problem("p")
        f = p.add_fluent(Fluent("f", ArrayType(2, BOOL), default=[False] * 2))
        i = Param("i", IntType(0, 1))
        p.add_action(Action("a", (i,), (), (Effect(f[i], True),)))
        p.add_action(Action("a_0", (), (), (Effect(f[0], True),)))
        with pytest.raises(CompilationError, match="collision"):
            ground_int_params(p)

    def test_false_precondition_kept_with_note(self):
        p = Problem("p")
        f = p.add_fluent(Fluent("f", ArrayType(2, BOOL), default=[False] * 2))
        i = Param("i", IntType(0, 1))
        p.add_action(Action("a", (i,), (Equals(i, 0),), (Effect(f[i], True),)))
        result = ground_int_params(p)
        assert "a_0" in result.compiled.actions
        assert "a_1" in result.compiled.actions  # kept although never applicable
        assert any("a_1" in n and "never applicable" in n for n in result.notes)

    def test_conditional_effect_condition_folds(self):
        from planforge import LE

        p = Problem("p")
        f = p.add_fluent(Fluent("f", ArrayType(2, BOOL), default=[False] * 2))
        i = Param("i", IntType(0, 1))
        p.add_action(Action("a", (i,), (),
                            (Effect(f[i], True, condition=LE(i, 0)),)))
        result = ground_int_params(p)
        a0 = result.compiled.actions["a_0"]
        a1 = result.compiled.actions["a_1"]
        assert a0.effects[0].condition is None  # folded to true
        assert a1.effects == ()  # condition folded to false, effect dropped


class TestSemanticEquivalence:
    def test_compiled_actions_mirror_bound_sources(self):
        """Brute force over all states of a tiny problem: a compiled action is
        applicable exactly when its source is under the recovered binding, and
        both produce the same successor."""
        import itertools

        from planforge import Plan, PlanStep

        p = Problem("tiny")
        f = p.add_fluent(Fluent("f", ArrayType(2, BOOL), default=[False, False]))
        g = p.add_fluent(Fluent("g", BOOL, default=False))
        i = Param("i", IntType(0, 1))
        p.add_action(Action("a", (i,),
                            (Not(f[i]),),
                            (Effect(f[i], True), Effect(g(), True, condition=f[1 - i]))))
        result = ground_int_params(p)

        for bits in itertools.product([False, True], repeat=3):
            state_values = {("f", ()): (bits[0], bits[1]), ("g", ()): bits[2]}
            for compiled_name, (src_name, binding) in result.action_map.items():
                source_plan = Plan((PlanStep(src_name, tuple(binding.items())),))
                compiled_plan = Plan((PlanStep(compiled_name),))
                source_outcome = _apply(p, source_plan, state_values)
                compiled_outcome = _apply(result.compiled, compiled_plan, state_values)
                assert source_outcome == compiled_outcome, (compiled_name, bits)


def _apply(problem, plan, state_values):
    """(applicable?, successor values) via the validator machinery."""
    from planforge import State
    from planforge.search import _bind_step, _successor

    state = State(state_values)
    step = plan.steps[0]
    binding = _bind_step(problem, step)
    action = problem.actions[step.action]
    from planforge import evaluate

    if not all(evaluate(pre, state, binding) for pre in action.preconditions):
        return None
    return dict(_successor(problem, action, state, binding).items())


class TestUserParamsRetained:
    def test_mixed_parameters(self):
        p = Problem("p")
        t = p.add_user_type("T")
        p.add_object("x", "T")
        f = p.add_fluent(Fluent("f", ArrayType(2, BOOL), (("v", t),), default=[False] * 2))
        v, i = Param("v", t), Param("i", IntType(0, 1))
        p.add_action(Action("a", (v, i), (), (Effect(f(v)[i], True),)))
        result = ground_int_params(p)
        assert sorted(result.compiled.actions) == ["a_0", "a_1"]
        assert result.compiled.actions["a_0"].parameters == (v,)
        assert result.action_map["a_1"] == ("a", {"i": 1})
