"""Pass ordering, feature scanning, plan back-mapping, snapshots."""
import pytest

from planforge import (
    BOOL,
    Action,
    ArrayType,
    CompilationError,
    Effect,
    Fluent,
    IntType,
    Param,
    Plan,
    PlanError,
    PlanStep,
    Problem,
    compile,
    flatten_arrays,
    map_plan_back,
    scan_features,
)
from planforge.compilers.arrays import UndefinednessMode


class TestFeatureScan:
    def test_all_three_features(self, robot_problem):
        features = scan_features(robot_problem)
        assert features.has_int_params and features.has_arrays and features.has_count

    def test_feature_free(self, delivery_problem):
        features = scan_features(delivery_problem)
        assert not features.any()


class TestOrdering:
    def test_all_passes_in_order(self, robot_problem):
        result = compile(robot_problem)
        assert result.passes == ["int_params", "arrays", "count"]
        assert [name for name, _ in result.snapshots] == result.passes

    def test_feature_free_zero_passes(self, delivery_problem):
        result = compile(delivery_problem)
        assert result.passes == []
        assert result.action_map == {name: (name, {}) for name in delivery_problem.actions}

    def test_force_all_runs_identity_passes(self, delivery_problem):
        result = compile(delivery_problem, force_all=True)
        assert result.passes == ["int_params", "arrays", "count"]
        assert set(result.compiled.actions) == set(delivery_problem.actions)

    def test_output_is_feature_free(self, robot_problem):
        result = compile(robot_problem)
        assert not scan_features(result.compiled).any()

    def test_arrays_before_intparams_fails_with_undefined_index(self, robot_problem):
        # the documented wrong-order scenario: my_ints[i] with i still a parameter
        with pytest.raises(CompilationError, match="undefined value"):
            flatten_arrays(robot_problem, UndefinednessMode.RESTRICTIVE)


class TestSnapshots:
    def test_first_snapshot_matches_listing_action(self, robot_problem):
        result = compile(robot_problem)
        after_ints = dict(result.snapshots)["int_params"]
        at = robot_problem.fluents["at_robot"]
        action = after_ints.actions["move_right_0_1"]
        assert action.preconditions == (at[0][1],)
        assert [(str(e.target), e.value.value) for e in action.effects] == [
            ("at_robot[0][2]", True), ("at_robot[0][1]", False)]


class TestPlanBackMapping:
    def test_int_binding_recovered(self, robot_problem):
        result = compile(robot_problem)
        back = map_plan_back(result, Plan((PlanStep("move_right_0_1"),)))
        assert back.steps == (PlanStep("move_right", (("r", 0), ("c", 1))),)

    def test_empty_plan(self, robot_problem):
        result = compile(robot_problem)
        assert map_plan_back(result, Plan(())) == Plan(())

    def test_negative_value_and_user_arg_recovered(self):
        p = Problem("p")
        t = p.add_user_type("V")
        a_obj = p.add_object("A", "V")
        f = p.add_fluent(Fluent("f", ArrayType(5, BOOL), (("v", t),),
                                default=[False] * 5))
        v = Param("v", t)
        r = Param("r", IntType(0, 4))
        c = Param("c", IntType(0, 4))
        m = Param("m", IntType(-2, 2))
        p.add_action(Action("move_horizontal_car", (v, r, c, m), (),
                            (Effect(f(v)[c + m], True),)))
        result = compile(p, UndefinednessMode.PERMISSIVE)
        step = PlanStep("move_horizontal_car_2_3_-2", (("v", a_obj),))
        (back,) = map_plan_back(result, Plan((step,))).steps
        assert back.action == "move_horizontal_car"
        assert back.arg_dict() == {"v": a_obj, "r": 2, "c": 3, "m": -2}

    def test_unknown_action_rejected(self, robot_problem):
        result = compile(robot_problem)
        with pytest.raises(PlanError, match="unknown"):
            map_plan_back(result, Plan((PlanStep("nonsense_0_0"),)))


class TestNotesPropagate:
    def test_pass_prefixed_notes(self):
        p = Problem("p")
        f = p.add_fluent(Fluent("f", ArrayType(2, BOOL), default=[False] * 2))
        i = Param("i", IntType(0, 2))  # i = 2 walks off the end
        p.add_action(Action("a", (i,), (), (Effect(f[i], True),)))
        result = compile(p, UndefinednessMode.PERMISSIVE)
        assert any(n.startswith("arrays:") and "a_2" in n for n in result.notes)
        assert sorted(result.compiled.actions) == ["a_0", "a_1"]
