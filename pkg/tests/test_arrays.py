"""Array flattening: scalar fluents, access rewriting, both undefinedness modes."""
import pytest

from planforge import (
    BOOL,
    Action,
    And,
    ArrayType,
    CompilationError,
    Effect,
    Equals,
    FALSE,
    Fluent,
    Iff,
    Int,
    IntType,
    Or,
    OutOfRangeError,
    Plus,
    Problem,
    flatten_arrays,
    ground_int_params,
)
from planforge.compilers.arrays import UndefinednessMode
from conftest import build_robot_problem

R = UndefinednessMode.RESTRICTIVE
P = UndefinednessMode.PERMISSIVE


@pytest.fixture
def flat_robot():
    return flatten_arrays(ground_int_params(build_robot_problem()).compiled, R)


class TestListingGolden:
    def test_nine_scalar_fluents_with_defaults(self, flat_robot):
        names = [n for n in flat_robot.compiled.fluents if n.startswith("at_robot")]
        assert names == [f"at_robot_{i}_{j}" for i in range(3) for j in range(3)]
        for name in names:
            f = flat_robot.compiled.fluents[name]
            assert f.value_type is BOOL
            assert f.default is not None and f.default.value is False

    def test_initial_values_distribute(self, flat_robot):
        init = {t.fluent.name: v.value for t, v in flat_robot.compiled.init.items()}
        assert init == {"at_robot_0_0": True}
        state = flat_robot.compiled.initial_state()
        assert state.get("at_robot_0_0") is True
        assert state.get("at_robot_1_2") is False

    def test_accesses_rewritten(self, flat_robot):
        action = flat_robot.compiled.actions["move_right_0_1"]
        scalar = flat_robot.compiled.fluents["at_robot_0_1"]
        assert action.preconditions == (scalar(),)


class TestComparisonDecomposition:
    def _problem(self):
        p = Problem("p")
        at = p.add_fluent(Fluent("at", ArrayType(2, ArrayType(3, BOOL)),
                                 default=[[False] * 3] * 2))
        return p, at

    def test_row_iff_literal(self):
        from planforge import Not, simplify

        p, at = self._problem()
        p.add_goal(Iff(at[0], [False, False, False]))
        result = flatten_arrays(p, R)
        (goal,) = result.compiled.goals
        cells = [result.compiled.fluents[f"at_0_{j}"]() for j in range(3)]
        # per-cell equivalences with the literal; simplification renders each
        # `iff(cell, false)` as `Not(cell)`
        assert goal is simplify(And([Iff(c, FALSE) for c in cells]))
        assert set(goal.args) == {Not(c) for c in cells}

    def test_whole_array_equality(self):
        p = Problem("p")
        f = p.add_fluent(Fluent("v", ArrayType(2, IntType(0, 3)), default=[0, 0]))
        p.add_goal(Equals(f(), [1, 2]))
        result = flatten_arrays(p, R)
        (goal,) = result.compiled.goals
        v0 = result.compiled.fluents["v_0"]
        v1 = result.compiled.fluents["v_1"]
        assert set(goal.args) == {Equals(v0(), 1), Equals(v1(), 2)}

    def test_array_effect_target_decomposes(self):
        p = Problem("p")
        f = p.add_fluent(Fluent("row", ArrayType(2, BOOL), default=[False] * 2))
        p.add_action(Action("reset", (), (), (Effect(f(), [True, False]),)))
        result = flatten_arrays(p, R)
        effects = result.compiled.actions["reset"].effects
        assert [(e.target.fluent.name, e.value.value) for e in effects] == [
            ("row_0", True), ("row_1", False)]


class TestRestrictiveMode:
    def test_out_of_range_is_fatal_and_names_access(self):
        p = Problem("p")
        at = p.add_fluent(Fluent("at_robot", ArrayType(3, ArrayType(3, BOOL)),
                                 default=[[False] * 3] * 3))
        p.add_action(Action("bad", (), (And(at[2][2], at[2][3]),), ()))
        with pytest.raises(OutOfRangeError) as err:
            flatten_arrays(p, R)
        assert "at_robot[2][3]" in str(err.value)
        assert err.value.access == "at_robot[2][3]"

    def test_non_constant_index_reported(self):
        p = build_robot_problem()
        with pytest.raises(CompilationError, match="integer parameters"):
            flatten_arrays(p, R)


class TestPermissiveMode:
    def _toy(self):
        p = Problem("p")
        at = p.add_fluent(Fluent("at_robot", ArrayType(3, ArrayType(3, BOOL)),
                                 default=[[False] * 3] * 3))
        ints = p.add_fluent(Fluent("my_ints", ArrayType(3, IntType(0, 9)),
                                   default=[0, 0, 0]))
        return p, at, ints

    def test_boolean_access_folds_to_false(self):
        p, at, _ = self._toy()
        p.add_action(Action("a", (), (And(at[2][2], at[2][3]),), ()))
        result = flatten_arrays(p, P)
        action = result.compiled.actions["a"]
        assert action.preconditions == (FALSE,)
        assert any("at_robot[2][3]" in n for n in result.notes)

    def test_smallest_boolean_ancestor_folds(self):
        p, _, ints = self._toy()
        pre = Or(Equals(Plus(ints[3], Int(2)), 2), Equals(ints[2], 0))
        p.add_action(Action("a", (), (pre,), ()))
        result = flatten_arrays(p, P)
        action = result.compiled.actions["a"]
        scalar = result.compiled.fluents["my_ints_2"]
        assert action.preconditions == (Equals(scalar(), 0),)

    def test_effect_out_of_range_removes_action(self):
        p, at, _ = self._toy()
        p.add_action(Action("bad", (), (), (Effect(at[0][3], True),)))
        p.add_action(Action("good", (), (), (Effect(at[0][0], True),)))
        result = flatten_arrays(p, P)
        assert list(result.compiled.actions) == ["good"]
        assert any("bad" in n and "at_robot[0][3]" in n for n in result.notes)
        assert "bad" not in result.action_map

    def test_effect_value_out_of_range_removes_action(self):
        p, _, ints = self._toy()
        p.add_action(Action("bad", (), (), (Effect(ints[0], ints[3]),)))
        result = flatten_arrays(p, P)
        assert not result.compiled.actions

    def test_out_of_range_in_condition_drops_effect_keeps_action(self):
        p, at, _ = self._toy()
        p.add_action(Action("a", (), (),
                            (Effect(at[0][0], True, condition=at[1][5]),
                             Effect(at[0][1], True))))
        result = flatten_arrays(p, P)
        action = result.compiled.actions["a"]
        assert len(action.effects) == 1
        assert action.effects[0].target.fluent.name == "at_robot_0_1"

    def test_goal_folds_with_notice(self):
        p, at, _ = self._toy()
        p.add_goal(Or(at[0][0], at[0][9]))
        result = flatten_arrays(p, P)
        scalar = result.compiled.fluents["at_robot_0_0"]
        assert result.compiled.goals == [scalar()]
        assert any("goal" in n for n in result.notes)

    def test_negative_index_out_of_range(self):
        p, at, _ = self._toy()
        p.add_action(Action("a", (), (at[0][Int(-1)],), ()))
        result = flatten_arrays(p, P)
        assert result.compiled.actions["a"].preconditions == (FALSE,)


class TestInvariants:
    def test_cell_count_conservation(self):
        p = Problem("p")
        t = p.add_user_type("T")
        p.add_objects("T", ["x", "y"])
        p.add_fluent(Fluent("g", ArrayType(2, ArrayType(3, BOOL)), (("v", t),),
                            default=[[False] * 3] * 2))
        result = flatten_arrays(p, R)
        scalars = [f for f in result.compiled.fluents.values() if f.name.startswith("g_")]
        assert len(scalars) == 6  # product of dims; signature retained per scalar
        assert all(len(f.signature) == 1 for f in scalars)
        from planforge import ground_fluents
        assert len(ground_fluents(result.compiled)) == 12  # x2 objects

    def test_permissive_subset_of_restrictive_on_inrange_problem(self):
        source = ground_int_params(build_robot_problem()).compiled
        strict = flatten_arrays(source, R)
        loose = flatten_arrays(source, P)
        assert set(loose.compiled.actions) == set(strict.compiled.actions)

    def test_scalar_name_collision_detected(self):
        p = Problem("p")
        p.add_fluent(Fluent("a_0", BOOL, default=False))
        p.add_fluent(Fluent("a", ArrayType(2, BOOL), default=[False] * 2))
        with pytest.raises(CompilationError, match="collision"):
            flatten_arrays(p, R)
