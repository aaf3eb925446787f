"""Type system, expression construction, structural equality, problem building."""
import pytest
from hypothesis import given, strategies as st

from planforge import (
    BOOL,
    Action,
    And,
    ArrayType,
    Count,
    Effect,
    Equals,
    Expr,
    FALSE,
    Fluent,
    Int,
    IntType,
    ModelError,
    Not,
    Object,
    Or,
    Param,
    Problem,
    TRUE,
    UserType,
    ground_fluents,
)


class TestTypes:
    def test_array_size_must_exceed_one(self):
        with pytest.raises(ModelError, match="array size must exceed one"):
            ArrayType(1, BOOL)

    def test_nested_arrays_allowed(self):
        t = ArrayType(3, ArrayType(3, BOOL))
        assert t.dims() == (3, 3)
        assert t.base() is BOOL
        assert str(t) == "array[3, array[3, bool]]"

    def test_int_bounds_ordered(self):
        with pytest.raises(ModelError):
            IntType(2, 1)
        assert str(IntType(0, 2)) == "integer[0, 2]"


class TestExpressions:
    def test_interning_gives_structural_identity(self):
        at = Fluent("at", ArrayType(2, BOOL))
        assert at[0] is at[0]
        assert And(at[0], at[1]) is And(at[0], at[1])
        assert at[0] == at[0]
        assert at[0] != at[1]

    def test_cross_instance_equality(self):
        # structurally identical fluents built twice yield the same access node
        a1 = Fluent("f", ArrayType(2, BOOL))
        a2 = Fluent("f", ArrayType(2, BOOL))
        assert a1[1] is a2[1]

    def test_arithmetic_sugar(self):
        c = Param("c", IntType(0, 1))
        e = c + 1
        assert e.op == "plus"
        assert str(e) == "(c + 1)"

    def test_index_type_checked(self):
        at = Fluent("at", ArrayType(2, BOOL))
        with pytest.raises(ModelError, match="index must be an integer"):
            at[True]

    def test_indexing_beyond_depth_rejected(self):
        at = Fluent("at", ArrayType(2, BOOL))
        with pytest.raises(ModelError, match="non-array"):
            at[0][0]

    def test_partial_access_has_array_type(self):
        at = Fluent("at", ArrayType(3, ArrayType(2, BOOL)))
        row = at[1]
        assert isinstance(row.type, ArrayType)
        assert row.type.size == 2

    def test_equals_across_user_types_rejected(self):
        a = Object("a", "T1")
        b = Object("b", "T2")
        with pytest.raises(ModelError, match="cannot compare"):
            Equals(a, b)

    def test_boolean_operators_require_booleans(self):
        with pytest.raises(ModelError, match="Boolean"):
            And(Int(1), TRUE)

    def test_count_two_construction_styles(self):
        a, b, c = (Fluent(n, BOOL)() for n in "abc")
        assert Count(a, b, c) is Count([a, b, c])
        assert Count(a, b, c).type == IntType(0, 3)

    def test_count_rejects_bad_args(self):
        a = Fluent("a", BOOL)()
        with pytest.raises(ModelError):
            Count(a, Int(5))
        with pytest.raises(ModelError):
            Count()

    def test_plus_bounds(self):
        r = Param("r", IntType(0, 2))
        assert (r + 1).type == IntType(1, 3)
        assert (r - 1).type == IntType(-1, 1)


@st.composite
def small_bool_exprs(draw, depth=3):
    fluents = [Fluent(n, BOOL)() for n in ("fa", "fb", "fc")]
    if depth == 0:
        return draw(st.sampled_from(fluents + [TRUE, FALSE]))
    kind = draw(st.integers(0, 4))
    if kind == 0:
        return draw(st.sampled_from(fluents))
    if kind == 1:
        return Not(draw(small_bool_exprs(depth=depth - 1)))
    if kind == 2:
        return And(draw(small_bool_exprs(depth=depth - 1)),
                   draw(small_bool_exprs(depth=depth - 1)))
    if kind == 3:
        return Or(draw(small_bool_exprs(depth=depth - 1)),
                  draw(small_bool_exprs(depth=depth - 1)))
    return Equals(draw(small_bool_exprs(depth=depth - 1)),
                  draw(small_bool_exprs(depth=depth - 1)))


class TestStructuralEquality:
    @given(small_bool_exprs())
    def test_reflexive_and_rebuild_invariant(self, e):
        assert e == e
        rebuilt = Expr._make(e.op, e.args, e.indices, e.value, e.type)
        assert rebuilt is e

    @given(small_bool_exprs(), small_bool_exprs())
    def test_symmetric(self, a, b):
        assert (a == b) == (b == a)


class TestFluent:
    def test_signature_arity_enforced(self):
        t = UserType("T")
        f = Fluent("f", BOOL, (("x", t),))
        with pytest.raises(ModelError, match="expects 1 arguments"):
            f()

    def test_default_type_checked(self):
        with pytest.raises(ModelError, match="does not fit"):
            Fluent("f", BOOL, default=3)

    def test_array_default_must_match_shape(self):
        with pytest.raises(ModelError, match="does not fit"):
            Fluent("f", ArrayType(3, BOOL), default=[True, False])


class TestAction:
    def test_unbound_parameter_rejected(self):
        f = Fluent("f", ArrayType(2, BOOL))
        r = Param("r", IntType(0, 1))
        stray = Param("s", IntType(0, 1))
        with pytest.raises(ModelError, match="unbound parameter 's'"):
            Action("a", (r,), preconditions=(f[stray],))

    def test_duplicate_parameter_rejected(self):
        r1 = Param("r", IntType(0, 1))
        r2 = Param("r", IntType(0, 2))
        with pytest.raises(ModelError, match="duplicate parameter"):
            Action("a", (r1, r2))

    def test_effect_type_mismatch_rejected(self):
        f = Fluent("f", BOOL)
        with pytest.raises(ModelError, match="type mismatch"):
            Effect(f(), 3)

    def test_effect_constant_bounds_checked(self):
        f = Fluent("f", IntType(0, 2))
        with pytest.raises(ModelError, match="out of bounds"):
            Effect(f(), 5)


class TestProblem:
    def test_listing_style_build(self, robot_problem):
        state = robot_problem.initial_state()
        grid = state.get("at_robot")
        true_cells = [(i, j) for i in range(3) for j in range(3) if grid[i][j]]
        assert true_cells == [(0, 0)]

    def test_empty_goal_problem_valid(self):
        from planforge import Plan, validate

        p = Problem("empty")
        p.validate()
        assert p.goals == []
        assert validate(p, Plan(())).valid  # the empty plan satisfies no goals

    def test_duplicate_fluent_rejected(self):
        p = Problem("p")
        p.add_fluent(Fluent("f", BOOL, default=False))
        with pytest.raises(ModelError, match="duplicate fluent"):
            p.add_fluent(Fluent("f", BOOL))

    def test_missing_initial_value_rejected(self):
        p = Problem("p")
        p.add_fluent(Fluent("f", BOOL))
        with pytest.raises(ModelError, match="missing initial value"):
            p.validate()

    def test_partial_array_init_without_default_rejected(self):
        p = Problem("p")
        f = p.add_fluent(Fluent("f", ArrayType(2, BOOL)))
        p.set_initial_value(f[0], True)
        with pytest.raises(ModelError, match="missing initial value"):
            p.validate()

    def test_out_of_range_init_rejected(self):
        p = Problem("p")
        f = p.add_fluent(Fluent("f", ArrayType(2, BOOL), default=[False, False]))
        with pytest.raises(ModelError, match="out of range"):
            p.set_initial_value(f[2], True)

    def test_goal_must_be_closed(self):
        p = Problem("p")
        f = p.add_fluent(Fluent("f", ArrayType(2, BOOL), default=[False] * 2))
        r = Param("r", IntType(0, 1))
        with pytest.raises(ModelError, match="closed"):
            p.add_goal(f[r])

    def test_objects_unique_across_types(self):
        p = Problem("p")
        p.add_user_type("A")
        p.add_user_type("B")
        p.add_object("x", "A")
        with pytest.raises(ModelError, match="duplicate object"):
            p.add_object("x", "B")


class TestGroundFluents:
    def test_signature_expansion(self, delivery_problem):
        instances = ground_fluents(delivery_problem)
        per_name = {}
        for f, args in instances:
            per_name.setdefault(f.name, []).append(args)
        assert len(per_name["at_robot"]) == 4
        assert len(per_name["at_package"]) == 4
        assert len(per_name["holding_package"]) == 1

    def test_empty_signature_single_instance(self):
        p = Problem("p")
        p.add_fluent(Fluent("f", BOOL, default=False))
        assert len(ground_fluents(p)) == 1

    def test_type_without_objects_rejected(self):
        p = Problem("p")
        t = p.add_user_type("T")
        p.add_fluent(Fluent("f", BOOL, (("x", t),), default=False))
        with pytest.raises(ModelError, match="no objects"):
            ground_fluents(p)


class TestDefaults:
    def test_k_overrides_differ_from_default(self):
        p = Problem("p")
        f = p.add_fluent(Fluent("grid", ArrayType(3, ArrayType(3, BOOL)),
                                default=[[False] * 3] * 3))
        p.set_initial_value(f[0][1], True)
        p.set_initial_value(f[2][2], True)
        grid = p.initial_state().get("grid")
        diffs = [(i, j) for i in range(3) for j in range(3) if grid[i][j]]
        assert diffs == [(0, 1), (2, 2)]
