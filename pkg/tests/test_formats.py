"""JSON problem schema and the plan text/JSON formats."""
import json

import pytest

from planforge import FormatError, Plan, PlanStep, compile, solve, validate
from planforge.formats import (
    format_plan_text,
    load_problem,
    parse_plan_text,
    plan_from_dict,
    plan_to_dict,
    problem_from_dict,
    problem_to_dict,
    save_problem,
)
from conftest import build_delivery_problem, build_robot_problem
from planforge.domains import gen_plotting, gen_rushhour
from conftest import EASY_RUSHHOUR_GRID, PLOTTING_2SHOT_GRID, PLOTTING_2SHOT_MAX_REMAINING


ALL_PROBLEMS = {
    "robot": build_robot_problem,
    "delivery": build_delivery_problem,
    "rushhour": lambda: gen_rushhour(EASY_RUSHHOUR_GRID),
    "plotting": lambda: gen_plotting(3, 3, ["R", "B"], PLOTTING_2SHOT_GRID,
                                     PLOTTING_2SHOT_MAX_REMAINING),
}


class TestProblemRoundTrip:
    @pytest.mark.parametrize("name", sorted(ALL_PROBLEMS))
    def test_save_load_save_byte_identical(self, name):
        problem = ALL_PROBLEMS[name]()
        text = save_problem(problem)
        reloaded = load_problem(text)
        assert save_problem(reloaded) == text

    def test_semantics_survive_round_trip(self):
        problem = build_robot_problem()
        reloaded = load_problem(save_problem(problem))
        plan_a = solve(compile(problem).compiled)
        plan_b = solve(compile(reloaded).compiled)
        assert plan_a == plan_b

    def test_top_level_keys(self):
        data = problem_to_dict(build_delivery_problem())
        assert list(data) == ["name", "types", "objects", "fluents", "actions",
                              "init", "defaults", "goals"]

    def test_expression_trees_use_op_args(self):
        data = problem_to_dict(build_robot_problem())
        goal = data["goals"][0]
        assert goal["op"] == "eq"
        assert goal["args"][0]["op"] == "count"
        # array literals are plain JSON arrays
        assert data["defaults"]["at_robot"] == [[False] * 3] * 3


class TestProblemErrors:
    def test_not_json(self):
        with pytest.raises(FormatError, match="not valid JSON"):
            load_problem("{nope")

    def test_unknown_op(self):
        data = problem_to_dict(build_delivery_problem())
        data["goals"] = [{"op": "xor", "args": []}]
        with pytest.raises(FormatError, match="unknown expression op"):
            problem_from_dict(data)

    def test_unknown_object_name(self):
        data = problem_to_dict(build_delivery_problem())
        data["goals"] = ["P99"]
        with pytest.raises(FormatError, match="unknown object"):
            problem_from_dict(data)

    def test_model_errors_become_format_errors(self):
        data = problem_to_dict(build_delivery_problem())
        data["fluents"].append({"name": "at_robot", "type": {"kind": "bool"}})
        with pytest.raises(FormatError, match="duplicate fluent"):
            problem_from_dict(data)


class TestPlanFormats:
    def test_text_round_trip(self):
        plan = Plan((PlanStep("Move", (("p1", "P00"), ("p2", "P10"))),
                     PlanStep("PickUp", (("p", "P10"),)),
                     PlanStep("noop", ())))
        text = format_plan_text(plan)
        assert text == "Move(p1=P00, p2=P10)\nPickUp(p=P10)\nnoop()\n"
        parsed = parse_plan_text(text)
        assert [s.action for s in parsed] == ["Move", "PickUp", "noop"]
        assert parsed.steps[0].arg_dict() == {"p1": "P00", "p2": "P10"}

    def test_text_values_typed(self):
        parsed = parse_plan_text("act(i=3, m=-2, b=true, v=A)\n")
        assert parsed.steps[0].arg_dict() == {"i": 3, "m": -2, "b": True, "v": "A"}

    def test_text_parse_errors(self):
        with pytest.raises(FormatError, match="cannot parse"):
            parse_plan_text("not a step (\n")
        with pytest.raises(FormatError, match="name=value"):
            parse_plan_text("act(3)\n")

    def test_json_round_trip_through_validation(self):
        problem = build_delivery_problem()
        plan = solve(compile(problem).compiled)
        data = plan_to_dict(plan)
        again = plan_from_dict(json.loads(json.dumps(data)))
        assert validate(problem, again).valid

    def test_comments_and_blanks_ignored(self):
        parsed = parse_plan_text("# a comment\n\nMove(p1=P00, p2=P10)\n")
        assert len(parsed) == 1
