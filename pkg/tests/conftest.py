"""Shared problem builders used across the suite."""
from __future__ import annotations

import pytest

from planforge import (
    BOOL,
    Action,
    ArrayType,
    Count,
    Effect,
    Equals,
    Fluent,
    IntType,
    Param,
    Problem,
)


def build_robot_problem(goal: str = "count") -> Problem:
    """3x3 grid robot: a 2-D Boolean array fluent and four integer-parameter moves.

    ``goal`` selects the goal: "count" (exactly one occupied cell) or
    "corner" (robot at cell (2, 2)).
    """
    p = Problem("robot3x3")
    at = p.add_fluent(Fluent("at_robot", ArrayType(3, ArrayType(3, BOOL)),
                             default=[[False] * 3] * 3))
    p.set_initial_value(at[0][0], True)

    def move(name, rlo, rhi, clo, chi, dr, dc):
        r = Param("r", IntType(rlo, rhi))
        c = Param("c", IntType(clo, chi))
        return Action(name, (r, c),
                      preconditions=(at[r][c],),
                      effects=(Effect(at[r + dr][c + dc], True),
                               Effect(at[r][c], False)))

    p.add_action(move("move_right", 0, 2, 0, 1, 0, 1))
    p.add_action(move("move_left", 0, 2, 1, 2, 0, -1))
    p.add_action(move("move_down", 0, 1, 0, 2, 1, 0))
    p.add_action(move("move_up", 1, 2, 0, 2, -1, 0))

    if goal == "count":
        cells = [at[i][j] for i in range(3) for j in range(3)]
        p.add_goal(Equals(Count(cells), 1))
    elif goal == "corner":
        p.add_goal(at[2][2])
    else:
        raise ValueError(goal)
    p.validate()
    return p


def build_delivery_problem() -> Problem:
    """2x2 delivery robot: move anywhere, pick up, drop off the package at P11."""
    p = Problem("delivery2x2")
    pos = p.add_user_type("Position")
    p.add_objects("Position", ["P00", "P01", "P10", "P11"])
    at_robot = p.add_fluent(Fluent("at_robot", BOOL, (("p", pos),), default=False))
    at_package = p.add_fluent(Fluent("at_package", BOOL, (("p", pos),), default=False))
    holding = p.add_fluent(Fluent("holding_package", BOOL, default=False))

    p1, p2 = Param("p1", pos), Param("p2", pos)
    p.add_action(Action("Move", (p1, p2),
                        preconditions=(at_robot(p1),),
                        effects=(Effect(at_robot(p2), True),
                                 Effect(at_robot(p1), False))))
    q = Param("p", pos)
    p.add_action(Action("PickUp", (q,),
                        preconditions=(at_robot(q), at_package(q)),
                        effects=(Effect(holding(), True),
                                 Effect(at_package(q), False))))
    q = Param("p", pos)
    p.add_action(Action("DropOff", (q,),
                        preconditions=(at_robot(q), holding()),
                        effects=(Effect(at_package(q), True),
                                 Effect(holding(), False))))

    p.set_initial_value(at_robot(p.object("P00")), True)
    p.set_initial_value(at_package(p.object("P10")), True)
    p.add_goal(at_package(p.object("P11")))
    p.validate()
    return p


# Frozen benchmark inputs shared by tests and the acceptance suite.
LISTING13_GRID = "GBBoLoGHIoLMGHIAAMCCCKoMooJKDDEEJFFo"
EASY_RUSHHOUR_GRID = "oooooo" + "ooooBo" + "ooAABo" + "oooooo" + "oooooo" + "oooooo"
PLOTTING_2SHOT_GRID = [["R", "R", "B"], ["B", "B", "B"], ["B", "B", "B"]]
PLOTTING_2SHOT_MAX_REMAINING = 3
# The two hardest 8-puzzle boards for the ordered goal [[1,2,3],[4,5,6],[7,8,0]],
# both at optimal distance 31 (re-derived by the BFS oracle in test_acceptance).
HARDEST_PUZZLES = ([[8, 6, 7], [2, 5, 4], [3, 0, 1]],
                   [[6, 4, 7], [8, 5, 0], [3, 2, 1]])


@pytest.fixture
def robot_problem() -> Problem:
    return build_robot_problem()


@pytest.fixture
def delivery_problem() -> Problem:
    return build_delivery_problem()
