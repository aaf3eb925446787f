"""Rush Hour on the standard 6x6 grid.

Instances come as 36-character strings (row-major); ``o`` or ``.`` marks an
empty cell and each letter one vehicle: cars cover 2 cells, trucks 3, always
in a straight line. The red car ``A`` sits horizontally on the exit row and
must reach the right edge. A single move slides a vehicle by a signed
distance ``m``; the permissive array pass later removes the ground moves that
would land outside the grid.
"""
from __future__ import annotations

import logging

from ..errors import ModelError
from ..model import (
    BOOL,
    Action,
    ArrayType,
    Effect,
    Equals,
    Fluent,
    GT,
    IntType,
    LT,
    Not,
    Or,
    Param,
    Problem,
)

__all__ = ["gen_rushhour"]

SIZE = 6
EXIT_ROW = 2

log = logging.getLogger(__name__)


def gen_rushhour(grid: str) -> Problem:
    """Build the problem for one database grid string."""
    vehicles = _parse_grid(grid)
    problem = Problem("rushhour")
    vtype = problem.add_user_type("Vehicle")
    none = problem.add_object("none", "Vehicle")
    objects = {"none": none}
    for letter in sorted(vehicles):
        objects[letter] = problem.add_object(letter, "Vehicle")

    occupied = problem.add_fluent(Fluent("occupied", ArrayType(SIZE, ArrayType(SIZE, vtype))))
    is_car = problem.add_fluent(Fluent("is_car", BOOL, signature=(("v", vtype),)))

    cells = [[none] * SIZE for _ in range(SIZE)]
    for letter, positions in vehicles.items():
        for r, c in positions:
            cells[r][c] = objects[letter]
    problem.set_initial_value(occupied(), cells)
    problem.set_initial_value(is_car(none), False)
    for letter, positions in vehicles.items():
        problem.set_initial_value(is_car(objects[letter]), len(positions) == 2)

    for size, kind in ((2, "car"), (3, "truck")):
        problem.add_action(_move(occupied, is_car, vtype, none, "horizontal", kind, size))
        problem.add_action(_move(occupied, is_car, vtype, none, "vertical", kind, size))

    red = objects["A"]
    problem.add_goal(Equals(occupied[EXIT_ROW][SIZE - 2], red))
    problem.add_goal(Equals(occupied[EXIT_ROW][SIZE - 1], red))
    problem.validate()
    return problem


def _parse_grid(grid: str) -> dict[str, list[tuple[int, int]]]:
    if not isinstance(grid, str) or len(grid) != SIZE * SIZE:
        raise ModelError(f"grid must be a {SIZE * SIZE}-character string, got {len(grid)}")
    empties = {ch for ch in grid if ch in "o."}
    if empties:
        log.debug("empty-cell characters seen in grid: %s", sorted(empties))
    vehicles: dict[str, list[tuple[int, int]]] = {}
    for i, ch in enumerate(grid):
        if ch in "o.":
            continue
        if not ch.isalpha():
            raise ModelError(f"unexpected grid character {ch!r} at position {i}")
        vehicles.setdefault(ch, []).append(divmod(i, SIZE))
    if "A" not in vehicles:
        raise ModelError("grid has no red car 'A'")
    for letter, positions in vehicles.items():
        positions.sort()
        if len(positions) not in (2, 3):
            raise ModelError(
                f"vehicle {letter!r} covers {len(positions)} cells; must be 2 (car) or 3 (truck)")
        rows = {r for r, _ in positions}
        cols = {c for _, c in positions}
        straight_h = len(rows) == 1 and cols == set(range(min(cols), min(cols) + len(positions)))
        straight_v = len(cols) == 1 and rows == set(range(min(rows), min(rows) + len(positions)))
        if not (straight_h or straight_v):
            raise ModelError(f"vehicle {letter!r} is bent or has gaps: {positions}")
    red = vehicles["A"]
    if len(red) != 2 or red[0][0] != red[1][0] or red[0][0] != EXIT_ROW:
        raise ModelError("red car 'A' must be a horizontal car on the exit row")
    return vehicles


def _move(occupied, is_car, vtype, none, orientation: str, kind: str, size: int) -> Action:
    """One move schema: slide vehicle ``v`` anchored at (r, c) by ``m`` cells.

    The anchor is the top/left cell. Swept cells (offset d ahead of the
    leading cell, guarded on the value of m) must be empty. Old cells are
    emptied unless the moved vehicle still covers them.
    """
    span = SIZE - size
    horizontal = orientation == "horizontal"
    v = Param("v", vtype)
    r = Param("r", IntType(0, SIZE - 1 if horizontal else span))
    c = Param("c", IntType(0, span if horizontal else SIZE - 1))
    m = Param("m", IntType(-span, span))

    def cell(offset):
        return occupied[r][c + offset] if horizontal else occupied[r + offset][c]

    pre = [Not(Equals(v, none)),
           is_car(v) if kind == "car" else Not(is_car(v)),
           Not(Equals(m, 0))]
    for i in range(size):
        pre.append(Equals(cell(i), v))
    for d in range(1, span + 1):
        # moving forward by m >= d sweeps the cell d ahead of the leading cell
        pre.append(Or(GT(d, m), Equals(cell(size - 1 + d), none)))
        # moving backward by -m >= d sweeps the cell d behind the trailing cell
        pre.append(Or(GT(d, 0 - m), Equals(cell(-d), none)))

    effects = []
    for i in range(size):
        effects.append(Effect(cell(m + i), v))
    for i in range(size):
        # old cell i stays covered when m is within [i-size+1, i]
        effects.append(Effect(cell(i), none,
                              condition=Or(GT(m, i), LT(m, i - size + 1))))

    name = f"move_{orientation}_{kind}"
    return Action(name, (v, r, c, m), tuple(pre), tuple(effects))
