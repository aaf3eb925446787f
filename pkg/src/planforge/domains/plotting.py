"""Plotting: clear coloured blocks from a grid by shooting into rows and columns.

The grid is a rows x columns array of Colour cells; ``N`` marks no block and
``W`` is the wildcard the hand starts with (it matches any colour but may not
be shot directly). A row shot of colour p consumes p/N cells from the left up
to column l; a partial shot lodges in the first differently coloured block,
swapping it into the hand, while a full shot crosses the whole row and the
hand keeps p. Cleared columns settle under gravity (blocks above shift down).
Column shots traverse from the top downward analogously.

Only the partial-row action follows a published formulation cell by cell;
the other three variants are reconstructed from the game rules to match its
style.
"""
from __future__ import annotations

from ..errors import ModelError
from ..model import (
    And,
    Action,
    ArrayType,
    Count,
    Effect,
    Equals,
    Fluent,
    GT,
    IntType,
    LE,
    Not,
    Or,
    Param,
    Problem,
)

__all__ = ["gen_plotting"]

WILDCARD = "W"
EMPTY = "N"


def gen_plotting(rows: int, columns: int, colours: list[str],
                 grid: list[list[str]], max_remaining: int) -> Problem:
    """Build the problem for one grid; goal: at most ``max_remaining`` blocks left."""
    if rows < 2 or columns < 2:
        raise ModelError("plotting needs at least a 2x2 grid")
    if max_remaining < 0:
        raise ModelError("max_remaining must be non-negative")
    if len(grid) != rows or any(len(row) != columns for row in grid):
        raise ModelError(f"grid must be {rows}x{columns}")
    palette = [c for c in colours if c not in (WILDCARD, EMPTY)]
    for row in grid:
        for name in row:
            if name != EMPTY and name not in palette:
                raise ModelError(f"grid colour {name!r} not among declared colours")
    _check_gravity(grid)

    problem = Problem("plotting")
    ctype = problem.add_user_type("Colour")
    objects = {name: problem.add_object(name, "Colour") for name in palette}
    objects[WILDCARD] = problem.add_object(WILDCARD, "Colour")
    objects[EMPTY] = problem.add_object(EMPTY, "Colour")
    w, n = objects[WILDCARD], objects[EMPTY]

    blocks = problem.add_fluent(Fluent("blocks", ArrayType(rows, ArrayType(columns, ctype))))
    hand = problem.add_fluent(Fluent("hand", ctype))
    problem.set_initial_value(blocks(), [[objects[name] for name in row] for row in grid])
    problem.set_initial_value(hand(), w)

    for action in _shot_actions(blocks, hand, ctype, w, n, rows, columns):
        problem.add_action(action)

    remaining = [Not(Equals(blocks[i][j], n)) for i in range(rows) for j in range(columns)]
    problem.add_goal(LE(Count(remaining), max_remaining))
    problem.validate()
    return problem


def _check_gravity(grid: list[list[str]]) -> None:
    for c in range(len(grid[0])):
        seen_block = False
        for r in range(len(grid)):
            if grid[r][c] != EMPTY:
                seen_block = True
            elif seen_block:
                raise ModelError(
                    f"grid violates gravity: empty cell below a block in column {c}")


def _shot_actions(blocks, hand, ctype, w, n, rows: int, columns: int):
    def may_shoot(p):
        return [Not(Or(Equals(p, w), Equals(p, n))),
                Or(Equals(hand(), p), Equals(hand(), w))]

    def row_gravity(p_row, upto_col):
        """Columns c <= upto_col settle: rows above p_row shift down, top row empties."""
        effects = []
        for c in range(columns if upto_col is None else columns - 1):
            guard_c = None if upto_col is None else LE(c, upto_col)
            effects.append(Effect(blocks[0][c], n, condition=guard_c))
            for a in range(1, rows):
                cond = LE(a, p_row) if guard_c is None else And(guard_c, LE(a, p_row))
                effects.append(Effect(blocks[a][c], blocks[a - 1][c], condition=cond))
        return effects

    # shoot_partial_row: consume p/N cells of row r up to column l; the block
    # at l+1 is a different colour, swaps into the hand, and p lodges there.
    p = Param("p", ctype)
    r = Param("r", IntType(0, rows - 1))
    l = Param("l", IntType(0, columns - 2))
    pre = may_shoot(p)
    for c in range(columns - 1):
        pre.append(Or(GT(c, l), Equals(blocks[r][c], p), Equals(blocks[r][c], n)))
    pre.append(Or([And(Equals(blocks[r][c], p), LE(c, l)) for c in range(columns - 1)]))
    pre.append(Not(Equals(blocks[r][l + 1], p)))
    pre.append(Not(Equals(blocks[r][l + 1], n)))
    effects = [Effect(hand(), blocks[r][l + 1]), Effect(blocks[r][l + 1], p)]
    effects += row_gravity(r, l)
    yield Action("shoot_partial_row", (p, r, l), tuple(pre), tuple(effects))

    # shoot_full_row: the whole row is p/N, the shot crosses it and returns.
    p = Param("p", ctype)
    r = Param("r", IntType(0, rows - 1))
    pre = may_shoot(p)
    for c in range(columns):
        pre.append(Or(Equals(blocks[r][c], p), Equals(blocks[r][c], n)))
    pre.append(Or([Equals(blocks[r][c], p) for c in range(columns)]))
    effects = [Effect(hand(), p)]
    effects += row_gravity(r, None)
    yield Action("shoot_full_row", (p, r), tuple(pre), tuple(effects))

    # shoot_partial_column: consume p/N cells of column c from the top down to
    # row l; the block at l+1 swaps into the hand. Cleared cells are topmost,
    # so nothing falls.
    p = Param("p", ctype)
    c = Param("c", IntType(0, columns - 1))
    l = Param("l", IntType(0, rows - 2))
    pre = may_shoot(p)
    for a in range(rows - 1):
        pre.append(Or(GT(a, l), Equals(blocks[a][c], p), Equals(blocks[a][c], n)))
    pre.append(Or([And(Equals(blocks[a][c], p), LE(a, l)) for a in range(rows - 1)]))
    pre.append(Not(Equals(blocks[l + 1][c], p)))
    pre.append(Not(Equals(blocks[l + 1][c], n)))
    effects = [Effect(hand(), blocks[l + 1][c]), Effect(blocks[l + 1][c], p)]
    effects += [Effect(blocks[a][c], n, condition=LE(a, l)) for a in range(rows - 1)]
    yield Action("shoot_partial_column", (p, c, l), tuple(pre), tuple(effects))

    # shoot_full_column: the whole column is p/N; it empties entirely.
    p = Param("p", ctype)
    c = Param("c", IntType(0, columns - 1))
    pre = may_shoot(p)
    for a in range(rows):
        pre.append(Or(Equals(blocks[a][c], p), Equals(blocks[a][c], n)))
    pre.append(Or([Equals(blocks[a][c], p) for a in range(rows)]))
    effects = [Effect(hand(), p)]
    effects += [Effect(blocks[a][c], n) for a in range(rows)]
    yield Action("shoot_full_column", (p, c), tuple(pre), tuple(effects))
