"""Sliding tile puzzle on a k x k board of bounded integers; 0 is the blank.

The goal is the ordered configuration 1..k*k-1 with the blank last. Four
slide actions move a tile into the adjacent blank; integer parameter bounds
keep every move on the board (you cannot slide up from the first row).
"""
from __future__ import annotations

from ..errors import ModelError
from ..model import (
    Action,
    ArrayType,
    Effect,
    Equals,
    Fluent,
    IntType,
    Param,
    Problem,
)

__all__ = ["gen_npuzzle", "is_solvable", "goal_tiles"]


def goal_tiles(k: int) -> list[list[int]]:
    """The ordered target configuration: 1..k*k-1 row-major, blank last."""
    flat = list(range(1, k * k)) + [0]
    return [flat[i * k:(i + 1) * k] for i in range(k)]


def is_solvable(tiles: list[list[int]], goal: list[list[int]] | None = None) -> bool:
    """Parity check: permutation parity must match the blank's move-distance parity.

    Every slide is a transposition of the blank with a tile, so it flips the
    permutation parity and changes the blank's Manhattan distance by one.
    """
    k = len(tiles)
    goal = goal if goal is not None else goal_tiles(k)
    flat = [v for row in tiles for v in row]
    flat_goal = [v for row in goal for v in row]
    position = {v: i for i, v in enumerate(flat_goal)}
    perm = [position[v] for v in flat]
    inversions = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm))
                     if perm[i] > perm[j])
    br, bc = divmod(flat.index(0), k)
    gr, gc = divmod(flat_goal.index(0), k)
    blank_distance = abs(br - gr) + abs(bc - gc)
    return inversions % 2 == blank_distance % 2


def gen_npuzzle(k: int, tiles: list[list[int]], require_solvable: bool = True) -> Problem:
    """Build the puzzle problem for a k x k permutation of 0..k*k-1."""
    if k < 2:
        raise ModelError("puzzle needs k >= 2")
    if len(tiles) != k or any(len(row) != k for row in tiles):
        raise ModelError(f"tiles must be a {k}x{k} matrix")
    flat = [v for row in tiles for v in row]
    if sorted(flat) != list(range(k * k)):
        raise ModelError(f"tiles must be a permutation of 0..{k * k - 1}")
    if require_solvable and not is_solvable(tiles):
        raise ModelError("unsolvable tile permutation (inversion parity mismatch); "
                         "pass require_solvable=False to build it anyway")

    problem = Problem(f"puzzle{k}x{k}")
    puzzle = problem.add_fluent(
        Fluent("puzzle", ArrayType(k, ArrayType(k, IntType(0, k * k - 1)))))
    problem.set_initial_value(puzzle(), tiles)

    for name, rlo, rhi, clo, chi, dr, dc in (
            ("slide_up", 1, k - 1, 0, k - 1, -1, 0),
            ("slide_down", 0, k - 2, 0, k - 1, 1, 0),
            ("slide_left", 0, k - 1, 1, k - 1, 0, -1),
            ("slide_right", 0, k - 1, 0, k - 2, 0, 1)):
        r = Param("r", IntType(rlo, rhi))
        c = Param("c", IntType(clo, chi))
        row = r + dr if dr > 0 else (r - (-dr) if dr < 0 else r)
        col = c + dc if dc > 0 else (c - (-dc) if dc < 0 else c)
        problem.add_action(Action(
            name, (r, c),
            preconditions=(Equals(puzzle[row][col], 0),),
            effects=(Effect(puzzle[row][col], puzzle[r][c]),
                     Effect(puzzle[r][c], 0))))

    problem.add_goal(Equals(puzzle(), goal_tiles(k)))
    problem.validate()
    return problem
