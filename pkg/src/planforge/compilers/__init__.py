"""Problem-lowering compiler passes and their shared result type."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..model import Problem

__all__ = ["CompilationResult", "ActionOrigin"]

# Compiled action name -> (source action name, integer-parameter binding).
ActionOrigin = tuple[str, dict[str, int]]


@dataclass
class CompilationResult:
    """A compiled problem plus the invertible mapping back to the source actions.

    ``action_map`` is injective on compiled names and covers every compiled
    action. ``notes`` collects human-readable drop notices.
    """

    compiled: Problem
    action_map: dict[str, ActionOrigin]
    notes: list[str] = field(default_factory=list)
    source: Optional[Problem] = None

    def __post_init__(self):
        if self.source is None:
            self.source = self.compiled


def check_result_invariants(result: CompilationResult) -> None:
    """Internal sanity assertions shared by the passes."""
    assert set(result.action_map) == set(result.compiled.actions), \
        "action_map must cover exactly the compiled actions"


def fresh_problem_like(problem: Problem, name: str) -> Problem:
    """New problem sharing the source's user types and objects, nothing else."""
    out = Problem(name)
    for type_name, objs in problem.user_types.items():
        out.add_user_type(type_name)
        for o in objs:
            out.add_object(o.name, o.type_name)
    return out
