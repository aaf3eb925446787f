"""First pipeline pass: eliminate bounded-integer action parameters.

Every source action with integer parameters is expanded to one action per
combination of the integer domains (row-major over declaration order). The
new action keeps the source name suffixed with ``_`` and the parameter values
separated by ``_``; user-typed parameters are retained untouched.
"""
from __future__ import annotations

import itertools

from ..errors import CompilationError
from ..evaluation import simplify, substitute
from ..model import FALSE, TRUE, Action, Effect, IntType, Problem
from . import CompilationResult, check_result_invariants, fresh_problem_like

__all__ = ["ground_int_params"]


def ground_int_params(problem: Problem) -> CompilationResult:
    """Enumerate all integer-parameter combinations of every action.

    The problem may still contain arrays and Count expressions. Substituted
    expressions are simplified, so no arithmetic over two constants survives.
    Actions whose precondition folds to constant false are kept but noted.
    """
    compiled = fresh_problem_like(problem, problem.name)
    for fluent in problem.fluents.values():
        compiled.add_fluent(fluent)

    notes: list[str] = []
    action_map: dict[str, tuple[str, dict[str, int]]] = {}

    for action in problem.actions.values():
        for new_action, binding in _expand(action):
            if new_action.name in action_map:
                raise CompilationError(
                    f"action name collision: {new_action.name!r} produced more than once "
                    "while grounding integer parameters")
            if any(p is FALSE for p in new_action.preconditions):
                notes.append(
                    f"action {new_action.name}: precondition simplified to false; "
                    "kept but never applicable")
            compiled.add_action(new_action)
            action_map[new_action.name] = (action.name, binding)

    for target, value in problem.init.items():
        compiled.set_initial_value(target, value)
    for goal in problem.goals:
        compiled.add_goal(simplify(goal))

    result = CompilationResult(compiled, action_map, notes, source=problem)
    check_result_invariants(result)
    return result


def _expand(action: Action):
    int_params = action.int_parameters()
    if not int_params:
        yield action, {}
        return
    user_params = action.user_parameters()
    domains = []
    for p in int_params:
        assert isinstance(p.type, IntType)
        domains.append(range(p.type.lower, p.type.upper + 1))
    for combo in itertools.product(*domains):
        binding = {p.value: v for p, v in zip(int_params, combo)}
        name = action.name + "_" + "_".join(str(v) for v in combo)
        preconditions = tuple(simplify(substitute(pre, binding))
                              for pre in action.preconditions)
        effects = []
        for eff in action.effects:
            condition = None
            if eff.condition is not None:
                condition = simplify(substitute(eff.condition, binding))
                if condition is FALSE:
                    continue
                if condition is TRUE:
                    condition = None
            effects.append(Effect(
                target=simplify(substitute(eff.target, binding)),
                value=simplify(substitute(eff.value, binding)),
                condition=condition,
            ))
        yield Action(name, user_params, preconditions, tuple(effects)), binding
