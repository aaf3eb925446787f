"""Orchestrates the three lowering passes in their mandated order.

Order matters: integer parameters first (array indices need their values),
then arrays, then Count (its arguments may reference array cells and its
maintenance needs the final fluent writes).
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .compilers import CompilationResult
from .compilers.arrays import UndefinednessMode, flatten_arrays
from .compilers.counts import remove_counts
from .compilers.intparams import ground_int_params
from .model import ArrayType, Plan, PlanStep, Problem

__all__ = ["FeatureSet", "PipelineResult", "compile", "map_plan_back", "scan_features"]


@dataclass(frozen=True)
class FeatureSet:
    """Which high-level features are syntactically present in a problem."""

    has_int_params: bool
    has_arrays: bool
    has_count: bool

    def any(self) -> bool:
        return self.has_int_params or self.has_arrays or self.has_count


def scan_features(problem: Problem) -> FeatureSet:
    has_int = any(action.int_parameters() for action in problem.actions.values())
    has_arrays = any(isinstance(f.value_type, ArrayType) for f in problem.fluents.values())
    has_count = any(node.op == "count"
                    for expr in _all_exprs(problem)
                    for node in expr.walk())
    return FeatureSet(has_int, has_arrays, has_count)


def _all_exprs(problem: Problem):
    yield from problem.goals
    for action in problem.actions.values():
        yield from action.preconditions
        for eff in action.effects:
            yield eff.target
            yield eff.value
            if eff.condition is not None:
                yield eff.condition


@dataclass
class PipelineResult(CompilationResult):
    """Compilation result with one problem snapshot per executed pass."""

    passes: list[str] = field(default_factory=list)
    snapshots: list[tuple[str, Problem]] = field(default_factory=list)


# Pass name -> (feature predicate, runner)
_PASS_ORDER = ("int_params", "arrays", "count")


def compile(problem: Problem,
            mode: UndefinednessMode = UndefinednessMode.RESTRICTIVE,
            force_all: bool = False) -> PipelineResult:
    """Run the needed passes in order and compose the plan back-mapping.

    With ``force_all`` every pass runs even when its feature is absent
    (useful for debugging; the passes are identities then).
    """
    problem.validate()
    features = scan_features(problem)
    current = problem
    action_map = {name: (name, {}) for name in problem.actions}
    notes: list[str] = []
    passes: list[str] = []
    snapshots: list[tuple[str, Problem]] = []

    for pass_name in _PASS_ORDER:
        wanted = force_all or {
            "int_params": features.has_int_params,
            "arrays": features.has_arrays,
            "count": features.has_count,
        }[pass_name]
        if not wanted:
            continue
        if pass_name == "int_params":
            step = ground_int_params(current)
        elif pass_name == "arrays":
            step = flatten_arrays(current, mode)
        else:
            step = remove_counts(current)
        action_map = _compose(action_map, step.action_map)
        notes.extend(f"{pass_name}: {n}" for n in step.notes)
        passes.append(pass_name)
        current = step.compiled
        snapshots.append((pass_name, current))

    out_features = scan_features(current)
    assert not out_features.any(), "high-level feature survived the pipeline"
    return PipelineResult(compiled=current, action_map=action_map, notes=notes,
                          source=problem, passes=passes, snapshots=snapshots)


def _compose(first: dict[str, tuple[str, dict[str, int]]],
             second: dict[str, tuple[str, dict[str, int]]]):
    """Back-mapping of running ``second`` after ``first``."""
    out = {}
    for name, (mid_name, binding2) in second.items():
        src_name, binding1 = first[mid_name]
        merged = dict(binding1)
        merged.update(binding2)
        out[name] = (src_name, merged)
    return out


def map_plan_back(result: CompilationResult, plan: Plan) -> Plan:
    """Rewrite a compiled-level plan into the source problem's actions.

    Integer values recovered from the grounder merge with the surviving
    user-typed arguments, ordered by the source action's parameter list.
    """
    assert result.source is not None
    steps = []
    for step in plan:
        if step.action not in result.action_map:
            from .errors import PlanError

            raise PlanError(f"unknown compiled action {step.action!r} in plan")
        src_name, int_binding = result.action_map[step.action]
        source_action = result.source.actions[src_name]
        given = step.arg_dict()
        args = []
        for p in source_action.parameters:
            if p.value in int_binding:
                args.append((p.value, int_binding[p.value]))
            elif p.value in given:
                args.append((p.value, given[p.value]))
            else:
                from .errors import PlanError

                raise PlanError(
                    f"cannot recover argument {p.value!r} of {src_name!r} "
                    f"from compiled step {step}")
        steps.append(PlanStep(src_name, tuple(args)))
    return Plan(tuple(steps))
