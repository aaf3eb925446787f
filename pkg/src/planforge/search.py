"""Built-in forward-search planner and plan validator.

``solve`` works on fully compiled problems (it grounds any remaining
user-typed action parameters itself); ``validate`` evaluates high-level
problems directly, arrays, Count, and integer bindings included.
"""
from __future__ import annotations

import heapq
import itertools
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

from .errors import ModelError, OutOfRangeError, PlanError, SearchLimitExceeded
from .evaluation import evaluate, simplify, substitute
from .model import (
    FALSE,
    TRUE,
    Action,
    ArrayType,
    Expr,
    IntType,
    Object,
    Plan,
    PlanStep,
    Problem,
    State,
    UserType,
    Value,
    ground_fluents,
)

__all__ = ["solve", "validate", "reachable_states", "SearchStats", "ValidationReport"]


@dataclass
class SearchStats:
    expanded: int = 0
    generated: int = 0
    seconds: float = 0.0


@dataclass
class ValidationReport:
    """Outcome of checking a plan: applicability per step, then the goals."""

    valid: bool
    failed_step: Optional[int] = None
    reason: Optional[str] = None
    notes: list[str] = field(default_factory=list)

    def __str__(self) -> str:
        if self.valid:
            return "valid"
        where = "goal check" if self.failed_step is None else f"step {self.failed_step}"
        return f"invalid at {where}: {self.reason}"


# ---------------------------------------------------------------------------
# Grounding compiled problems to closures over state vectors
# ---------------------------------------------------------------------------


class _Ground:
    """A ground action compiled to closures over the state vector."""

    __slots__ = ("step", "precondition", "effects", "name")

    def __init__(self, step: PlanStep, precondition, effects):
        self.step = step
        self.name = str(step)
        self.precondition = precondition
        # effects: list of (target index, value closure, condition closure or None)
        self.effects = effects

    def apply(self, state: tuple) -> Optional[tuple]:
        writes: dict[int, Value] = {}
        for idx, value_fn, cond_fn in self.effects:
            if cond_fn is not None and not cond_fn(state):
                continue
            v = value_fn(state)
            if idx in writes and writes[idx] != v:
                return None  # conflicting simultaneous writes
            writes[idx] = v
        if not writes:
            return state
        out = list(state)
        for idx, v in writes.items():
            out[idx] = v
        return tuple(out)


class _GroundProblem:
    def __init__(self, problem: Problem):
        if any(isinstance(f.value_type, ArrayType) for f in problem.fluents.values()):
            raise ModelError("solve requires a fully compiled problem (arrays remain)")
        self.problem = problem
        self.cells = ground_fluents(problem)
        self.index = {(f.name, args): i for i, (f, args) in enumerate(self.cells)}
        init = problem.initial_state()
        self.initial = tuple(init.get(f.name, args) for f, args in self.cells)
        self.goal_fns = [self._compile(simplify(g), {}) for g in problem.goals]
        self.actions = self._ground_actions()

    def goal_holds(self, state: tuple) -> bool:
        return all(fn(state) for fn in self.goal_fns)

    def unsatisfied_goals(self, state: tuple) -> int:
        return sum(1 for fn in self.goal_fns if not fn(state))

    def _ground_actions(self) -> list[_Ground]:
        out = []
        for action in self.problem.actions.values():
            if action.int_parameters():
                raise ModelError(
                    f"solve requires a fully compiled problem: action {action.name!r} "
                    "still has integer parameters")
            domains = [self.problem.objects(p.type.name) for p in action.parameters]
            for combo in itertools.product(*domains):
                binding = {p.value: o for p, o in zip(action.parameters, combo)}
                ground = self._bind(action, binding)
                if ground is not None:
                    out.append(ground)
        out.sort(key=lambda g: g.name)
        return out

    def _bind(self, action: Action, binding: Mapping[str, Value]) -> Optional[_Ground]:
        pres = [simplify(substitute(p, binding)) for p in action.preconditions]
        if any(p is FALSE for p in pres):
            return None
        pre_fns = [self._compile(p, {}) for p in pres if p is not TRUE]
        effects = []
        unconditional: dict[int, Expr] = {}
        for eff in action.effects:
            cond = None
            if eff.condition is not None:
                c = simplify(substitute(eff.condition, binding))
                if c is FALSE:
                    continue
                if c is not TRUE:
                    cond = self._compile(c, {})
            target = simplify(substitute(eff.target, binding))
            idx = self._target_index(target)
            value = simplify(substitute(eff.value, binding))
            if cond is None:
                if idx in unconditional and unconditional[idx] != value:
                    return None  # statically conflicting writes: malformed ground action
                unconditional[idx] = value
            effects.append((idx, self._compile_value(value), cond))
        step = PlanStep(action.name, tuple((p.value, binding[p.value])
                                           for p in action.parameters))
        if len(pre_fns) == 1:
            precondition = pre_fns[0]
        else:
            precondition = _conjunction(pre_fns)
        return _Ground(step, precondition, effects)

    def _target_index(self, target: Expr) -> int:
        args = tuple(a.value for a in target.args)
        try:
            return self.index[(target.fluent.name, args)]
        except KeyError:
            raise ModelError(f"effect target {target} is not a ground cell") from None

    # -- expression compilation ------------------------------------------------

    def _compile_value(self, e: Expr) -> Callable[[tuple], Value]:
        if e.is_const():
            v = e.const_value()
            return lambda s: v
        return self._compile(e, {})

    def _compile(self, e: Expr, _env) -> Callable[[tuple], Value]:
        op = e.op
        if op in ("bool", "int", "obj"):
            v = e.value
            return lambda s: v
        if op == "fluent":
            if any(a.op != "obj" for a in e.args):
                arg_fns = [self._compile(a, _env) for a in e.args]
                name = e.value.name
                index = self.index

                def dynamic(s, fns=tuple(arg_fns), name=name, index=index):
                    args = tuple(fn(s) for fn in fns)
                    return s[index[(name, args)]]

                return dynamic
            i = self.index[(e.value.name, tuple(a.value for a in e.args))]
            return lambda s: s[i]
        fns = tuple(self._compile(a, _env) for a in e.args)
        if op == "not":
            f = fns[0]
            return lambda s: not f(s)
        if op == "and":
            return _conjunction(fns)
        if op == "or":
            return lambda s: any(f(s) for f in fns)
        if op == "implies":
            l, r = fns
            return lambda s: (not l(s)) or r(s)
        if op in ("iff", "eq"):
            l, r = fns
            return lambda s: l(s) == r(s)
        if op == "le":
            l, r = fns
            return lambda s: l(s) <= r(s)
        if op == "lt":
            l, r = fns
            return lambda s: l(s) < r(s)
        if op == "ge":
            l, r = fns
            return lambda s: l(s) >= r(s)
        if op == "gt":
            l, r = fns
            return lambda s: l(s) > r(s)
        if op == "plus":
            return lambda s: sum(f(s) for f in fns)
        if op == "minus":
            l, r = fns
            return lambda s: l(s) - r(s)
        if op == "times":
            l, r = fns
            return lambda s: l(s) * r(s)
        if op == "count":
            return lambda s: sum(1 for f in fns if f(s))
        raise ModelError(f"cannot ground expression {e} (op {op!r})")


def _conjunction(fns):
    fns = tuple(fns)
    if not fns:
        return lambda s: True
    if len(fns) == 2:
        a, b = fns
        return lambda s: a(s) and b(s)
    return lambda s: all(f(s) for f in fns)


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------


def solve(problem: Problem,
          strategy: str = "breadth_first",
          max_nodes: Optional[int] = None,
          max_seconds: Optional[float] = None,
          stats: Optional[SearchStats] = None) -> Optional[Plan]:
    """Find a plan on a fully compiled problem, or None if none exists.

    ``breadth_first`` returns a minimum-length plan; ``astar_goalcount`` is
    satisficing. Ties break on lexicographic ground-action order, so repeated
    calls return identical plans. Raises SearchLimitExceeded when a cap is hit
    before the reachable space is exhausted.
    """
    if strategy not in ("breadth_first", "astar_goalcount"):
        raise ValueError(f"unknown strategy {strategy!r}")
    gp = _GroundProblem(problem)
    stats = stats if stats is not None else SearchStats()
    start = time.monotonic()
    deadline = None if max_seconds is None else start + max_seconds

    try:
        if strategy == "breadth_first":
            return _bfs(gp, stats, max_nodes, deadline)
        return _astar(gp, stats, max_nodes, deadline)
    finally:
        stats.seconds = time.monotonic() - start


def _reconstruct(gp: _GroundProblem, parents, state) -> Plan:
    steps = []
    while True:
        prev, ground = parents[state]
        if prev is None:
            break
        steps.append(ground.step)
        state = prev
    return Plan(tuple(reversed(steps)))


def _check_limits(stats: SearchStats, max_nodes, deadline) -> None:
    if max_nodes is not None and stats.expanded > max_nodes:
        raise SearchLimitExceeded(f"node cap of {max_nodes} expansions exhausted")
    if deadline is not None and stats.expanded % 512 == 0 and time.monotonic() > deadline:
        raise SearchLimitExceeded("time cap exhausted")


def _bfs(gp, stats, max_nodes, deadline) -> Optional[Plan]:
    init = gp.initial
    if gp.goal_holds(init):
        return Plan(())
    parents = {init: (None, None)}
    frontier = deque([init])
    actions = gp.actions
    while frontier:
        state = frontier.popleft()
        stats.expanded += 1
        _check_limits(stats, max_nodes, deadline)
        for ground in actions:
            if not ground.precondition(state):
                continue
            nxt = ground.apply(state)
            if nxt is None or nxt in parents:
                continue
            parents[nxt] = (state, ground)
            stats.generated += 1
            if gp.goal_holds(nxt):
                return _reconstruct(gp, parents, nxt)
            frontier.append(nxt)
    return None


def _astar(gp, stats, max_nodes, deadline) -> Optional[Plan]:
    init = gp.initial
    counter = itertools.count()
    open_heap = [(gp.unsatisfied_goals(init), 0, next(counter), init)]
    parents = {init: (None, None)}
    best_g = {init: 0}
    while open_heap:
        f, g, _, state = heapq.heappop(open_heap)
        if g > best_g.get(state, float("inf")):
            continue
        if gp.goal_holds(state):
            return _reconstruct(gp, parents, state)
        stats.expanded += 1
        _check_limits(stats, max_nodes, deadline)
        for ground in gp.actions:
            if not ground.precondition(state):
                continue
            nxt = ground.apply(state)
            if nxt is None:
                continue
            ng = g + 1
            if ng < best_g.get(nxt, float("inf")):
                best_g[nxt] = ng
                parents[nxt] = (state, ground)
                stats.generated += 1
                heapq.heappush(open_heap, (ng + gp.unsatisfied_goals(nxt), ng,
                                           next(counter), nxt))
    return None


def reachable_states(problem: Problem,
                     max_states: Optional[int] = None) -> dict[tuple, int]:
    """Breadth-first distances for every reachable state of a compiled problem.

    Keys are state vectors ordered like ``ground_fluents(problem)``. Used by
    the equivalence and maintenance property checks.
    """
    gp = _GroundProblem(problem)
    dist = {gp.initial: 0}
    frontier = deque([gp.initial])
    while frontier:
        state = frontier.popleft()
        d = dist[state]
        for ground in gp.actions:
            if not ground.precondition(state):
                continue
            nxt = ground.apply(state)
            if nxt is None or nxt in dist:
                continue
            if max_states is not None and len(dist) >= max_states:
                raise SearchLimitExceeded(f"state cap of {max_states} exhausted")
            dist[nxt] = d + 1
            frontier.append(nxt)
    return dist


def state_cells(problem: Problem) -> list[tuple[str, tuple[Object, ...]]]:
    """Column labels for the vectors returned by ``reachable_states``."""
    return [(f.name, args) for f, args in ground_fluents(problem)]


# ---------------------------------------------------------------------------
# Validation (high-level semantics)
# ---------------------------------------------------------------------------


def validate(problem: Problem, plan: Plan,
             mode: "UndefinednessMode | str" = "restrictive") -> ValidationReport:
    """Check a plan step by step against the (possibly high-level) problem.

    Arrays, Count, and integer bindings are evaluated directly. Permissive
    mode mirrors the compile-time rules at run time: in preconditions, effect
    conditions, and goals an out-of-range access folds its smallest enclosing
    Boolean expression to false, while an out-of-range access in an effect's
    target or value makes the step inapplicable (the run-time counterpart of
    removing the action). Restrictive mode raises OutOfRangeError.
    """
    permissive = str(getattr(mode, "value", mode)).lower() == "permissive"
    notes: list[str] = []
    if permissive:
        notes.append(
            "permissive mode: out-of-range accesses fold conditions to false at "
            "run time; in effect targets or values they make the step inapplicable "
            "(run-time mirror of compile-time action removal)")
    cond_eval = _evaluate_folding if permissive else evaluate
    state = problem.initial_state()
    for i, step in enumerate(plan):
        binding = _bind_step(problem, step)
        action = problem.actions[step.action]
        try:
            failed = None
            for pre in action.preconditions:
                if not cond_eval(pre, state, binding):
                    failed = pre
                    break
            if failed is not None:
                return ValidationReport(False, i, f"precondition {failed} not satisfied "
                                        f"in step {step}", notes)
            state = _successor(problem, action, state, binding, cond_eval)
        except OutOfRangeError as exc:
            if not permissive:
                raise
            return ValidationReport(False, i, f"step {step} inapplicable: {exc}", notes)
        except _ConflictingWrites as exc:
            return ValidationReport(False, i, f"step {step}: {exc}", notes)
    for goal in problem.goals:
        if not cond_eval(goal, state):
            return ValidationReport(False, None, f"goal {goal} not satisfied "
                                    "in the final state", notes)
    return ValidationReport(True, notes=notes)


def _evaluate_folding(expr: Expr, state: State, binding=None) -> Value:
    """Evaluate with the permissive rule: an out-of-range access folds its
    smallest enclosing Boolean expression to false."""
    binding = binding or {}

    def walk(e: Expr) -> Value:
        if e.type.is_bool():
            try:
                return _apply_op(e, walk, state, binding)
            except OutOfRangeError:
                return False
        return _apply_op(e, walk, state, binding)

    return walk(expr)


def _apply_op(e: Expr, walk, state: State, binding) -> Value:
    op = e.op
    if op in ("bool", "int", "obj"):
        return e.value
    if op == "param":
        return binding[e.value]
    if op == "fluent":
        args = tuple(walk(a) for a in e.args)
        value = state.get(e.value.name, args)
        vtype = e.value.value_type
        for idx_expr in e.indices:
            idx = walk(idx_expr)
            assert isinstance(vtype, ArrayType)
            if not 0 <= idx < vtype.size:
                raise OutOfRangeError(
                    f"array access out of range: {e} (index {idx} not in "
                    f"[0, {vtype.size - 1}])", access=str(e))
            value = value[idx]
            vtype = vtype.element
        return value
    if op == "array":
        return tuple(walk(a) for a in e.args)
    vals = [walk(a) for a in e.args]
    if op == "not":
        return not vals[0]
    if op == "and":
        return all(vals)
    if op == "or":
        return any(vals)
    if op == "implies":
        return (not vals[0]) or vals[1]
    if op in ("iff", "eq"):
        return vals[0] == vals[1]
    if op == "le":
        return vals[0] <= vals[1]
    if op == "lt":
        return vals[0] < vals[1]
    if op == "ge":
        return vals[0] >= vals[1]
    if op == "gt":
        return vals[0] > vals[1]
    if op == "plus":
        return sum(vals)
    if op == "minus":
        return vals[0] - vals[1]
    if op == "times":
        return vals[0] * vals[1]
    if op == "count":
        return sum(1 for v in vals if v)
    raise AssertionError(op)


class _ConflictingWrites(Exception):
    pass


def _bind_step(problem: Problem, step: PlanStep) -> dict[str, Value]:
    if step.action not in problem.actions:
        raise PlanError(f"unknown action {step.action!r} in plan step {step}")
    action = problem.actions[step.action]
    given = step.arg_dict()
    expected = {p.value for p in action.parameters}
    extra = set(given) - expected
    if extra:
        raise PlanError(f"step {step}: unexpected arguments {sorted(extra)}")
    binding: dict[str, Value] = {}
    for p in action.parameters:
        if p.value not in given:
            raise PlanError(f"step {step}: missing argument {p.value!r}")
        raw = given[p.value]
        if isinstance(p.type, IntType):
            if isinstance(raw, bool) or not isinstance(raw, int):
                raise PlanError(f"step {step}: argument {p.value!r} must be an integer")
            if not p.type.lower <= raw <= p.type.upper:
                raise PlanError(
                    f"step {step}: binding {p.value}={raw} out of bounds {p.type}")
            binding[p.value] = raw
        else:
            assert isinstance(p.type, UserType)
            if isinstance(raw, str):
                obj = problem.object(raw) if problem.has_object(raw) else None
            elif isinstance(raw, Object):
                obj = raw if problem.has_object(raw.name) else None
            else:
                obj = None
            if obj is None or obj.type_name != p.type.name:
                raise PlanError(
                    f"step {step}: argument {p.value}={raw!r} is not an object "
                    f"of type {p.type}")
            binding[p.value] = obj
    return binding


def _successor(problem: Problem, action: Action, state: State, binding,
               cond_eval=evaluate) -> State:
    # Simultaneous effects with read-before-write: conditions, values, and
    # target cells all evaluate in the pre-state.
    writes: dict[tuple, Value] = {}
    rendered: dict[tuple, str] = {}
    for eff in action.effects:
        if eff.condition is not None and not cond_eval(eff.condition, state, binding):
            continue
        target = eff.target
        args = tuple(evaluate(a, state, binding) for a in target.args)
        path = tuple(evaluate(idx, state, binding) for idx in target.indices)
        vtype = target.fluent.value_type
        dims = vtype.dims() if isinstance(vtype, ArrayType) else ()
        for depth, idx in enumerate(path):
            if not 0 <= idx < dims[depth]:
                raise OutOfRangeError(
                    f"effect target out of range: {target} (index {idx} "
                    f"not in [0, {dims[depth] - 1}])", access=str(target))
        value = evaluate(eff.value, state, binding)
        key = (target.fluent.name, args, path)
        for other in writes:
            if other[:2] != key[:2]:
                continue
            shorter = min(len(other[2]), len(path))
            if other[2][:shorter] == path[:shorter] and other[2] != path:
                raise _ConflictingWrites(
                    f"overlapping simultaneous assignments to {rendered[other]} "
                    f"and {target}")
        if key in writes and writes[key] != value:
            raise _ConflictingWrites(
                f"conflicting simultaneous assignments to {rendered[key]}")
        writes[key] = value
        rendered[key] = str(target)
    updates: dict[tuple[str, tuple[Object, ...]], Value] = {}
    for (fname, args, path), value in writes.items():
        base_key = (fname, args)
        current = updates.get(base_key, state.get(fname, args))
        updates[base_key] = _assign(current, path, value)
    return state.updated(updates)


def _assign(value, path: tuple[int, ...], new):
    if not path:
        return new
    i = path[0]
    return value[:i] + (_assign(value[i], path[1:], new),) + value[i + 1:]
