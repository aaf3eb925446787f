"""Second pipeline pass: flatten array fluents to scalars and resolve every access.

An array fluent of shape d1 x ... x dn becomes d1*...*dn scalar fluents named
``<name>_i1_..._in``. Whole-array comparisons and whole-array effect targets
decompose elementwise. Out-of-range accesses follow the selected mode:

* restrictive: any statically out-of-range access is a fatal error naming it;
* permissive: in preconditions, goals, and effect conditions a Boolean
  out-of-range access evaluates to false, and for a non-Boolean access the
  smallest enclosing Boolean expression does; in an effect's target or value
  an out-of-range access removes the whole action, with a notice.
"""
from __future__ import annotations

import enum
import itertools

from ..errors import CompilationError, OutOfRangeError
from ..evaluation import simplify
from ..model import (
    FALSE,
    Action,
    ArrayType,
    Effect,
    Expr,
    Fluent,
    Problem,
)
from . import CompilationResult, check_result_invariants, fresh_problem_like

__all__ = ["UndefinednessMode", "flatten_arrays"]


class UndefinednessMode(enum.Enum):
    RESTRICTIVE = "restrictive"
    PERMISSIVE = "permissive"


class _OutOfRange:
    """Sentinel propagated upward until the nearest Boolean-typed ancestor."""

    def __init__(self, access: Expr):
        self.access = access


def flatten_arrays(problem: Problem,
                   mode: UndefinednessMode = UndefinednessMode.RESTRICTIVE) -> CompilationResult:
    """Flatten every array fluent and rewrite all accesses to scalar fluents.

    Requires integer action parameters to be gone already, so that every index
    expression simplifies to an integer constant.
    """
    for action in problem.actions.values():
        for p in action.int_parameters():
            raise CompilationError(
                f"cannot flatten arrays: action {action.name!r} still has bounded-integer "
                f"parameter {p.value!r}, so indices like [{p.value}] have undefined values; "
                "ground integer parameters first")

    pass_ = _ArrayFlattener(problem, mode)
    return pass_.run()


class _ArrayFlattener:
    def __init__(self, problem: Problem, mode: UndefinednessMode):
        self.source = problem
        self.mode = mode
        self.compiled = fresh_problem_like(problem, problem.name)
        self.notes: list[str] = []
        # (source fluent name, index path) -> compiled scalar fluent
        self.scalar: dict[tuple[str, tuple[int, ...]], Fluent] = {}

    def run(self) -> CompilationResult:
        self._build_fluents()
        self._distribute_init()
        action_map: dict[str, tuple[str, dict[str, int]]] = {}
        for action in self.source.actions.values():
            new_action = self._rewrite_action(action)
            if new_action is not None:
                self.compiled.add_action(new_action)
                action_map[action.name] = (action.name, {})
        for goal in self.source.goals:
            rewritten = self._rewrite_condition(goal, f"goal {goal}")
            self.compiled.add_goal(simplify(rewritten))
        result = CompilationResult(self.compiled, action_map, self.notes, source=self.source)
        check_result_invariants(result)
        assert not any(isinstance(f.value_type, ArrayType)
                       for f in self.compiled.fluents.values())
        return result

    # -- fluents and initial values -----------------------------------------

    def _build_fluents(self) -> None:
        taken = set(self.source.fluents)
        for fluent in self.source.fluents.values():
            if not isinstance(fluent.value_type, ArrayType):
                self.compiled.add_fluent(fluent)
                continue
            dims = fluent.value_type.dims()
            base = fluent.value_type.base()
            default = fluent.default.const_value() if fluent.default is not None else None
            for path in itertools.product(*[range(d) for d in dims]):
                name = fluent.name + "".join(f"_{i}" for i in path)
                if name in taken:
                    raise CompilationError(
                        f"fluent name collision: flattening {fluent.name!r} would create "
                        f"{name!r}, which already exists")
                taken.add(name)
                cell_default = default
                for i in path:
                    if cell_default is not None:
                        cell_default = cell_default[i]
                scalar = Fluent(name, base, fluent.signature,
                                default=None if cell_default is None else _const_expr(cell_default))
                self.compiled.add_fluent(scalar)
                self.scalar[(fluent.name, path)] = scalar

    def _distribute_init(self) -> None:
        for target, value in self.source.init.items():
            fluent = target.fluent
            if not isinstance(fluent.value_type, ArrayType):
                self.compiled.set_initial_value(target, value)
                continue
            dims = fluent.value_type.dims()
            path = tuple(idx.const_value() for idx in target.indices)
            args = tuple(a.const_value() for a in target.args)
            if len(path) == len(dims):
                self._set_cell_init(fluent.name, path, args, value.const_value())
            else:
                rest = dims[len(path):]
                tree = value.const_value()
                for completion in itertools.product(*[range(d) for d in rest]):
                    cell = tree
                    for i in completion:
                        cell = cell[i]
                    self._set_cell_init(fluent.name, path + completion, args, cell)

    def _set_cell_init(self, fname: str, path: tuple[int, ...], args: tuple, value) -> None:
        scalar = self.scalar[(fname, path)]
        self.compiled.set_initial_value(scalar(*args), _const_expr(value))

    # -- actions ---------------------------------------------------------------

    def _rewrite_action(self, action: Action) -> Action | None:
        where = f"action {action.name}"
        preconditions = tuple(simplify(self._rewrite_condition(p, where))
                              for p in action.preconditions)
        effects: list[Effect] = []
        for eff in action.effects:
            condition = None
            if eff.condition is not None:
                condition = simplify(self._rewrite_condition(eff.condition, where))
                if condition is FALSE:
                    self.notes.append(
                        f"{where}: conditional effect on {eff.target} dropped "
                        "(condition folded to false)")
                    continue
            try:
                expanded = self._rewrite_effect(eff.target, eff.value, condition)
            except _RemoveAction as drop:
                self.notes.append(
                    f"{where}: removed (out-of-range access {drop.access} in an effect)")
                return None
            effects.extend(expanded)
        return Action(action.name, action.parameters, preconditions, tuple(effects))

    def _rewrite_effect(self, target: Expr, value: Expr,
                        condition: Expr | None) -> list[Effect]:
        """Resolve one effect; a partially indexed target expands per cell."""
        if isinstance(target.type, ArrayType):
            out: list[Effect] = []
            if not (isinstance(value.type, ArrayType) and value.type.size == target.type.size):
                raise CompilationError(
                    f"array-valued effect needs an array value of matching shape: "
                    f"{target} := {value}")
            for i in range(target.type.size):
                out.extend(self._rewrite_effect(target[i], _element(value, i), condition))
            return out
        new_target = self._rewrite_value(target)
        new_value = self._rewrite_value(value)
        return [Effect(new_target, simplify(new_value), condition)]

    def _rewrite_value(self, e: Expr) -> Expr:
        """Rewrite an effect target or value; out-of-range removes the action."""
        result = self._rewrite(e, fold_boolean=False, where="")
        if isinstance(result, _OutOfRange):
            raise _RemoveAction(result.access)
        return result

    def _rewrite_condition(self, e: Expr, where: str) -> Expr:
        result = self._rewrite(e, fold_boolean=True, where=where)
        assert isinstance(result, Expr), "Boolean root cannot stay out of range"
        return result

    # -- expression rewriting ----------------------------------------------------

    def _rewrite(self, e: Expr, fold_boolean: bool, where: str):
        op = e.op
        if op in ("bool", "int", "obj", "param"):
            return e
        if op == "fluent":
            return self._resolve_access(e, fold_boolean, where)
        if op in ("eq", "iff") and isinstance(e.args[0].type, ArrayType):
            return self._decompose_comparison(e, fold_boolean, where)

        new_args = []
        for a in e.args:
            r = self._rewrite(a, fold_boolean, where)
            if isinstance(r, _OutOfRange):
                if e.type.is_bool() and fold_boolean:
                    self._note_fold(r.access, where)
                    return FALSE
                return r
            new_args.append(r)
        if tuple(new_args) == e.args:
            return e
        return Expr._make(op, tuple(new_args), (), e.value, e.type)

    def _resolve_access(self, e: Expr, fold_boolean: bool, where: str):
        fluent = e.fluent
        new_args = []
        for a in e.args:
            r = self._rewrite(a, fold_boolean, where)
            if isinstance(r, _OutOfRange):
                return r
            new_args.append(r)
        if not isinstance(fluent.value_type, ArrayType):
            if tuple(new_args) == e.args:
                return e
            return fluent(*new_args)
        dims = fluent.value_type.dims()
        if len(e.indices) != len(dims):
            raise CompilationError(
                f"partially indexed array access {e} outside a comparison or effect target")
        path = []
        for depth, idx in enumerate(e.indices):
            folded = simplify(idx)
            if folded.op != "int":
                raise CompilationError(
                    f"non-constant array index {idx} in {e}; "
                    "integer parameters must be grounded before arrays are flattened")
            path.append(folded.value)
        for depth, i in enumerate(path):
            if not 0 <= i < dims[depth]:
                if self.mode is UndefinednessMode.RESTRICTIVE:
                    raise OutOfRangeError(
                        f"out-of-range array access {e} "
                        f"(index {i} not in [0, {dims[depth] - 1}])", access=str(e))
                if fold_boolean and e.type.is_bool():
                    self._note_fold(str(e), where)
                    return FALSE
                return _OutOfRange(str(e))
        scalar = self.scalar[(fluent.name, tuple(path))]
        return scalar(*new_args)

    def _decompose_comparison(self, e: Expr, fold_boolean: bool, where: str):
        left, right = e.args
        size = left.type.size
        parts = []
        for i in range(size):
            part = _comparison_node(e.op, _element(left, i), _element(right, i))
            r = self._rewrite(part, fold_boolean, where)
            if isinstance(r, _OutOfRange):
                if fold_boolean:
                    self._note_fold(r.access, where)
                    return FALSE
                return r
            parts.append(r)
        return Expr._make("and", tuple(parts), (), None, e.type)

    def _note_fold(self, access: str, where: str) -> None:
        if where:
            self.notes.append(f"{where}: out-of-range access {access} folded to false")


class _RemoveAction(Exception):
    def __init__(self, access: str):
        super().__init__(access)
        self.access = access


def _element(e: Expr, i: int) -> Expr:
    """The i-th element of an array-typed expression (access or literal)."""
    if e.op == "array":
        return e.args[i]
    if e.op == "fluent":
        return e[i]
    raise CompilationError(f"cannot take element {i} of array expression {e}")


def _comparison_node(op: str, left: Expr, right: Expr) -> Expr:
    from ..model import BOOL

    return Expr._make(op, (left, right), (), None, BOOL)


def _const_expr(value) -> Expr:
    from ..model import as_expr

    if isinstance(value, tuple):
        return as_expr(list(value))
    return as_expr(value)
