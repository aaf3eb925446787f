"""Third pipeline pass: replace Count expressions with sums of 0/1 integer fluents.

Each distinct Count argument (structural identity) gets one fluent named
``count_0``, ``count_1``, ... in discovery order: goals first, then actions in
declaration order. Every Count node becomes a Plus over its arguments'
fluents. Each count fluent is initialised to the truth value of its argument
in the initial state, and every action that assigns a fluent mentioned by an
argument gains effects keeping the count fluent in sync with the post-state
truth of that argument.
"""
from __future__ import annotations


from ..errors import CompilationError
from ..evaluation import evaluate, simplify
from ..model import (
    FALSE,
    TRUE,
    Action,
    And,
    Effect,
    Equals,
    Expr,
    Fluent,
    Int,
    IntType,
    Not,
    Problem,
)
from . import CompilationResult, check_result_invariants, fresh_problem_like

__all__ = ["remove_counts"]

_MAX_GUARDED_WRITES = 8


def remove_counts(problem: Problem) -> CompilationResult:
    """Compile away every Count expression; requires arrays and integer
    action parameters to be gone already."""
    return _CountRemover(problem).run()


class _CountRemover:
    def __init__(self, problem: Problem):
        self.source = problem
        self.compiled = fresh_problem_like(problem, problem.name)
        self.notes: list[str] = []
        self.exprs: list[Expr] = []          # argument expression of count_k, by k
        self.index_of: dict[Expr, int] = {}  # argument expression -> k
        self.accesses: list[Expr] = []       # count_k fluent access, by k

    def run(self) -> CompilationResult:
        self._allocate()
        self._build_fluents()
        action_map: dict[str, tuple[str, dict[str, int]]] = {}
        for action in self.source.actions.values():
            new_action = self._rewrite_action(action)
            self.compiled.add_action(new_action)
            action_map[action.name] = (action.name, {})
        self._initial_values()
        for goal in self.source.goals:
            self.compiled.add_goal(simplify(self._rewrite(goal)))
        result = CompilationResult(self.compiled, action_map, self.notes, source=self.source)
        check_result_invariants(result)
        for action in result.compiled.actions.values():
            for expr in _action_exprs(action):
                assert all(n.op != "count" for n in expr.walk()), \
                    "Count node survived compilation"
        for goal in result.compiled.goals:
            assert all(n.op != "count" for n in goal.walk())
        return result

    # -- allocation --------------------------------------------------------------

    def _allocate(self) -> None:
        for goal in self.source.goals:
            self._scan(goal)
        for action in self.source.actions.values():
            for pre in action.preconditions:
                self._scan(pre)
            for eff in action.effects:
                if eff.condition is not None:
                    self._scan(eff.condition)
                self._scan(eff.value)

    def _scan(self, expr: Expr) -> None:
        for node in expr.walk():
            if node.op != "count":
                continue
            for arg in node.args:
                if any(inner.op == "count" for inner in arg.walk()):
                    raise CompilationError(f"nested Count is not supported: {node}")
                if arg.free_params():
                    raise CompilationError(
                        f"Count argument must be closed, found parameters in {arg}")
                if arg not in self.index_of:
                    self.index_of[arg] = len(self.exprs)
                    self.exprs.append(arg)

    def _build_fluents(self) -> None:
        for fluent in self.source.fluents.values():
            self.compiled.add_fluent(fluent)
        for k in range(len(self.exprs)):
            name = f"count_{k}"
            if name in self.compiled.fluents:
                raise CompilationError(
                    f"fluent name collision: {name!r} already exists in the problem")
            fluent = Fluent(name, IntType(0, 1))
            self.compiled.add_fluent(fluent)
            self.accesses.append(fluent())

    def _initial_values(self) -> None:
        for target, value in self.source.init.items():
            self.compiled.set_initial_value(target, value)
        state = self.source.initial_state()
        for k, expr in enumerate(self.exprs):
            truth = evaluate(expr, state)
            self.compiled.set_initial_value(self.accesses[k], Int(1 if truth else 0))

    # -- rewriting -----------------------------------------------------------------

    def _rewrite(self, e: Expr) -> Expr:
        if e.op == "count":
            summands = tuple(self.accesses[self.index_of[a]] for a in e.args)
            if len(summands) == 1:
                return summands[0]
            return Expr._make("plus", summands, (), None, IntType(0, len(summands)))
        if not e.args and not e.indices:
            return e
        args = tuple(self._rewrite(a) for a in e.args)
        if args == e.args:
            return e
        return Expr._make(e.op, args, e.indices, e.value, e.type)

    def _rewrite_action(self, action: Action) -> Action:
        preconditions = tuple(simplify(self._rewrite(p)) for p in action.preconditions)
        effects = []
        for eff in action.effects:
            condition = None if eff.condition is None else simplify(self._rewrite(eff.condition))
            effects.append(Effect(eff.target, simplify(self._rewrite(eff.value)), condition))
        effects.extend(self._maintenance_effects(action.name, effects))
        return Action(action.name, action.parameters, preconditions, tuple(effects))

    # -- count maintenance ------------------------------------------------------------

    def _maintenance_effects(self, action_name: str, effects: list[Effect]) -> list[Effect]:
        self._reject_double_writes(action_name, effects)
        out: list[Effect] = []
        for k, expr in enumerate(self.exprs):
            watched = expr.fluents_used()
            events = []
            for eff in effects:
                if eff.target.fluent.name not in watched:
                    continue
                events.extend(self._match_occurrences(expr, eff))
            if not events:
                continue
            out.extend(self._emit_for_count(action_name, k, expr, events))
        return out

    def _reject_double_writes(self, action_name: str, effects: list[Effect]) -> None:
        watched = set().union(*(e.fluents_used() for e in self.exprs)) if self.exprs else set()
        seen: list[Expr] = []
        for eff in effects:
            if eff.target.fluent.name not in watched:
                continue
            for prev in seen:
                if prev.fluent.name == eff.target.fluent.name and _unifiable(prev, eff.target):
                    raise CompilationError(
                        f"action {action_name}: two effects may assign {eff.target.fluent.name}, "
                        "which a Count argument mentions; count maintenance would be ambiguous")
            seen.append(eff.target)

    def _match_occurrences(self, expr: Expr, eff: Effect):
        """Pair each ground access of the written fluent in ``expr`` with the effect.

        Yields (guard, occurrence, value): guard conjoins the effect condition
        with parameter-match equalities between the effect's arguments and the
        occurrence's (per the parameterized-fluent rule).
        """
        events = []
        target = eff.target
        for node in set(expr.walk()):
            if node.op != "fluent" or node.value.name != target.fluent.name:
                continue
            guards = [] if eff.condition is None else [eff.condition]
            matched = True
            for t_arg, o_arg in zip(target.args, node.args):
                if t_arg.op == "obj" and o_arg.op == "obj":
                    if t_arg is not o_arg:
                        matched = False
                        break
                else:
                    guards.append(Equals(t_arg, o_arg))
            if not matched:
                continue
            guard = simplify(And(guards)) if guards else TRUE
            if guard is FALSE:
                continue
            events.append((guard, node, eff.value))
        return sorted(events, key=lambda ev: ev[1].sort_key)

    def _emit_for_count(self, action_name: str, k: int, expr: Expr, events) -> list[Effect]:
        certain = {occ: value for guard, occ, value in events if guard is TRUE}
        guarded = [(g, occ, v) for g, occ, v in events if g is not TRUE]
        if len(guarded) > _MAX_GUARDED_WRITES:
            raise CompilationError(
                f"action {action_name}: {len(guarded)} conditional writes affect one "
                f"Count argument ({expr}); refusing to expand the condition space")
        out: list[Effect] = []
        for mask in range(1 << len(guarded)):
            fired = dict(certain)
            conds: list[Expr] = []
            for i, (guard, occ, value) in enumerate(guarded):
                if mask & (1 << i):
                    assert occ not in fired or fired[occ] is value
                    fired[occ] = value
                    conds.append(guard)
                else:
                    conds.append(Not(guard))
            if not fired:
                continue  # nothing relevant fired; the count fluent keeps its value
            condition = simplify(And(conds)) if conds else TRUE
            if condition is FALSE:
                continue
            post = simplify(_replace(expr, fired))
            access = self.accesses[k]
            cond_or_none = None if condition is TRUE else condition
            if post is TRUE:
                out.append(Effect(access, Int(1), cond_or_none))
            elif post is FALSE:
                out.append(Effect(access, Int(0), cond_or_none))
            else:
                on = simplify(And(condition, post))
                off = simplify(And(condition, Not(post)))
                if on is not FALSE:
                    out.append(Effect(access, Int(1), on))
                if off is not FALSE:
                    out.append(Effect(access, Int(0), off))
        return out


def _unifiable(a: Expr, b: Expr) -> bool:
    """Whether two accesses of one fluent could name the same ground cell."""
    for x, y in zip(a.args, b.args):
        if x.op == "obj" and y.op == "obj" and x is not y:
            return False
    return True


def _replace(e: Expr, mapping: dict[Expr, Expr]) -> Expr:
    if e in mapping:
        return mapping[e]
    if not e.args:
        return e
    args = tuple(_replace(a, mapping) for a in e.args)
    if args == e.args:
        return e
    return Expr._make(e.op, args, e.indices, e.value, e.type)


def _action_exprs(action: Action):
    yield from action.preconditions
    for eff in action.effects:
        yield eff.target
        yield eff.value
        if eff.condition is not None:
            yield eff.condition
