"""PDDL export for fully compiled problems.

Boolean fluents become predicates, bounded-integer fluents become functions
(:numeric-fluents), and user-type-valued fluents become predicates with a
trailing value argument whose assignments delete the old value through
conditional effects. All objects are emitted as domain constants so actions
may reference them. Output is deterministic: identical problems produce
byte-identical files (two-space indentation, LF line endings).
"""
from __future__ import annotations

from typing import Iterable

from .errors import PddlError
from .model import (
    ArrayType,
    BoolType,
    Effect,
    Expr,
    Fluent,
    IntType,
    Problem,
    UserType,
)

__all__ = ["export"]

_REQUIREMENT_ORDER = (":strips", ":typing", ":equality", ":negative-preconditions",
                      ":disjunctive-preconditions", ":conditional-effects",
                      ":numeric-fluents")


def export(problem: Problem) -> tuple[str, str]:
    """Render (domain text, problem text) for a compiled, feature-free problem."""
    for f in problem.fluents.values():
        if isinstance(f.value_type, ArrayType):
            raise PddlError(f"cannot export array fluent {f.name}; compile the problem first")
    for a in problem.actions.values():
        if a.int_parameters():
            raise PddlError(f"cannot export action {a.name} with integer parameters; "
                            "compile the problem first")
    return _Exporter(problem).render()


class _Names:
    """Injective, deterministic map from model names to PDDL identifiers."""

    _FORBIDDEN = {"object", "number", "either"}

    def __init__(self, names: Iterable[str]):
        self.mapping: dict[str, str] = {}
        taken: set[str] = set()
        for name in sorted(names):
            base = _sanitize(name)
            candidate = base
            attempt = 1
            while candidate in taken or candidate in self._FORBIDDEN:
                attempt += 1
                candidate = f"{base}_{attempt}"
                if attempt > 1000:
                    raise PddlError(f"unsanitizable name collision for {name!r}")
            taken.add(candidate)
            self.mapping[name] = candidate

    def __getitem__(self, name: str) -> str:
        return self.mapping[name]


def _sanitize(name: str) -> str:
    out = []
    for ch in name.lower():
        if ch.isalnum() or ch == "_":
            out.append(ch)
        elif ch == "-":
            out.append("m")  # negative integers in compiled action names
        else:
            out.append("_")
    text = "".join(out)
    if not text or not text[0].isalpha():
        text = "x" + text
    return text


class _Exporter:
    def __init__(self, problem: Problem):
        self.problem = problem
        self.requirements: set[str] = {":strips"}
        self.types = _Names(problem.user_types)
        self.fluent_names = _Names(problem.fluents)
        self.action_names = _Names(problem.actions)
        self.object_names = _Names(o.name for objs in problem.user_types.values()
                                   for o in objs)
        self.domain_name = _sanitize(problem.name)

    # -- top level -------------------------------------------------------------

    def render(self) -> tuple[str, str]:
        # translate the bodies first so requirement flags are complete
        actions = [self._action(a) for a in self.problem.actions.values()]
        goal = self._gd_list([self._gd(g, {}) for g in self.problem.goals])
        init = self._init_lines()
        if self.problem.user_types:
            self.requirements.add(":typing")
        if any(isinstance(f.value_type, IntType) for f in self.problem.fluents.values()):
            self.requirements.add(":numeric-fluents")

        domain = [f"(define (domain {self.domain_name})"]
        reqs = [r for r in _REQUIREMENT_ORDER if r in self.requirements]
        domain.append(f"  (:requirements {' '.join(reqs)})")
        if self.problem.user_types:
            names = " ".join(self.types[t] for t in self.problem.user_types)
            domain.append(f"  (:types {names} - object)")
            constants = []
            for type_name, objs in self.problem.user_types.items():
                if not objs:
                    continue
                members = " ".join(self.object_names[o.name] for o in objs)
                constants.append(f"{members} - {self.types[type_name]}")
            if constants:
                domain.append("  (:constants")
                for line in constants:
                    domain.append(f"    {line}")
                domain.append("  )")
        predicates = [self._declaration(f) for f in self.problem.fluents.values()
                      if not isinstance(f.value_type, IntType)]
        if predicates:
            domain.append("  (:predicates")
            domain.extend(f"    {p}" for p in predicates)
            domain.append("  )")
        functions = [self._declaration(f) for f in self.problem.fluents.values()
                     if isinstance(f.value_type, IntType)]
        if functions:
            domain.append("  (:functions")
            for f in self.problem.fluents.values():
                if isinstance(f.value_type, IntType):
                    domain.append(f"    {self._declaration(f)} "
                                  f"; bounds [{f.value_type.lower}, {f.value_type.upper}]")
            domain.append("  )")
        domain.extend(actions)
        domain.append(")")

        prob = [f"(define (problem {self.domain_name})",
                f"  (:domain {self.domain_name})",
                "  (:init"]
        prob.extend(f"    {line}" for line in init)
        prob.append("  )")
        prob.append(f"  (:goal {goal})")
        prob.append(")")
        return "\n".join(domain) + "\n", "\n".join(prob) + "\n"

    # -- declarations ------------------------------------------------------------

    def _declaration(self, fluent: Fluent) -> str:
        params = [f"?{p} - {self.types[t.name]}" for p, t in fluent.signature]
        if isinstance(fluent.value_type, UserType):
            params.append(f"?value - {self.types[fluent.value_type.name]}")
        inner = " ".join([self.fluent_names[fluent.name]] + params)
        return f"({inner})"

    # -- init ---------------------------------------------------------------------

    def _init_lines(self) -> list[str]:
        lines = []
        state = self.problem.initial_state()
        for (fname, args), value in state.items():
            fluent = self.problem.fluents[fname]
            rendered_args = " ".join(self.object_names[o.name] for o in args)
            head = self.fluent_names[fname] + (f" {rendered_args}" if rendered_args else "")
            if isinstance(fluent.value_type, BoolType):
                if value:
                    lines.append(f"({head})")
            elif isinstance(fluent.value_type, IntType):
                lines.append(f"(= ({head}) {value})")
            else:
                lines.append(f"({head} {self.object_names[value.name]})")
        return lines

    # -- actions --------------------------------------------------------------------

    def _action(self, action) -> str:
        env = {p.value: f"?{p.value}" for p in action.parameters}
        params = " ".join(f"?{p.value} - {self.types[p.type.name]}"
                          for p in action.parameters)
        pre = self._gd_list([self._gd(p, env) for p in action.preconditions])
        effects = []
        for eff in action.effects:
            effects.extend(self._effect(eff, env))
        body = [f"  (:action {self.action_names[action.name]}",
                f"    :parameters ({params})",
                f"    :precondition {pre}",
                f"    :effect {self._and(effects)}",
                "  )"]
        return "\n".join(body)

    def _gd_list(self, parts: list[str]) -> str:
        return self._and(parts)

    @staticmethod
    def _and(parts: list[str]) -> str:
        if len(parts) == 1:
            return parts[0]
        return "(and " + " ".join(parts) + ")" if parts else "(and)"

    # -- goal/precondition grammar ------------------------------------------------------

    def _gd(self, e: Expr, env: dict[str, str]) -> str:
        op = e.op
        if op == "bool":
            if e.value:
                return "(and)"
            self.requirements.add(":disjunctive-preconditions")
            return "(or)"
        if op == "fluent":
            self._require_scalar_access(e)
            return self._atom(e, env)
        if op == "not":
            inner = e.args[0]
            self.requirements.add(":negative-preconditions")
            if inner.op not in ("fluent", "eq"):
                self.requirements.add(":disjunctive-preconditions")
            return f"(not {self._gd(inner, env)})"
        if op == "and":
            return self._and([self._gd(a, env) for a in e.args])
        if op == "or":
            self.requirements.add(":disjunctive-preconditions")
            return "(or " + " ".join(self._gd(a, env) for a in e.args) + ")"
        if op == "implies":
            self.requirements.add(":disjunctive-preconditions")
            return f"(imply {self._gd(e.args[0], env)} {self._gd(e.args[1], env)})"
        if op == "iff":
            a, b = e.args
            self.requirements.add(":disjunctive-preconditions")
            self.requirements.add(":negative-preconditions")
            return (f"(and (imply {self._gd(a, env)} {self._gd(b, env)}) "
                    f"(imply {self._gd(b, env)} {self._gd(a, env)}))")
        if op == "eq":
            return self._equality(e, env)
        if op in ("le", "lt", "ge", "gt"):
            self.requirements.add(":numeric-fluents")
            sym = {"le": "<=", "lt": "<", "ge": ">=", "gt": ">"}[op]
            return f"({sym} {self._fexp(e.args[0], env)} {self._fexp(e.args[1], env)})"
        raise PddlError(f"unsupported construct in condition: {e} (op {op!r})")

    def _equality(self, e: Expr, env: dict[str, str]) -> str:
        a, b = e.args
        if a.type.is_int():
            self.requirements.add(":numeric-fluents")
            return f"(= {self._fexp(a, env)} {self._fexp(b, env)})"
        if a.type.is_bool():
            return self._gd(Expr._make("iff", (a, b), (), None, e.type), env)
        # user-typed operands
        a_access = a.op == "fluent"
        b_access = b.op == "fluent"
        if a_access and not b_access:
            return self._atom(a, env, value=self._term(b, env))
        if b_access and not a_access:
            return self._atom(b, env, value=self._term(a, env))
        if not a_access and not b_access:
            self.requirements.add(":equality")
            return f"(= {self._term(a, env)} {self._term(b, env)})"
        # both sides are fluent reads: enumerate the shared user type
        self.requirements.add(":disjunctive-preconditions")
        assert isinstance(a.type, UserType)
        cases = []
        for obj in self.problem.objects(a.type.name):
            name = self.object_names[obj.name]
            cases.append(f"(and {self._atom(a, env, value=name)} "
                         f"{self._atom(b, env, value=name)})")
        return "(or " + " ".join(cases) + ")"

    def _atom(self, access: Expr, env: dict[str, str], value: str | None = None) -> str:
        self._require_scalar_access(access)
        fluent = access.fluent
        parts = [self.fluent_names[fluent.name]]
        parts.extend(self._term(a, env) for a in access.args)
        if isinstance(fluent.value_type, UserType):
            if value is None:
                raise PddlError(f"user-valued fluent {access} used outside a comparison")
            parts.append(value)
        return "(" + " ".join(parts) + ")"

    def _term(self, e: Expr, env: dict[str, str]) -> str:
        if e.op == "obj":
            return self.object_names[e.value.name]
        if e.op == "param":
            return env[e.value]
        raise PddlError(f"unsupported term {e}: only parameters and objects may "
                        "appear as predicate arguments")

    def _fexp(self, e: Expr, env: dict[str, str]) -> str:
        if e.op == "int":
            return str(e.value)
        if e.op == "fluent":
            self._require_scalar_access(e)
            return self._atom(e, env)
        if e.op == "plus":
            out = self._fexp(e.args[0], env)
            for a in e.args[1:]:
                out = f"(+ {out} {self._fexp(a, env)})"
            return out
        if e.op == "minus":
            return f"(- {self._fexp(e.args[0], env)} {self._fexp(e.args[1], env)})"
        if e.op == "times":
            return f"(* {self._fexp(e.args[0], env)} {self._fexp(e.args[1], env)})"
        raise PddlError(f"unsupported numeric expression: {e} (op {e.op!r})")

    def _require_scalar_access(self, e: Expr) -> None:
        if e.indices:
            raise PddlError(f"array access {e} cannot be exported; compile the problem first")
        for a in e.args:
            if a.op not in ("obj", "param"):
                raise PddlError(f"unsupported fluent argument in {e}")

    # -- effects ------------------------------------------------------------------------

    def _effect(self, eff: Effect, env: dict[str, str]) -> list[str]:
        cond = None
        if eff.condition is not None:
            cond = self._gd(eff.condition, env)
        target = eff.target
        fluent = target.fluent
        vt = fluent.value_type
        if isinstance(vt, BoolType):
            return self._bool_effect(target, eff.value, cond, env)
        if isinstance(vt, IntType):
            assign = f"(assign {self._atom(target, env)} {self._fexp(eff.value, env)})"
            self.requirements.add(":numeric-fluents")
            return [self._when(cond, assign)]
        return self._user_effect(target, eff.value, cond, env)

    def _bool_effect(self, target: Expr, value: Expr, cond: str | None, env) -> list[str]:
        atom = self._atom(target, env)
        if value.op == "bool":
            item = atom if value.value else f"(not {atom})"
            return [self._when(cond, item)]
        guard = self._gd(value, env)
        neg_guard = self._gd(Expr._make("not", (value,), (), None, value.type), env)
        return [self._when(_conjoin(cond, guard), atom),
                self._when(_conjoin(cond, neg_guard), f"(not {atom})")]

    def _user_effect(self, target: Expr, value: Expr, cond: str | None, env) -> list[str]:
        assert isinstance(target.fluent.value_type, UserType)
        out = []
        type_name = target.fluent.value_type.name
        for obj in self.problem.objects(type_name):
            name = self.object_names[obj.name]
            old = self._atom(target, env, value=name)
            out.append(self._when(_conjoin(cond, old), f"(not {old})"))
        if value.op in ("obj", "param"):
            out.append(self._when(cond, self._atom(target, env, value=self._term(value, env))))
        elif value.op == "fluent":
            for obj in self.problem.objects(type_name):
                name = self.object_names[obj.name]
                source = self._atom(value, env, value=name)
                out.append(self._when(_conjoin(cond, source),
                                      self._atom(target, env, value=name)))
        else:
            raise PddlError(f"unsupported user-typed effect value {value}")
        return out

    def _when(self, cond: str | None, item: str) -> str:
        if cond is None:
            return item
        self.requirements.add(":conditional-effects")
        return f"(when {cond} {item})"


def _conjoin(a: str | None, b: str) -> str:
    if a is None:
        return b
    return f"(and {a} {b})"
