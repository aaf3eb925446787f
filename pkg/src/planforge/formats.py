"""On-disk formats: the JSON problem schema, plan text, and plan JSON.

Problem files use the top-level keys ``types``, ``objects``, ``fluents``,
``actions``, ``init``, ``defaults``, ``goals``. Expressions are nested
``{"op": ..., "args": [...]}`` trees; bare booleans and integers are
constants, bare strings are object names, and bare JSON arrays are array
literals. Saving is canonical: loading a saved file and saving it again is
byte-identical.
"""
from __future__ import annotations

import json
import re
from typing import Any

from .errors import FormatError
from .model import (
    BOOL,
    Action,
    ArrayType,
    Effect,
    Expr,
    Fluent,
    IntType,
    Object,
    Param,
    Plan,
    PlanStep,
    Problem,
    TypeExpr,
    UserType,
    Value,
    as_expr,
)

__all__ = [
    "problem_to_dict", "problem_from_dict", "save_problem", "load_problem",
    "plan_to_dict", "plan_from_dict", "format_plan_text", "parse_plan_text",
    "dumps",
]

_OPS = {"and", "or", "not", "implies", "iff", "eq", "le", "lt", "ge", "gt",
        "plus", "minus", "times", "count"}


def dumps(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


def _type_to_dict(t: TypeExpr) -> dict:
    if t.is_bool():
        return {"kind": "bool"}
    if isinstance(t, IntType):
        return {"kind": "int", "lower": t.lower, "upper": t.upper}
    if isinstance(t, UserType):
        return {"kind": "user", "name": t.name}
    assert isinstance(t, ArrayType)
    return {"kind": "array", "size": t.size, "element": _type_to_dict(t.element)}


def _type_from_dict(d: Any) -> TypeExpr:
    if not isinstance(d, dict) or "kind" not in d:
        raise FormatError(f"bad type descriptor: {d!r}")
    kind = d["kind"]
    if kind == "bool":
        return BOOL
    if kind == "int":
        return IntType(int(d["lower"]), int(d["upper"]))
    if kind == "user":
        return UserType(d["name"])
    if kind == "array":
        return ArrayType(int(d["size"]), _type_from_dict(d["element"]))
    raise FormatError(f"unknown type kind {kind!r}")


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------


class _Vocabulary:
    def __init__(self, problem: Problem, params: dict[str, Expr]):
        self.problem = problem
        self.params = params


def _expr_to_json(e: Expr) -> Any:
    op = e.op
    if op in ("bool", "int"):
        return e.value
    if op == "obj":
        return e.value.name
    if op == "array":
        return [_expr_to_json(a) for a in e.args]
    if op == "param":
        return {"op": "param", "name": e.value}
    if op == "fluent":
        out: dict[str, Any] = {"op": "fluent", "name": e.value.name}
        if e.args:
            out["args"] = [_expr_to_json(a) for a in e.args]
        if e.indices:
            out["indices"] = [_expr_to_json(i) for i in e.indices]
        return out
    return {"op": op, "args": [_expr_to_json(a) for a in e.args]}


def _expr_from_json(d: Any, vocab: _Vocabulary) -> Expr:
    from . import model

    if isinstance(d, bool) or isinstance(d, int):
        return as_expr(d)
    if isinstance(d, str):
        if not vocab.problem.has_object(d):
            raise FormatError(f"unknown object {d!r} in expression")
        return as_expr(vocab.problem.object(d))
    if isinstance(d, list):
        return as_expr([_expr_from_json(x, vocab) for x in d])
    if not isinstance(d, dict) or "op" not in d:
        raise FormatError(f"bad expression node: {d!r}")
    op = d["op"]
    if op == "param":
        name = d.get("name")
        if name not in vocab.params:
            raise FormatError(f"parameter {name!r} not declared in this scope")
        return vocab.params[name]
    if op == "obj":
        return as_expr(vocab.problem.object(d["name"]))
    if op == "fluent":
        fluent = vocab.problem.fluent(d.get("name", ""))
        args = [_expr_from_json(a, vocab) for a in d.get("args", [])]
        access = fluent(*args)
        for idx in d.get("indices", []):
            access = access[_expr_from_json(idx, vocab)]
        return access
    if op not in _OPS:
        raise FormatError(f"unknown expression op {op!r}")
    args = [_expr_from_json(a, vocab) for a in d.get("args", [])]
    builder = {
        "and": model.And, "or": model.Or, "not": lambda *a: model.Not(*a),
        "implies": model.Implies, "iff": model.Iff, "eq": model.Equals,
        "le": model.LE, "lt": model.LT, "ge": model.GE, "gt": model.GT,
        "plus": model.Plus, "minus": model.Minus, "times": model.Times,
        "count": model.Count,
    }[op]
    try:
        return builder(*args)
    except TypeError as exc:
        raise FormatError(f"bad arity for op {op!r}: {exc}") from None


# ---------------------------------------------------------------------------
# Problems
# ---------------------------------------------------------------------------


def problem_to_dict(problem: Problem) -> dict:
    fluents = []
    defaults = {}
    for f in problem.fluents.values():
        entry: dict[str, Any] = {"name": f.name, "type": _type_to_dict(f.value_type)}
        if f.signature:
            entry["signature"] = [{"name": n, "type": t.name} for n, t in f.signature]
        fluents.append(entry)
        if f.default is not None:
            defaults[f.name] = _expr_to_json(f.default)
    actions = []
    for a in problem.actions.values():
        entry = {
            "name": a.name,
            "parameters": [{"name": p.value, "type": _type_to_dict(p.type)}
                           for p in a.parameters],
            "preconditions": [_expr_to_json(p) for p in a.preconditions],
            "effects": [_effect_to_json(e) for e in a.effects],
        }
        actions.append(entry)
    init = []
    for target, value in problem.init.items():
        entry = {"fluent": target.fluent.name}
        if target.args:
            entry["args"] = [a.value.name for a in target.args]
        if target.indices:
            entry["indices"] = [i.const_value() for i in target.indices]
        entry["value"] = _expr_to_json(value)
        init.append(entry)
    return {
        "name": problem.name,
        "types": list(problem.user_types),
        "objects": {t: [o.name for o in objs] for t, objs in problem.user_types.items()},
        "fluents": fluents,
        "actions": actions,
        "init": init,
        "defaults": defaults,
        "goals": [_expr_to_json(g) for g in problem.goals],
    }


def _effect_to_json(e: Effect) -> dict:
    out = {"target": _expr_to_json(e.target), "value": _expr_to_json(e.value)}
    if e.condition is not None:
        out["condition"] = _expr_to_json(e.condition)
    return out


def problem_from_dict(data: Any) -> Problem:
    from .errors import ModelError

    if not isinstance(data, dict):
        raise FormatError("problem file must be a JSON object")
    try:
        return _problem_from_dict(data)
    except ModelError as exc:
        raise FormatError(f"invalid problem: {exc}") from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed problem file: {exc}") from exc


def _problem_from_dict(data: dict) -> Problem:
    problem = Problem(data.get("name", "problem"))
    for type_name in data.get("types", []):
        problem.add_user_type(type_name)
    objects = data.get("objects", {})
    for type_name in data.get("types", []):
        for obj_name in objects.get(type_name, []):
            problem.add_object(obj_name, type_name)
    defaults = data.get("defaults", {})
    for entry in data.get("fluents", []):
        signature = tuple((p["name"], UserType(p["type"]))
                          for p in entry.get("signature", []))
        default = None
        if entry["name"] in defaults:
            default = _const_from_json(defaults[entry["name"]], problem)
        problem.add_fluent(Fluent(entry["name"], _type_from_dict(entry["type"]),
                                  signature, default))
    for entry in data.get("actions", []):
        params = {}
        for p in entry.get("parameters", []):
            params[p["name"]] = Param(p["name"], _type_from_dict(p["type"]))
        vocab = _Vocabulary(problem, params)
        preconditions = tuple(_expr_from_json(p, vocab)
                              for p in entry.get("preconditions", []))
        effects = []
        for eff in entry.get("effects", []):
            condition = None
            if "condition" in eff:
                condition = _expr_from_json(eff["condition"], vocab)
            effects.append(Effect(_expr_from_json(eff["target"], vocab),
                                  _expr_from_json(eff["value"], vocab),
                                  condition))
        problem.add_action(Action(entry["name"], tuple(params.values()),
                                  preconditions, tuple(effects)))
    vocab = _Vocabulary(problem, {})
    for entry in data.get("init", []):
        fluent = problem.fluent(entry["fluent"])
        args = [problem.object(n) for n in entry.get("args", [])]
        access = fluent(*args)
        for idx in entry.get("indices", []):
            access = access[int(idx)]
        problem.set_initial_value(access, _const_from_json(entry["value"], problem))
    for goal in data.get("goals", []):
        problem.add_goal(_expr_from_json(goal, vocab))
    problem.validate()
    return problem


def _const_from_json(d: Any, problem: Problem) -> Expr:
    return _expr_from_json(d, _Vocabulary(problem, {}))


def save_problem(problem: Problem) -> str:
    return dumps(problem_to_dict(problem))


def load_problem(text: str) -> Problem:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from None
    return problem_from_dict(data)


# ---------------------------------------------------------------------------
# Plans
# ---------------------------------------------------------------------------


def _value_to_json(v: Value) -> Any:
    if isinstance(v, Object):
        return v.name
    if isinstance(v, tuple):
        return [_value_to_json(x) for x in v]
    return v


def plan_to_dict(plan: Plan) -> dict:
    return {"steps": [{"action": s.action,
                       "args": {k: _value_to_json(v) for k, v in s.args}}
                      for s in plan]}


def plan_from_dict(data: Any) -> Plan:
    if not isinstance(data, dict) or "steps" not in data:
        raise FormatError("plan file must be a JSON object with a 'steps' list")
    steps = []
    for entry in data["steps"]:
        args = tuple((k, v) for k, v in entry.get("args", {}).items())
        steps.append(PlanStep(entry["action"], args))
    return Plan(tuple(steps))


_STEP = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_-]*)\s*\(([^)]*)\)\s*$")
_BARE_STEP = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_-]*)\s*$")


def format_plan_text(plan: Plan) -> str:
    """One step per line: ``name(arg=value, ...)``."""
    return "".join(str(step) + "\n" for step in plan)


def parse_plan_text(text: str) -> Plan:
    steps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _STEP.match(line)
        if m:
            name, inner = m.group(1), m.group(2).strip()
            args = []
            if inner:
                for part in inner.split(","):
                    if "=" not in part:
                        raise FormatError(
                            f"line {lineno}: plan arguments use name=value, got {part.strip()!r}")
                    key, _, value = part.partition("=")
                    args.append((key.strip(), _parse_value(value.strip(), lineno)))
            steps.append(PlanStep(name, tuple(args)))
            continue
        m = _BARE_STEP.match(line)
        if m:
            steps.append(PlanStep(m.group(1)))
            continue
        raise FormatError(f"line {lineno}: cannot parse plan step {line!r}")
    return Plan(tuple(steps))


def _parse_value(token: str, lineno: int):
    if token == "true":
        return True
    if token == "false":
        return False
    if re.fullmatch(r"-?[0-9]+", token):
        return int(token)
    if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_-]*", token):
        return token  # object name; resolved against the problem by the validator
    raise FormatError(f"line {lineno}: cannot parse argument value {token!r}")
