"""Expression evaluation, parameter substitution, and the constant-folding simplifier.

All three are pure functions over interned expressions; ``simplify`` memoizes
globally because structurally equal inputs are the same object.
"""
from __future__ import annotations

from typing import Mapping, Optional

from .errors import ModelError, OutOfRangeError
from .model import (
    FALSE,
    TRUE,
    ArrayType,
    Expr,
    Int,
    IntType,
    State,
    Value,
    as_expr,
)

__all__ = ["Binding", "evaluate", "substitute", "simplify"]

# Parameter name -> constant value (int or Object). Values must fit the
# parameter's declared type; the callers constructing bindings enforce that.
Binding = Mapping[str, Value]


def evaluate(expr: Expr, state: State, binding: Optional[Binding] = None) -> Value:
    """Evaluate a closed (under ``binding``) expression against a state.

    Logical operators are total: every child is evaluated, so an out-of-range
    array access raises ``OutOfRangeError`` regardless of its position. Policy
    for such accesses (restrictive vs permissive) lives in the callers.
    """
    binding = binding or {}
    return _eval(expr, state, binding)


def _eval(e: Expr, state: State, b: Binding) -> Value:
    op = e.op
    if op in ("bool", "int"):
        return e.value
    if op == "obj":
        return e.value
    if op == "param":
        try:
            return b[e.value]
        except KeyError:
            raise ModelError(f"unbound parameter {e.value!r} during evaluation") from None
    if op == "fluent":
        args = tuple(_eval(a, state, b) for a in e.args)
        value = state.get(e.value.name, args)
        vtype = e.value.value_type
        for idx_expr in e.indices:
            idx = _eval(idx_expr, state, b)
            assert isinstance(vtype, ArrayType)
            if not 0 <= idx < vtype.size:
                raise OutOfRangeError(
                    f"array access out of range: {e} (index {idx} not in [0, {vtype.size - 1}])",
                    access=str(e))
            value = value[idx]
            vtype = vtype.element
        return value
    if op == "array":
        return tuple(_eval(a, state, b) for a in e.args)
    if op == "not":
        return not _eval(e.args[0], state, b)
    if op == "and":
        vals = [_eval(a, state, b) for a in e.args]
        return all(vals)
    if op == "or":
        vals = [_eval(a, state, b) for a in e.args]
        return any(vals)
    if op == "implies":
        l, r = (_eval(a, state, b) for a in e.args)
        return (not l) or r
    if op == "iff":
        l, r = (_eval(a, state, b) for a in e.args)
        return l == r
    if op == "eq":
        l, r = (_eval(a, state, b) for a in e.args)
        return l == r
    if op == "le":
        l, r = (_eval(a, state, b) for a in e.args)
        return l <= r
    if op == "lt":
        l, r = (_eval(a, state, b) for a in e.args)
        return l < r
    if op == "ge":
        l, r = (_eval(a, state, b) for a in e.args)
        return l >= r
    if op == "gt":
        l, r = (_eval(a, state, b) for a in e.args)
        return l > r
    if op == "plus":
        return sum(_eval(a, state, b) for a in e.args)
    if op == "minus":
        return _eval(e.args[0], state, b) - _eval(e.args[1], state, b)
    if op == "times":
        return _eval(e.args[0], state, b) * _eval(e.args[1], state, b)
    if op == "count":
        return sum(1 for a in e.args if _eval(a, state, b))
    raise AssertionError(op)


def substitute(expr: Expr, binding: Binding) -> Expr:
    """Replace every covered parameter reference by its constant value.

    The binding may cover any subset of the free parameters; the result is not
    simplified.
    """
    if not binding:
        return expr
    return _subst(expr, binding)


def _subst(e: Expr, b: Binding) -> Expr:
    if e.op == "param":
        if e.value not in b:
            return e
        raw = b[e.value]
        const = as_expr(raw)
        if e.type.is_int():
            if const.op != "int":
                raise ModelError(
                    f"parameter {e.value!r} is {e.type} but bound to {raw!r}")
            if not e.type.lower <= const.value <= e.type.upper:
                raise ModelError(
                    f"parameter {e.value!r} bound to {const.value}, outside {e.type}")
        elif e.type.is_user():
            if const.op != "obj" or const.type != e.type:
                raise ModelError(
                    f"parameter {e.value!r} is {e.type} but bound to {raw!r}")
        return const
    if not e.args and not e.indices:
        return e
    args = tuple(_subst(a, b) for a in e.args)
    indices = tuple(_subst(i, b) for i in e.indices)
    if args == e.args and indices == e.indices:
        return e
    return Expr._make(e.op, args, indices, e.value, _retype(e, args, indices))


def _retype(e: Expr, args: tuple[Expr, ...], indices: tuple[Expr, ...]):
    """Recompute the node type after children changed (int bounds may narrow)."""
    op = e.op
    if op == "plus":
        return IntType(sum(a.type.lower for a in args), sum(a.type.upper for a in args))
    if op == "minus":
        return IntType(args[0].type.lower - args[1].type.upper,
                       args[0].type.upper - args[1].type.lower)
    if op == "times":
        corners = [args[0].type.lower * args[1].type.lower,
                   args[0].type.lower * args[1].type.upper,
                   args[0].type.upper * args[1].type.lower,
                   args[0].type.upper * args[1].type.upper]
        return IntType(min(corners), max(corners))
    return e.type


_simplified: dict[Expr, Expr] = {}


def simplify(expr: Expr) -> Expr:
    """Constant-fold and normalize an expression, preserving evaluation semantics.

    Idempotent; never increases node count. And/Or are flattened and their
    children sorted by a deterministic structural key so output is stable
    across runs.
    """
    cached = _simplified.get(expr)
    if cached is None:
        cached = _simplify(expr)
        _simplified[expr] = cached
        _simplified[cached] = cached
    return cached


def _mk(op: str, args: tuple[Expr, ...], template: Expr) -> Expr:
    if args == template.args:
        return template
    return Expr._make(op, args, (), template.value, _retype(template, args, ()))


def _simplify(e: Expr) -> Expr:
    op = e.op
    if op in ("bool", "int", "obj", "param"):
        return e
    if op == "fluent":
        args = tuple(simplify(a) for a in e.args)
        indices = tuple(simplify(i) for i in e.indices)
        if args == e.args and indices == e.indices:
            return e
        return Expr._make(op, args, indices, e.value, e.type)
    if op == "array":
        return _mk(op, tuple(simplify(a) for a in e.args), e)

    args = tuple(simplify(a) for a in e.args)

    if op == "not":
        (x,) = args
        if x is TRUE:
            return FALSE
        if x is FALSE:
            return TRUE
        if x.op == "not":
            return x.args[0]
        return _mk(op, args, e)

    if op in ("and", "or"):
        absorber = FALSE if op == "and" else TRUE
        neutral = TRUE if op == "and" else FALSE
        flat: list[Expr] = []
        for a in args:
            if a.op == op:
                flat.extend(a.args)
            elif a is absorber:
                return absorber
            elif a is not neutral:
                flat.append(a)
        unique = sorted(set(flat), key=lambda x: x.sort_key)
        if not unique:
            return neutral
        if len(unique) == 1:
            return unique[0]
        return Expr._make(op, tuple(unique), (), None, e.type)

    if op == "implies":
        a, b = args
        if a is FALSE or b is TRUE:
            return TRUE
        if a is TRUE:
            return b
        if b is FALSE:
            return simplify(Expr._make("not", (a,), (), None, e.type))
        return _mk(op, args, e)

    if op == "iff":
        a, b = args
        if a.is_const() and b.is_const():
            return TRUE if a.const_value() == b.const_value() else FALSE
        if a is TRUE:
            return b
        if b is TRUE:
            return a
        if a is FALSE:
            return simplify(Expr._make("not", (b,), (), None, e.type))
        if b is FALSE:
            return simplify(Expr._make("not", (a,), (), None, e.type))
        return _mk(op, args, e)

    if op == "eq":
        a, b = args
        if a.is_const() and b.is_const():
            return TRUE if a.const_value() == b.const_value() else FALSE
        return _mk(op, args, e)

    if op in ("le", "lt", "ge", "gt"):
        a, b = args
        if a.op == "int" and b.op == "int":
            result = {"le": a.value <= b.value, "lt": a.value < b.value,
                      "ge": a.value >= b.value, "gt": a.value > b.value}[op]
            return TRUE if result else FALSE
        return _mk(op, args, e)

    if op == "plus":
        flat: list[Expr] = []
        const = 0
        for a in args:
            if a.op == "plus":
                for c in a.args:
                    if c.op == "int":
                        const += c.value
                    else:
                        flat.append(c)
            elif a.op == "int":
                const += a.value
            else:
                flat.append(a)
        if not flat:
            return Int(const)
        if const != 0:
            flat.append(Int(const))
        if len(flat) == 1:
            return flat[0]
        return _mk(op, tuple(flat), e)

    if op == "minus":
        a, b = args
        if a.op == "int" and b.op == "int":
            return Int(a.value - b.value)
        if b.op == "int" and b.value == 0:
            return a
        return _mk(op, args, e)

    if op == "times":
        a, b = args
        if a.op == "int" and b.op == "int":
            return Int(a.value * b.value)
        if a.op == "int" and a.value == 1:
            return b
        if b.op == "int" and b.value == 1:
            return a
        if (a.op == "int" and a.value == 0) or (b.op == "int" and b.value == 0):
            return Int(0)
        return _mk(op, args, e)

    if op == "count":
        kept = [a for a in args if a is not FALSE]
        if all(a is TRUE for a in kept):
            return Int(len(kept))
        if len(kept) == len(args):
            return _mk(op, args, e)
        return Expr._make(op, tuple(kept), (), None, IntType(0, len(kept)))

    raise AssertionError(op)
