"""Typed planning model: type system, expression AST, fluents, actions, states, problems.

Expressions are immutable and hash-consed: building the same structure twice
yields the same object, so structural equality is plain ``==`` (identity) and
expressions can key dictionaries directly.
"""
from __future__ import annotations

import itertools
import re
import threading
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Union

from .errors import ModelError

__all__ = [
    "BOOL",
    "ArrayType",
    "BoolType",
    "IntType",
    "UserType",
    "TypeExpr",
    "Object",
    "Expr",
    "TRUE",
    "FALSE",
    "Int",
    "Param",
    "And",
    "Or",
    "Not",
    "Implies",
    "Iff",
    "Equals",
    "LE",
    "LT",
    "GE",
    "GT",
    "Plus",
    "Minus",
    "Times",
    "Count",
    "as_expr",
    "Fluent",
    "Effect",
    "Action",
    "Problem",
    "State",
    "Plan",
    "PlanStep",
    "ground_fluents",
]

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_-]*$")


def _check_name(name: str, what: str) -> str:
    if not isinstance(name, str) or not _IDENT.match(name):
        raise ModelError(f"invalid {what} name: {name!r}")
    return name


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


class TypeExpr:
    """Base class of the type lattice: bool, bounded int, user type, fixed-size array."""

    __slots__ = ()

    def is_bool(self) -> bool:
        return isinstance(self, BoolType)

    def is_int(self) -> bool:
        return isinstance(self, IntType)

    def is_user(self) -> bool:
        return isinstance(self, UserType)

    def is_array(self) -> bool:
        return isinstance(self, ArrayType)


@dataclass(frozen=True)
class BoolType(TypeExpr):
    def __str__(self) -> str:
        return "bool"


@dataclass(frozen=True)
class IntType(TypeExpr):
    """Bounded integer with inclusive literal bounds."""

    lower: int
    upper: int

    def __post_init__(self):
        if not isinstance(self.lower, int) or not isinstance(self.upper, int) \
                or isinstance(self.lower, bool) or isinstance(self.upper, bool):
            raise ModelError("integer bounds must be literal integers")
        if self.lower > self.upper:
            raise ModelError(f"empty integer domain [{self.lower}, {self.upper}]")

    def __str__(self) -> str:
        return f"integer[{self.lower}, {self.upper}]"


@dataclass(frozen=True)
class UserType(TypeExpr):
    name: str

    def __post_init__(self):
        _check_name(self.name, "type")

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class ArrayType(TypeExpr):
    size: int
    element: TypeExpr

    def __post_init__(self):
        if not isinstance(self.size, int) or isinstance(self.size, bool) or self.size < 2:
            raise ModelError("array size must exceed one")
        if not isinstance(self.element, TypeExpr):
            raise ModelError("array element must be a type")

    def __str__(self) -> str:
        return f"array[{self.size}, {self.element}]"

    def dims(self) -> tuple[int, ...]:
        """Sizes of every nesting level, outermost first."""
        t: TypeExpr = self
        out = []
        while isinstance(t, ArrayType):
            out.append(t.size)
            t = t.element
        return tuple(out)

    def base(self) -> TypeExpr:
        t: TypeExpr = self
        while isinstance(t, ArrayType):
            t = t.element
        return t


BOOL = BoolType()


def _same_kind(a: TypeExpr, b: TypeExpr) -> bool:
    """Whether values of the two types may be compared with Equals."""
    if a.is_bool() and b.is_bool():
        return True
    if a.is_int() and b.is_int():
        return True
    if a.is_user() and b.is_user():
        return a == b
    if isinstance(a, ArrayType) and isinstance(b, ArrayType):
        return a.size == b.size and _same_kind(a.element, b.element)
    return False


def assignable(value_type: TypeExpr, target_type: TypeExpr) -> bool:
    """Whether an expression of ``value_type`` may be assigned to ``target_type``.

    Integer bounds are not compared here; constant bound checks happen where
    the constant is known.
    """
    return _same_kind(value_type, target_type)


def _const_fits(value, target_type: TypeExpr) -> bool:
    """Constant value tree fits the declared type, bounds included."""
    if target_type.is_bool():
        return isinstance(value, bool)
    if isinstance(target_type, IntType):
        return isinstance(value, int) and not isinstance(value, bool) \
            and target_type.lower <= value <= target_type.upper
    if isinstance(target_type, UserType):
        return isinstance(value, Object) and value.type_name == target_type.name
    if isinstance(target_type, ArrayType):
        return isinstance(value, tuple) and len(value) == target_type.size \
            and all(_const_fits(v, target_type.element) for v in value)
    return False


# ---------------------------------------------------------------------------
# Objects
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Object:
    """A named constant of a user type."""

    name: str
    type_name: str

    def __post_init__(self):
        _check_name(self.name, "object")
        _check_name(self.type_name, "type")

    def __str__(self) -> str:
        return self.name


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------

# Constant values produced by evaluation: bool, int, Object, or nested tuples.
Value = Union[bool, int, Object, tuple]

_CONST_OPS = frozenset({"bool", "int", "obj"})
_NARY_BOOL = frozenset({"and", "or"})
_BINARY_BOOL = frozenset({"implies", "iff"})
_COMPARISONS = frozenset({"eq", "le", "lt", "ge", "gt"})
_ARITH = frozenset({"plus", "minus", "times"})


class Expr:
    """One immutable node of the expression AST.

    Fields: ``op`` (node kind), ``args`` (child expressions), ``indices``
    (array index expressions, fluent accesses only), ``value`` (payload:
    constant, parameter name, or Fluent), ``type`` (resolved TypeExpr).
    """

    __slots__ = ("op", "args", "indices", "value", "type", "_key")

    _interned: dict = {}
    _lock = threading.Lock()

    def __init__(self):
        raise TypeError("use the expression factory functions")

    @classmethod
    def _make(cls, op: str, args: tuple = (), indices: tuple = (),
              value=None, type_: TypeExpr = BOOL) -> "Expr":
        key = (op, args, indices, value, type_)
        node = cls._interned.get(key)
        if node is None:
            with cls._lock:
                node = cls._interned.get(key)
                if node is None:
                    node = object.__new__(cls)
                    node.op = op
                    node.args = args
                    node.indices = indices
                    node.value = value
                    node.type = type_
                    node._key = None
                    cls._interned[key] = node
        return node

    # -- structure ---------------------------------------------------------

    def children(self) -> tuple["Expr", ...]:
        return self.args + self.indices

    def walk(self) -> Iterator["Expr"]:
        """Pre-order traversal including this node."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children()))

    def free_params(self) -> frozenset["Expr"]:
        return frozenset(n for n in self.walk() if n.op == "param")

    def fluents_used(self) -> frozenset[str]:
        return frozenset(n.value.name for n in self.walk() if n.op == "fluent")

    def is_const(self) -> bool:
        if self.op in _CONST_OPS:
            return True
        if self.op == "array":
            return all(a.is_const() for a in self.args)
        return False

    def const_value(self) -> Value:
        if self.op in ("bool", "int", "obj"):
            return self.value
        if self.op == "array":
            return tuple(a.const_value() for a in self.args)
        raise ModelError(f"not a constant expression: {self}")

    @property
    def fluent(self) -> "Fluent":
        if self.op != "fluent":
            raise ModelError(f"not a fluent access: {self}")
        return self.value

    # -- sugar ---------------------------------------------------------------

    def __getitem__(self, index) -> "Expr":
        if self.op != "fluent":
            raise ModelError(f"cannot index non-fluent expression {self}")
        if not isinstance(self.type, ArrayType):
            raise ModelError(f"cannot index non-array access {self}")
        idx = as_expr(index)
        if not idx.type.is_int():
            raise ModelError(f"array index must be an integer, got {idx.type} in {self}[{idx}]")
        return Expr._make("fluent", self.args, self.indices + (idx,),
                          self.value, self.type.element)

    def __add__(self, other) -> "Expr":
        return Plus(self, other)

    def __radd__(self, other) -> "Expr":
        return Plus(other, self)

    def __sub__(self, other) -> "Expr":
        return Minus(self, other)

    def __rsub__(self, other) -> "Expr":
        return Minus(other, self)

    def __mul__(self, other) -> "Expr":
        return Times(self, other)

    def __rmul__(self, other) -> "Expr":
        return Times(other, self)

    # -- rendering -----------------------------------------------------------

    def __str__(self) -> str:
        op = self.op
        if op == "bool":
            return "true" if self.value else "false"
        if op == "int":
            return str(self.value)
        if op == "obj":
            return self.value.name
        if op == "param":
            return self.value
        if op == "fluent":
            s = self.value.name
            if self.args:
                s += "(" + ", ".join(str(a) for a in self.args) + ")"
            return s + "".join(f"[{i}]" for i in self.indices)
        if op == "array":
            return "[" + ", ".join(str(a) for a in self.args) + "]"
        if op == "not":
            return f"Not({self.args[0]})"
        if op in ("and", "or", "implies", "iff", "count", "eq", "le", "lt", "ge", "gt"):
            label = {"and": "And", "or": "Or", "implies": "Implies", "iff": "Iff",
                     "count": "Count", "eq": "Equals", "le": "LE", "lt": "LT",
                     "ge": "GE", "gt": "GT"}[op]
            return f"{label}(" + ", ".join(str(a) for a in self.args) + ")"
        if op == "plus":
            return "(" + " + ".join(str(a) for a in self.args) + ")"
        if op == "minus":
            return f"({self.args[0]} - {self.args[1]})"
        if op == "times":
            return f"({self.args[0]} * {self.args[1]})"
        raise AssertionError(op)

    def __repr__(self) -> str:
        return f"<Expr {self}>"

    @property
    def sort_key(self) -> str:
        """Deterministic canonical key, stable across processes."""
        if self._key is None:
            if self.op == "param":
                tag = f"{self.value}:{self.type}"
            elif self.op == "obj":
                tag = f"{self.value.name}:{self.value.type_name}"
            elif self.op == "fluent":
                tag = self.value.name
            elif self.op in ("bool", "int"):
                tag = str(self.value).lower()
            else:
                tag = ""
            parts = ",".join(c.sort_key for c in self.args)
            idx = ",".join(i.sort_key for i in self.indices)
            self._key = f"{self.op}<{tag}>({parts})[{idx}]"
        return self._key


def as_expr(x) -> Expr:
    """Coerce a Python value into an expression node."""
    if isinstance(x, Expr):
        return x
    if isinstance(x, bool):
        return TRUE if x else FALSE
    if isinstance(x, int):
        return Int(x)
    if isinstance(x, Object):
        return Expr._make("obj", value=x, type_=UserType(x.type_name))
    if isinstance(x, Fluent):
        return x()
    if isinstance(x, (list, tuple)):
        return _array_literal([as_expr(v) for v in x])
    raise ModelError(f"cannot interpret {x!r} as an expression")


TRUE = Expr._make("bool", value=True, type_=BOOL)
FALSE = Expr._make("bool", value=False, type_=BOOL)


def Int(v: int) -> Expr:
    if not isinstance(v, int) or isinstance(v, bool):
        raise ModelError(f"not an integer constant: {v!r}")
    return Expr._make("int", value=v, type_=IntType(v, v))


def Param(name: str, type_: TypeExpr) -> Expr:
    """Declare an action parameter reference: user-typed or bounded integer."""
    _check_name(name, "parameter")
    if not (isinstance(type_, UserType) or isinstance(type_, IntType)):
        raise ModelError(f"parameter {name!r} must be user-typed or a bounded integer, got {type_}")
    return Expr._make("param", value=name, type_=type_)


def _collect(args) -> tuple[Expr, ...]:
    """Accept varargs or a single list/tuple of expressions."""
    if len(args) == 1 and isinstance(args[0], (list, tuple)):
        args = tuple(args[0])
    return tuple(as_expr(a) for a in args)


def _require_bool(args: Iterable[Expr], ctx: str) -> None:
    for a in args:
        if not a.type.is_bool():
            raise ModelError(f"{ctx} requires Boolean arguments, got {a.type} in {a}")


def And(*args) -> Expr:
    xs = _collect(args)
    _require_bool(xs, "And")
    return Expr._make("and", xs, type_=BOOL)


def Or(*args) -> Expr:
    xs = _collect(args)
    _require_bool(xs, "Or")
    return Expr._make("or", xs, type_=BOOL)


def Not(x) -> Expr:
    e = as_expr(x)
    _require_bool((e,), "Not")
    return Expr._make("not", (e,), type_=BOOL)


def Implies(a, b) -> Expr:
    xs = (as_expr(a), as_expr(b))
    _require_bool(xs, "Implies")
    return Expr._make("implies", xs, type_=BOOL)


def Iff(a, b) -> Expr:
    l, r = as_expr(a), as_expr(b)
    ok = (l.type.is_bool() and r.type.is_bool()) or (
        isinstance(l.type, ArrayType) and isinstance(r.type, ArrayType)
        and _same_kind(l.type, r.type) and l.type.base().is_bool())
    if not ok:
        raise ModelError(f"Iff requires Boolean (or Boolean-array) operands, got {l.type} and {r.type}")
    return Expr._make("iff", (l, r), type_=BOOL)


def Equals(a, b) -> Expr:
    l, r = as_expr(a), as_expr(b)
    if not _same_kind(l.type, r.type):
        raise ModelError(f"cannot compare {l.type} with {r.type}: Equals({l}, {r})")
    return Expr._make("eq", (l, r), type_=BOOL)


def _comparison(op: str, a, b) -> Expr:
    l, r = as_expr(a), as_expr(b)
    if not (l.type.is_int() and r.type.is_int()):
        raise ModelError(f"{op} requires integer operands, got {l.type} and {r.type}")
    return Expr._make(op, (l, r), type_=BOOL)


def LE(a, b) -> Expr:
    return _comparison("le", a, b)


def LT(a, b) -> Expr:
    return _comparison("lt", a, b)


def GE(a, b) -> Expr:
    return _comparison("ge", a, b)


def GT(a, b) -> Expr:
    return _comparison("gt", a, b)


def Plus(*args) -> Expr:
    xs = _collect(args)
    if not xs:
        raise ModelError("Plus needs at least one argument")
    for a in xs:
        if not a.type.is_int():
            raise ModelError(f"Plus requires integer arguments, got {a.type} in {a}")
    lo = sum(a.type.lower for a in xs)
    hi = sum(a.type.upper for a in xs)
    return Expr._make("plus", xs, type_=IntType(lo, hi))


def Minus(a, b) -> Expr:
    l, r = as_expr(a), as_expr(b)
    if not (l.type.is_int() and r.type.is_int()):
        raise ModelError(f"Minus requires integer operands, got {l.type} and {r.type}")
    return Expr._make("minus", (l, r),
                      type_=IntType(l.type.lower - r.type.upper, l.type.upper - r.type.lower))


def Times(a, b) -> Expr:
    l, r = as_expr(a), as_expr(b)
    if not (l.type.is_int() and r.type.is_int()):
        raise ModelError(f"Times requires integer operands, got {l.type} and {r.type}")
    corners = [l.type.lower * r.type.lower, l.type.lower * r.type.upper,
               l.type.upper * r.type.lower, l.type.upper * r.type.upper]
    return Expr._make("times", (l, r), type_=IntType(min(corners), max(corners)))


def Count(*args) -> Expr:
    """How many of the Boolean arguments are true; accepts Count(a, b) or Count([a, b])."""
    xs = _collect(args)
    if not xs:
        raise ModelError("Count needs at least one Boolean argument")
    _require_bool(xs, "Count")
    return Expr._make("count", xs, type_=IntType(0, len(xs)))


def _array_literal(items: list[Expr]) -> Expr:
    if not items:
        raise ModelError("array literal cannot be empty")
    elem = items[0].type
    for it in items[1:]:
        elem = _join_types(elem, it.type)
    return Expr._make("array", tuple(items), type_=ArrayType(len(items), elem))


def _join_types(a: TypeExpr, b: TypeExpr) -> TypeExpr:
    if a.is_bool() and b.is_bool():
        return BOOL
    if isinstance(a, IntType) and isinstance(b, IntType):
        return IntType(min(a.lower, b.lower), max(a.upper, b.upper))
    if isinstance(a, UserType) and a == b:
        return a
    if isinstance(a, ArrayType) and isinstance(b, ArrayType) and a.size == b.size:
        return ArrayType(a.size, _join_types(a.element, b.element))
    raise ModelError(f"array literal elements have incompatible types {a} and {b}")


# ---------------------------------------------------------------------------
# Fluents, effects, actions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Fluent:
    """A state variable, optionally parameterized over user types and array-valued."""

    name: str
    value_type: TypeExpr
    signature: tuple[tuple[str, UserType], ...] = ()
    default: Optional[Expr] = None

    def __post_init__(self):
        _check_name(self.name, "fluent")
        sig = tuple((n, t) for n, t in self.signature)
        object.__setattr__(self, "signature", sig)
        seen = set()
        for pname, ptype in sig:
            _check_name(pname, "fluent parameter")
            if not isinstance(ptype, UserType):
                raise ModelError(f"fluent {self.name}: signature parameter {pname!r} must be user-typed")
            if pname in seen:
                raise ModelError(f"fluent {self.name}: duplicate parameter {pname!r}")
            seen.add(pname)
        if self.default is not None:
            d = as_expr(self.default)
            if not d.is_const():
                raise ModelError(f"fluent {self.name}: default must be a constant")
            if not _const_fits(d.const_value(), self.value_type):
                raise ModelError(
                    f"fluent {self.name}: default {d} does not fit type {self.value_type}")
            object.__setattr__(self, "default", d)

    def __call__(self, *args) -> Expr:
        if len(args) != len(self.signature):
            raise ModelError(
                f"fluent {self.name} expects {len(self.signature)} arguments, got {len(args)}")
        exprs = []
        for (pname, ptype), raw in zip(self.signature, args):
            a = as_expr(raw)
            if a.type != ptype:
                raise ModelError(
                    f"fluent {self.name}: argument {pname!r} must be {ptype}, got {a.type} in {a}")
            exprs.append(a)
        return Expr._make("fluent", tuple(exprs), (), self, self.value_type)

    def __getitem__(self, index) -> Expr:
        return self()[index]

    def __str__(self) -> str:
        sig = ", ".join(f"{t} {n}" for n, t in self.signature)
        return f"{self.value_type} {self.name}" + (f"({sig})" if sig else "")


@dataclass(frozen=True)
class Effect:
    """Assignment of ``value`` to the fluent cell named by ``target``, optionally guarded."""

    target: Expr
    value: Expr
    condition: Optional[Expr] = None

    def __post_init__(self):
        target = as_expr(self.target)
        value = as_expr(self.value)
        if target.op != "fluent":
            raise ModelError(f"effect target must be a fluent access, got {target}")
        if not assignable(value.type, target.type):
            raise ModelError(
                f"effect type mismatch: cannot assign {value.type} to {target.type} "
                f"in {target} := {value}")
        if value.is_const() and not _const_fits(value.const_value(), target.type):
            raise ModelError(f"effect value {value} out of bounds for {target.type} in {target}")
        cond = self.condition
        if cond is not None:
            cond = as_expr(cond)
            if not cond.type.is_bool():
                raise ModelError(f"effect condition must be Boolean, got {cond.type}")
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "condition", cond)

    def __str__(self) -> str:
        s = f"{self.target} := {self.value}"
        if self.condition is not None:
            s += f" if {self.condition}"
        return s


@dataclass(frozen=True)
class Action:
    """Named operator with typed parameters, preconditions, and effects."""

    name: str
    parameters: tuple[Expr, ...] = ()
    preconditions: tuple[Expr, ...] = ()
    effects: tuple[Effect, ...] = ()

    def __post_init__(self):
        _check_name(self.name, "action")
        params = tuple(self.parameters)
        object.__setattr__(self, "parameters", params)
        object.__setattr__(self, "preconditions", tuple(as_expr(p) for p in self.preconditions))
        object.__setattr__(self, "effects", tuple(self.effects))
        seen: set[str] = set()
        for p in params:
            if not isinstance(p, Expr) or p.op != "param":
                raise ModelError(f"action {self.name}: parameters must be Param(...) nodes")
            if p.value in seen:
                raise ModelError(f"action {self.name}: duplicate parameter {p.value!r}")
            seen.add(p.value)
        declared = set(params)
        for pre in self.preconditions:
            if not pre.type.is_bool():
                raise ModelError(f"action {self.name}: precondition {pre} is not Boolean")
            self._check_bound(pre, declared)
        for eff in self.effects:
            if not isinstance(eff, Effect):
                raise ModelError(f"action {self.name}: effects must be Effect instances")
            self._check_bound(eff.target, declared)
            self._check_bound(eff.value, declared)
            if eff.condition is not None:
                self._check_bound(eff.condition, declared)

    def _check_bound(self, expr: Expr, declared: set[Expr]) -> None:
        for p in expr.free_params():
            if p not in declared:
                raise ModelError(
                    f"action {self.name}: unbound parameter {p.value!r} of type {p.type} in {expr}")

    def int_parameters(self) -> tuple[Expr, ...]:
        return tuple(p for p in self.parameters if p.type.is_int())

    def user_parameters(self) -> tuple[Expr, ...]:
        return tuple(p for p in self.parameters if p.type.is_user())

    def __str__(self) -> str:
        sig = ", ".join(f"{p.type} {p.value}" for p in self.parameters)
        return f"action {self.name}({sig})"


# ---------------------------------------------------------------------------
# States and plans
# ---------------------------------------------------------------------------

StateKey = tuple[str, tuple[Object, ...]]


class State:
    """Total map from ground fluent instances to constant values."""

    __slots__ = ("_values", "_hash")

    def __init__(self, values: Mapping[StateKey, Value]):
        self._values = dict(values)
        self._hash = None

    def get(self, fluent_name: str, args: tuple[Object, ...] = ()) -> Value:
        try:
            return self._values[(fluent_name, args)]
        except KeyError:
            raise ModelError(f"no value for ground fluent {fluent_name}{args}") from None

    def items(self):
        return self._values.items()

    def keys(self):
        return self._values.keys()

    def updated(self, updates: Mapping[StateKey, Value]) -> "State":
        merged = dict(self._values)
        merged.update(updates)
        return State(merged)

    def key(self) -> tuple:
        return tuple(sorted(
            ((name, tuple(o.name for o in args), _value_key(v))
             for (name, args), v in self._values.items())))

    def __eq__(self, other) -> bool:
        return isinstance(other, State) and self._values == other._values

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self) -> str:
        parts = ", ".join(f"{n}{'(' + ','.join(o.name for o in a) + ')' if a else ''}="
                          f"{_render_value(v)}" for (n, a), v in sorted(
                              self._values.items(), key=lambda kv: (kv[0][0], [o.name for o in kv[0][1]])))
        return f"State({parts})"


def _value_key(v: Value):
    if isinstance(v, Object):
        return ("o", v.name)
    if isinstance(v, tuple):
        return ("a",) + tuple(_value_key(x) for x in v)
    if isinstance(v, bool):
        return ("b", v)
    return ("i", v)


def _render_value(v: Value) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Object):
        return v.name
    if isinstance(v, tuple):
        return "[" + ", ".join(_render_value(x) for x in v) + "]"
    return str(v)


@dataclass(frozen=True)
class PlanStep:
    """One plan entry: an action name with bound argument values."""

    action: str
    args: tuple[tuple[str, Value], ...] = ()

    def arg_dict(self) -> dict[str, Value]:
        return dict(self.args)

    def __str__(self) -> str:
        inner = ", ".join(f"{k}={_render_value(v)}" for k, v in self.args)
        return f"{self.action}({inner})"


@dataclass(frozen=True)
class Plan:
    steps: tuple[PlanStep, ...] = ()

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[PlanStep]:
        return iter(self.steps)

    def __str__(self) -> str:
        return "\n".join(str(s) for s in self.steps)


# ---------------------------------------------------------------------------
# Problem container
# ---------------------------------------------------------------------------


class Problem:
    """Container for user types, objects, fluents, actions, initial values, and goals.

    Build by calling the ``add_*`` methods, then ``validate()``. Compilers
    treat validated problems as immutable.
    """

    def __init__(self, name: str = "problem"):
        _check_name(name, "problem")
        self.name = name
        self.user_types: dict[str, list[Object]] = {}
        self._objects: dict[str, Object] = {}
        self.fluents: dict[str, Fluent] = {}
        self.actions: dict[str, Action] = {}
        self.init: dict[Expr, Expr] = {}
        self.goals: list[Expr] = []

    # -- declarations --------------------------------------------------------

    def add_user_type(self, name: str) -> UserType:
        _check_name(name, "type")
        if name in self.user_types:
            raise ModelError(f"duplicate type name {name!r}")
        self.user_types[name] = []
        return UserType(name)

    def add_object(self, name: str, type_name: str) -> Object:
        if type_name not in self.user_types:
            raise ModelError(f"unknown type {type_name!r} for object {name!r}")
        if name in self._objects:
            raise ModelError(f"duplicate object name {name!r}")
        obj = Object(name, type_name)
        self._objects[name] = obj
        self.user_types[type_name].append(obj)
        return obj

    def add_objects(self, type_name: str, names: Iterable[str]) -> list[Object]:
        return [self.add_object(n, type_name) for n in names]

    def has_object(self, name: str) -> bool:
        return name in self._objects

    def object(self, name: str) -> Object:
        try:
            return self._objects[name]
        except KeyError:
            raise ModelError(f"unknown object {name!r}") from None

    def objects(self, type_name: str) -> tuple[Object, ...]:
        if type_name not in self.user_types:
            raise ModelError(f"unknown type {type_name!r}")
        return tuple(self.user_types[type_name])

    def add_fluent(self, fluent: Fluent) -> Fluent:
        if fluent.name in self.fluents:
            raise ModelError(f"duplicate fluent name {fluent.name!r}")
        for pname, ptype in fluent.signature:
            if ptype.name not in self.user_types:
                raise ModelError(
                    f"fluent {fluent.name}: unknown type {ptype.name!r} for parameter {pname!r}")
        self._check_known_user_types(fluent.value_type, f"fluent {fluent.name}")
        self.fluents[fluent.name] = fluent
        return fluent

    def fluent(self, name: str) -> Fluent:
        try:
            return self.fluents[name]
        except KeyError:
            raise ModelError(f"unknown fluent {name!r}") from None

    def add_action(self, action: Action) -> Action:
        if action.name in self.actions:
            raise ModelError(f"duplicate action name {action.name!r}")
        for p in action.parameters:
            if isinstance(p.type, UserType) and p.type.name not in self.user_types:
                raise ModelError(
                    f"action {action.name}: unknown type {p.type.name!r} for parameter {p.value!r}")
        for expr in itertools.chain(
                action.preconditions,
                (e.target for e in action.effects),
                (e.value for e in action.effects),
                (e.condition for e in action.effects if e.condition is not None)):
            self._check_vocabulary(expr, f"action {action.name}")
        self.actions[action.name] = action
        return action

    def set_initial_value(self, target, value) -> None:
        t = as_expr(target)
        if t.op != "fluent":
            raise ModelError(f"initial value target must be a fluent access, got {t}")
        if t.fluent.name not in self.fluents or self.fluents[t.fluent.name] != t.fluent:
            raise ModelError(f"initial value for undeclared fluent {t.fluent.name!r}")
        for a in t.args:
            if a.op != "obj":
                raise ModelError(f"initial value target must be ground, got {t}")
        path = []
        for idx in t.indices:
            if not idx.is_const():
                raise ModelError(f"initial value target index must be constant, got {t}")
            path.append(idx.const_value())
        dims = t.fluent.value_type.dims() if isinstance(t.fluent.value_type, ArrayType) else ()
        for depth, i in enumerate(path):
            if not 0 <= i < dims[depth]:
                raise ModelError(f"initial value target out of range: {t}")
        v = as_expr(value)
        if not v.is_const():
            raise ModelError(f"initial value must be a constant, got {v} for {t}")
        if not _const_fits(v.const_value(), t.type):
            raise ModelError(f"initial value {v} does not fit {t.type} for {t}")
        self._check_vocabulary(v, "initial value")
        if t in self.init:
            raise ModelError(f"duplicate initial value for {t}")
        self.init[t] = v

    def add_goal(self, goal) -> None:
        g = as_expr(goal)
        if not g.type.is_bool():
            raise ModelError(f"goal must be Boolean, got {g.type}")
        if g.free_params():
            raise ModelError(f"goal must be closed, found parameters in {g}")
        self._check_vocabulary(g, "goal")
        self.goals.append(g)

    # -- checks ---------------------------------------------------------------

    def _check_known_user_types(self, t: TypeExpr, ctx: str) -> None:
        if isinstance(t, UserType) and t.name not in self.user_types:
            raise ModelError(f"{ctx}: unknown type {t.name!r}")
        if isinstance(t, ArrayType):
            self._check_known_user_types(t.element, ctx)

    def _check_vocabulary(self, expr: Expr, ctx: str) -> None:
        for node in expr.walk():
            if node.op == "fluent":
                f = node.value
                if self.fluents.get(f.name) != f:
                    raise ModelError(f"{ctx}: fluent {f.name!r} not declared in this problem")
            elif node.op == "obj":
                o = node.value
                if self._objects.get(o.name) != o:
                    raise ModelError(f"{ctx}: object {o.name!r} not declared in this problem")

    def validate(self) -> None:
        """Full consistency check; in particular a defined initial value for every ground cell."""
        self.initial_state()

    # -- initial state ---------------------------------------------------------

    def initial_state(self) -> State:
        values: dict[StateKey, Value] = {}
        overrides: dict[StateKey, list[tuple[tuple[int, ...], Value]]] = {}
        for target, v in self.init.items():
            key = (target.fluent.name, tuple(a.value for a in target.args))
            path = tuple(idx.const_value() for idx in target.indices)
            overrides.setdefault(key, []).append((path, v.const_value()))
        for fluent, args in ground_fluents(self):
            key = (fluent.name, args)
            base = fluent.default.const_value() if fluent.default is not None else None
            for path, val in overrides.get(key, ()):
                if not path and not isinstance(fluent.value_type, ArrayType):
                    base = val
                elif not path:
                    base = val  # whole-array assignment
                else:
                    if base is None:
                        base = _empty_array(fluent.value_type)
                    base = _set_cell(base, path, val, fluent.value_type)
            if base is None or _has_holes(base):
                raise ModelError(
                    f"missing initial value for {fluent.name}"
                    f"{'(' + ','.join(o.name for o in args) + ')' if args else ''}"
                    " and no default")
            values[key] = base
        return State(values)


def _empty_array(t: TypeExpr):
    if isinstance(t, ArrayType):
        return tuple(_empty_array(t.element) for _ in range(t.size))
    return _HOLE


class _Hole:
    def __repr__(self) -> str:
        return "<unset>"


_HOLE = _Hole()


def _has_holes(v) -> bool:
    if v is _HOLE:
        return True
    if isinstance(v, tuple):
        return any(_has_holes(x) for x in v)
    return False


def _set_cell(base, path: tuple[int, ...], val, t: TypeExpr):
    if not path:
        return val
    assert isinstance(base, tuple) and isinstance(t, ArrayType)
    i = path[0]
    return base[:i] + (_set_cell(base[i], path[1:], val, t.element),) + base[i + 1:]


def ground_fluents(problem: Problem) -> list[tuple[Fluent, tuple[Object, ...]]]:
    """Cartesian expansion of every fluent's signature over the declared objects.

    Array-typed fluents contribute one instance per signature binding; cells
    are addressed separately by the array-flattening compiler.
    """
    out = []
    for fluent in problem.fluents.values():
        domains = []
        for pname, ptype in fluent.signature:
            objs = problem.objects(ptype.name)
            if not objs:
                raise ModelError(
                    f"fluent {fluent.name}: type {ptype.name!r} has no objects "
                    f"(parameter {pname!r})")
            domains.append(objs)
        for combo in itertools.product(*domains):
            out.append((fluent, tuple(combo)))
    return out
