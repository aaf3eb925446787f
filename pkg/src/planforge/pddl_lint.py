"""Strict structural checker for the exported PDDL fragment.

Independent of the exporter: it re-tokenizes the emitted text, parses the
s-expressions, and validates section structure, declared arities, term types,
and that every construct is licensed by a declared requirement. ``lint``
returns a list of problems; an empty list means both files check out.

Accepted fragment: STRIPS + :typing, :equality, :negative-preconditions,
:disjunctive-preconditions, :conditional-effects, :numeric-fluents. Numbers
may carry a leading minus sign.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

__all__ = ["lint", "check_domain", "check_problem", "parse_sexpr"]

_TOKEN = re.compile(r"\(|\)|[^\s();]+")
_NAME = re.compile(r"^[a-z][a-z0-9_-]*$")
_VARIABLE = re.compile(r"^\?[a-z][a-z0-9_-]*$")
_NUMBER = re.compile(r"^-?[0-9]+(\.[0-9]+)?$")

_KNOWN_REQUIREMENTS = {
    ":strips", ":typing", ":equality", ":negative-preconditions",
    ":disjunctive-preconditions", ":conditional-effects", ":numeric-fluents",
}


def tokenize(text: str) -> list[str]:
    out = []
    for raw_line in text.splitlines():
        line = raw_line.split(";", 1)[0]
        out.extend(_TOKEN.findall(line))
    return out


def parse_sexpr(text: str):
    """Parse the single s-expression in ``text`` into nested lists of strings."""
    tokens = tokenize(text)
    pos = 0

    def parse():
        nonlocal pos
        if pos >= len(tokens):
            raise ValueError("unexpected end of input")
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            items = []
            while pos < len(tokens) and tokens[pos] != ")":
                items.append(parse())
            if pos >= len(tokens):
                raise ValueError("missing closing parenthesis")
            pos += 1
            return items
        if tok == ")":
            raise ValueError("unbalanced closing parenthesis")
        return tok.lower()

    tree = parse()
    if pos != len(tokens):
        raise ValueError("trailing tokens after the top-level expression")
    return tree


@dataclass
class _DomainInfo:
    name: str = ""
    requirements: set = field(default_factory=set)
    types: set = field(default_factory=set)
    constants: dict = field(default_factory=dict)       # name -> type
    predicates: dict = field(default_factory=dict)      # name -> [param types]
    functions: dict = field(default_factory=dict)


class _Checker:
    def __init__(self):
        self.errors: list[str] = []

    def error(self, msg: str) -> None:
        self.errors.append(msg)

    # -- shared helpers -----------------------------------------------------

    def parse_typed_list(self, items: list, what: str) -> list[tuple[str, str]]:
        """``a b - t c - u`` pairs; names without a type default to object."""
        out = []
        pending: list[str] = []
        i = 0
        while i < len(items):
            tok = items[i]
            if tok == "-":
                if i + 1 >= len(items) or not isinstance(items[i + 1], str):
                    self.error(f"{what}: dangling '-' in typed list")
                    return out
                for name in pending:
                    out.append((name, items[i + 1]))
                pending = []
                i += 2
                continue
            if not isinstance(tok, str):
                self.error(f"{what}: unexpected nested expression in typed list")
                return out
            pending.append(tok)
            i += 1
        out.extend((name, "object") for name in pending)
        return out


def check_domain(text: str) -> tuple[list[str], _DomainInfo]:
    chk = _Checker()
    info = _DomainInfo()
    try:
        tree = parse_sexpr(text)
    except ValueError as exc:
        return [f"domain: {exc}"], info
    if not (isinstance(tree, list) and len(tree) >= 2 and tree[0] == "define"
            and isinstance(tree[1], list) and len(tree[1]) == 2 and tree[1][0] == "domain"):
        return ["domain: expected (define (domain <name>) ...)"], info
    info.name = tree[1][1]
    if not _NAME.match(info.name):
        chk.error(f"domain: bad name {info.name!r}")

    for section in tree[2:]:
        if not isinstance(section, list) or not section or not isinstance(section[0], str):
            chk.error("domain: stray top-level token")
            continue
        head = section[0]
        if head == ":requirements":
            for r in section[1:]:
                if r not in _KNOWN_REQUIREMENTS:
                    chk.error(f"domain: unknown requirement {r}")
                info.requirements.add(r)
        elif head == ":types":
            if ":typing" not in info.requirements:
                chk.error("domain: :types section without :typing")
            for name, parent in chk.parse_typed_list(section[1:], ":types"):
                if parent != "object":
                    chk.error(f"domain: only 'object' may parent a type, got {parent}")
                if not _NAME.match(name):
                    chk.error(f"domain: bad type name {name!r}")
                info.types.add(name)
        elif head == ":constants":
            for name, type_name in chk.parse_typed_list(section[1:], ":constants"):
                if type_name != "object" and type_name not in info.types:
                    chk.error(f"domain: constant {name} has unknown type {type_name}")
                if not _NAME.match(name):
                    chk.error(f"domain: bad constant name {name!r}")
                info.constants[name] = type_name
        elif head == ":predicates":
            _collect_declarations(chk, info, section[1:], info.predicates, "predicate")
        elif head == ":functions":
            if ":numeric-fluents" not in info.requirements:
                chk.error("domain: :functions section without :numeric-fluents")
            _collect_declarations(chk, info, section[1:], info.functions, "function")
        elif head == ":action":
            _check_action(chk, info, section)
        else:
            chk.error(f"domain: unknown section {head}")
    return chk.errors, info


def _collect_declarations(chk: _Checker, info: _DomainInfo, entries, table, what):
    for entry in entries:
        if not isinstance(entry, list) or not entry or not isinstance(entry[0], str):
            chk.error(f"domain: malformed {what} declaration {entry!r}")
            continue
        name = entry[0]
        if not _NAME.match(name):
            chk.error(f"domain: bad {what} name {name!r}")
        if name in table:
            chk.error(f"domain: duplicate {what} {name}")
        params = chk.parse_typed_list(entry[1:], f"{what} {name}")
        for pname, ptype in params:
            if not _VARIABLE.match(pname):
                chk.error(f"domain: {what} {name}: parameter {pname!r} is not a variable")
            if ptype != "object" and ptype not in info.types:
                chk.error(f"domain: {what} {name}: unknown type {ptype}")
        table[name] = [ptype for _, ptype in params]


def _check_action(chk: _Checker, info: _DomainInfo, section) -> None:
    if len(section) < 2 or not isinstance(section[1], str) or not _NAME.match(section[1]):
        chk.error(f"domain: action with a bad name: {section[1:2]}")
        return
    name = section[1]
    fields = {}
    i = 2
    while i < len(section):
        key = section[i]
        if key not in (":parameters", ":precondition", ":effect"):
            chk.error(f"domain: action {name}: unknown field {key}")
            return
        if i + 1 >= len(section):
            chk.error(f"domain: action {name}: field {key} missing a value")
            return
        fields[key] = section[i + 1]
        i += 2
    if ":parameters" not in fields:
        chk.error(f"domain: action {name}: missing :parameters")
        return
    scope: dict[str, str] = {}
    for pname, ptype in chk.parse_typed_list(fields[":parameters"], f"action {name}"):
        if not _VARIABLE.match(pname):
            chk.error(f"domain: action {name}: parameter {pname!r} is not a variable")
        if ptype != "object" and ptype not in info.types:
            chk.error(f"domain: action {name}: unknown parameter type {ptype}")
        scope[pname] = ptype
    if ":precondition" in fields:
        _check_gd(chk, info, fields[":precondition"], scope, f"action {name} precondition")
    if ":effect" in fields:
        _check_effect(chk, info, fields[":effect"], scope, f"action {name} effect")


def _term_type(chk: _Checker, info: _DomainInfo, term, scope, where) -> str | None:
    if not isinstance(term, str):
        chk.error(f"{where}: term must be a name or variable, got {term!r}")
        return None
    if term.startswith("?"):
        if term not in scope:
            chk.error(f"{where}: undeclared variable {term}")
            return None
        return scope[term]
    if term in info.constants:
        return info.constants[term]
    chk.error(f"{where}: unknown constant {term}")
    return None


def _check_atom(chk: _Checker, info: _DomainInfo, node, scope, where,
                table=None, what="predicate") -> None:
    table = info.predicates if table is None else table
    name = node[0]
    if name not in table:
        chk.error(f"{where}: unknown {what} {name}")
        return
    expected = table[name]
    terms = node[1:]
    if len(terms) != len(expected):
        chk.error(f"{where}: {what} {name} wants {len(expected)} arguments, got {len(terms)}")
        return
    for term, expected_type in zip(terms, expected):
        actual = _term_type(chk, info, term, scope, where)
        if actual is not None and expected_type != "object" and actual != expected_type:
            chk.error(f"{where}: {what} {name}: argument {term} has type {actual}, "
                      f"expected {expected_type}")


def _check_gd(chk: _Checker, info: _DomainInfo, node, scope, where) -> None:
    if not isinstance(node, list) or not node:
        if node == []:
            return  # () is an empty conjunction
        chk.error(f"{where}: malformed condition {node!r}")
        return
    head = node[0]
    if head == "and":
        for sub in node[1:]:
            _check_gd(chk, info, sub, scope, where)
        return
    if head == "or":
        if ":disjunctive-preconditions" not in info.requirements:
            chk.error(f"{where}: 'or' without :disjunctive-preconditions")
        for sub in node[1:]:
            _check_gd(chk, info, sub, scope, where)
        return
    if head == "imply":
        if ":disjunctive-preconditions" not in info.requirements:
            chk.error(f"{where}: 'imply' without :disjunctive-preconditions")
        if len(node) != 3:
            chk.error(f"{where}: 'imply' wants two conditions")
            return
        _check_gd(chk, info, node[1], scope, where)
        _check_gd(chk, info, node[2], scope, where)
        return
    if head == "not":
        if ":negative-preconditions" not in info.requirements:
            chk.error(f"{where}: 'not' without :negative-preconditions")
        if len(node) != 2:
            chk.error(f"{where}: 'not' wants one condition")
            return
        _check_gd(chk, info, node[1], scope, where)
        return
    if head in ("<=", "<", ">", ">="):
        if ":numeric-fluents" not in info.requirements:
            chk.error(f"{where}: comparison without :numeric-fluents")
        if len(node) != 3:
            chk.error(f"{where}: comparison wants two expressions")
            return
        _check_fexp(chk, info, node[1], scope, where)
        _check_fexp(chk, info, node[2], scope, where)
        return
    if head == "=":
        if len(node) != 3:
            chk.error(f"{where}: '=' wants two arguments")
            return
        if _looks_numeric(info, node[1]) or _looks_numeric(info, node[2]):
            if ":numeric-fluents" not in info.requirements:
                chk.error(f"{where}: numeric '=' without :numeric-fluents")
            _check_fexp(chk, info, node[1], scope, where)
            _check_fexp(chk, info, node[2], scope, where)
        else:
            if ":equality" not in info.requirements:
                chk.error(f"{where}: '=' on terms without :equality")
            _term_type(chk, info, node[1], scope, where)
            _term_type(chk, info, node[2], scope, where)
        return
    if isinstance(head, str):
        _check_atom(chk, info, node, scope, where)
        return
    chk.error(f"{where}: malformed condition {node!r}")


def _looks_numeric(info: _DomainInfo, node) -> bool:
    if isinstance(node, str):
        return bool(_NUMBER.match(node))
    return bool(node) and (node[0] in ("+", "-", "*") or node[0] in info.functions)


def _check_fexp(chk: _Checker, info: _DomainInfo, node, scope, where) -> None:
    if isinstance(node, str):
        if _NUMBER.match(node):
            return
        chk.error(f"{where}: expected a number or function, got {node!r}")
        return
    if not node:
        chk.error(f"{where}: empty numeric expression")
        return
    head = node[0]
    if head in ("+", "-", "*"):
        if len(node) != 3:
            chk.error(f"{where}: '{head}' wants two numeric expressions")
            return
        _check_fexp(chk, info, node[1], scope, where)
        _check_fexp(chk, info, node[2], scope, where)
        return
    _check_atom(chk, info, node, scope, where, table=info.functions, what="function")


def _check_effect(chk: _Checker, info: _DomainInfo, node, scope, where,
                  inside_when: bool = False) -> None:
    if not isinstance(node, list) or not node:
        if node == []:
            return
        chk.error(f"{where}: malformed effect {node!r}")
        return
    head = node[0]
    if head == "and":
        for sub in node[1:]:
            _check_effect(chk, info, sub, scope, where, inside_when)
        return
    if head == "when":
        if ":conditional-effects" not in info.requirements:
            chk.error(f"{where}: 'when' without :conditional-effects")
        if inside_when:
            chk.error(f"{where}: nested 'when'")
        if len(node) != 3:
            chk.error(f"{where}: 'when' wants a condition and an effect")
            return
        _check_gd(chk, info, node[1], scope, where)
        _check_effect(chk, info, node[2], scope, where, inside_when=True)
        return
    if head == "not":
        if len(node) != 2 or not isinstance(node[1], list):
            chk.error(f"{where}: 'not' in effects wants one atom")
            return
        _check_atom(chk, info, node[1], scope, where)
        return
    if head == "assign":
        if ":numeric-fluents" not in info.requirements:
            chk.error(f"{where}: 'assign' without :numeric-fluents")
        if len(node) != 3:
            chk.error(f"{where}: 'assign' wants a function and a value")
            return
        if not isinstance(node[1], list):
            chk.error(f"{where}: 'assign' target must be a function term")
            return
        _check_atom(chk, info, node[1], scope, where, table=info.functions, what="function")
        _check_fexp(chk, info, node[2], scope, where)
        return
    if isinstance(head, str):
        _check_atom(chk, info, node, scope, where)
        return
    chk.error(f"{where}: malformed effect {node!r}")


def check_problem(text: str, info: _DomainInfo) -> list[str]:
    chk = _Checker()
    try:
        tree = parse_sexpr(text)
    except ValueError as exc:
        return [f"problem: {exc}"]
    if not (isinstance(tree, list) and len(tree) >= 2 and tree[0] == "define"
            and isinstance(tree[1], list) and len(tree[1]) == 2 and tree[1][0] == "problem"):
        return ["problem: expected (define (problem <name>) ...)"]
    saw_domain = False
    for section in tree[2:]:
        if not isinstance(section, list) or not section:
            chk.error("problem: stray top-level token")
            continue
        head = section[0]
        if head == ":domain":
            saw_domain = True
            if len(section) != 2 or section[1] != info.name:
                chk.error(f"problem: :domain {section[1:]} does not match {info.name!r}")
        elif head == ":objects":
            for name, type_name in chk.parse_typed_list(section[1:], ":objects"):
                if type_name != "object" and type_name not in info.types:
                    chk.error(f"problem: object {name} has unknown type {type_name}")
                info.constants[name] = type_name
        elif head == ":init":
            for literal in section[1:]:
                _check_init_literal(chk, info, literal)
        elif head == ":goal":
            if len(section) != 2:
                chk.error("problem: :goal wants exactly one condition")
            else:
                _check_gd(chk, info, section[1], {}, "goal")
        else:
            chk.error(f"problem: unknown section {head}")
    if not saw_domain:
        chk.error("problem: missing :domain section")
    return chk.errors


def _check_init_literal(chk: _Checker, info: _DomainInfo, literal) -> None:
    if not isinstance(literal, list) or not literal:
        chk.error(f"problem: malformed init literal {literal!r}")
        return
    if literal[0] == "=":
        if len(literal) != 3 or not isinstance(literal[1], list):
            chk.error(f"problem: malformed numeric init {literal!r}")
            return
        _check_atom(chk, info, literal[1], {}, "init", table=info.functions, what="function")
        if not (isinstance(literal[2], str) and _NUMBER.match(literal[2])):
            chk.error(f"problem: numeric init value must be a literal number, "
                      f"got {literal[2]!r}")
        return
    _check_atom(chk, info, literal, {}, "init")


def lint(domain_text: str, problem_text: str) -> list[str]:
    """Check an exported domain/problem pair; returns all problems found."""
    errors, info = check_domain(domain_text)
    if any("expected (define" in e or "unexpected end" in e for e in errors):
        return errors
    errors.extend(check_problem(problem_text, info))
    return errors
