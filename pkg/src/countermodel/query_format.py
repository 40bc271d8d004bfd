"""Parser for property queries.

Two input shapes are accepted: the explicit existential form ::

    EXISTS x:Sort y . s -> x /\\ x ->* y \\/ t ->^ y

and the template forms REACHABLE(s, t), FEASIBLE(s1 == t1, ...),
JOINABLE(s, t), REDUCIBLE(t), CONVERTIBLE(s, t), CYCLING(), CYCLING(t),
LOOPING(), LOOPING(t).  Anything outside the existential positive fragment
(negation, universal quantification, implication, nested quantifiers) is
rejected with an unsupported-fragment error.

Identifiers resolve to variables when bound in the prefix, annotated inline
(``x:Sort``), or listed in the caller's variable declarations; otherwise
they must be signature symbols.
"""
from __future__ import annotations

from typing import Mapping

from .errors import ParseError, QueryError, UnsupportedFragmentError
from .lexer import TokenStream, tokenize
from .logic import Atom
from .queries import (
    CONVERTIBLE,
    CYCLING_SYSTEM,
    CYCLING_TERM,
    FEAS,
    JOINABLE,
    LOOPING_SYSTEM,
    LOOPING_TERM,
    Query,
    REACH,
    REDUCIBLE,
    template,
)
from .terms import (
    ARROW,
    MANY_STEPS,
    ROOT_STEP,
    SUBTERM,
    App,
    Signature,
    Term,
    Var,
    check_term,
)

_ATOM_OPERATORS = (ARROW, MANY_STEPS, ROOT_STEP, SUBTERM)

_TEMPLATES = {
    "REACHABLE": REACH,
    "FEASIBLE": FEAS,
    "JOINABLE": JOINABLE,
    "REDUCIBLE": REDUCIBLE,
    "CONVERTIBLE": CONVERTIBLE,
    "CYCLING": None,  # arity decides between term and system form
    "LOOPING": None,
}

_REJECTED_TOKENS = {"~": "negation", "!": "negation", "=>": "implication"}
_REJECTED_WORDS = {"FORALL": "universal quantification", "ALL": "universal quantification", "NOT": "negation"}


def parse_query(
    text: str,
    sig: Signature,
    var_sorts: Mapping[str, str] | None = None,
    file: str | None = None,
) -> Query:
    tokens = tokenize(text, file)
    for token in tokens:
        if token.kind in _REJECTED_TOKENS:
            raise UnsupportedFragmentError(
                f"unsupported fragment: {_REJECTED_TOKENS[token.kind]} is not allowed "
                "(queries are existential closures of positive atom combinations)",
                token.span(file),
            )
        if token.kind == "ident" and token.text.upper() in _REJECTED_WORDS:
            raise UnsupportedFragmentError(
                f"unsupported fragment: {_REJECTED_WORDS[token.text.upper()]} is not allowed "
                "(queries are existential closures of positive atom combinations)",
                token.span(file),
            )
    stream = TokenStream(tokens, file)
    declared = dict(var_sorts) if var_sorts else {}

    head = stream.peek()
    if head is not None and head.kind == "ident" and head.text.upper() in _TEMPLATES and stream.at("(", 1):
        query = _parse_template(stream, sig, declared)
    else:
        query = _parse_exists(stream, sig, declared)
    if not stream.done():
        raise stream.error("trailing input after query")
    return query


def _parse_template(stream: TokenStream, sig: Signature, declared: dict[str, str]) -> Query:
    name = stream.expect_ident().text.upper()
    stream.expect("(")
    scope = _Scope(sig, declared, bound=None)
    try:
        if name == "FEASIBLE":
            conditions = []
            if stream.at(")"):
                raise stream.error("FEASIBLE needs at least one condition")
            while True:
                s = _parse_term(stream, scope)
                stream.expect("==")
                t = _parse_term(stream, scope)
                conditions.append((s, t))
                if stream.at(","):
                    stream.expect(",")
                else:
                    break
            stream.expect(")")
            return template(sig, FEAS, conditions)
        args: list[Term] = []
        if not stream.at(")"):
            args.append(_parse_term(stream, scope))
            while stream.at(","):
                stream.expect(",")
                args.append(_parse_term(stream, scope))
        stream.expect(")")
        if name == "CYCLING":
            return template(sig, CYCLING_TERM if args else CYCLING_SYSTEM, *args)
        if name == "LOOPING":
            return template(sig, LOOPING_TERM if args else LOOPING_SYSTEM, *args)
        return template(sig, _TEMPLATES[name], *args)
    except QueryError as exc:
        raise ParseError(str(exc)) from exc


def _parse_exists(stream: TokenStream, sig: Signature, declared: dict[str, str]) -> Query:
    bound: dict[str, str] = {}
    order: list[Var] = []
    if stream.at_ident("EXISTS"):
        stream.expect_ident("EXISTS")
        while not stream.at("."):
            name = stream.expect_ident().text
            sort = sig.sorts[0] if sig.single_sorted else None
            if stream.at(":"):
                stream.expect(":")
                sort = stream.expect_ident().text
            elif name in declared:
                sort = declared[name]
            if sort is None:
                raise stream.error(f"variable '{name}' needs a sort annotation")
            bound[name] = sort
            order.append(Var(name, sort))
        stream.expect(".")
    scope = _Scope(sig, declared, bound)
    disjuncts: list[tuple[Atom, ...]] = []
    while True:
        atoms = [_parse_atom(stream, scope)]
        while stream.at("/\\"):
            stream.expect("/\\")
            atoms.append(_parse_atom(stream, scope))
        disjuncts.append(tuple(atoms))
        if stream.at("\\/"):
            stream.expect("\\/")
        else:
            break
    variables = tuple(order) if order else tuple(scope.seen.values())
    try:
        return Query(variables, tuple(disjuncts))
    except QueryError as exc:
        raise ParseError(str(exc)) from exc


def _parse_atom(stream: TokenStream, scope: "_Scope") -> Atom:
    if stream.at_ident("EXISTS"):
        raise UnsupportedFragmentError(
            "unsupported fragment: nested quantifiers are not allowed", stream.span_here()
        )
    left = _parse_term(stream, scope)
    token = stream.peek()
    if token is None or token.kind not in _ATOM_OPERATORS:
        raise stream.error("expected one of '->', '->*', '->^', '|>' in atom")
    stream.next()
    right = _parse_term(stream, scope)
    return Atom(token.kind, (left, right))


class _Scope:
    """Resolution of identifiers to variables or signature symbols."""

    def __init__(
        self, sig: Signature, declared: Mapping[str, str], bound: dict[str, str] | None
    ):
        self.sig = sig
        self.declared = declared
        self.bound = bound  # None, as in templates, means variables bind implicitly
        self.seen: dict[str, Var] = {}

    def resolve(self, name: str, inline_sort: str | None) -> Term | None:
        if inline_sort is not None:
            return self._variable(name, inline_sort)
        if self.bound is not None and name in self.bound:
            return self._variable(name, self.bound[name])
        if self.bound is None and name in self.declared:
            return self._variable(name, self.declared[name])
        if name in self.sig.functions:
            return None  # a symbol; the caller parses it as an application
        if self.bound is None:
            sort = self.declared.get(name, self.sig.sorts[0] if self.sig.single_sorted else None)
            if sort is not None:
                return self._variable(name, sort)
        return None

    def _variable(self, name: str, sort: str) -> Var:
        var = Var(name, sort)
        previous = self.seen.get(name)
        if previous is not None and previous.sort != sort:
            raise QueryError(f"variable '{name}' used with two sorts")
        self.seen[name] = var
        return var


def _parse_term(stream: TokenStream, scope: _Scope) -> Term:
    token = stream.expect_ident()
    name = token.text
    inline_sort: str | None = None
    if stream.at(":"):
        stream.expect(":")
        inline_sort = stream.expect_ident().text
    resolved = scope.resolve(name, inline_sort)
    if isinstance(resolved, Var):
        return resolved
    if name not in scope.sig.functions:
        raise ParseError(f"unknown symbol '{name}'", token.span(stream.file))
    args: list[Term] = []
    if stream.at("("):
        stream.expect("(")
        if not stream.at(")"):
            args.append(_parse_term(stream, scope))
            while stream.at(","):
                stream.expect(",")
                args.append(_parse_term(stream, scope))
        stream.expect(")")
    term = App(name, tuple(args))
    try:
        check_term(scope.sig, term, strict=False)
    except Exception as exc:
        raise ParseError(str(exc), token.span(stream.file)) from exc
    return term
