"""Parser for rewrite-system files.

The grammar is a block format in the style of the confluence-competition
databases::

    (SORTS User WebPage ...)                 ; optional; omitted => unsorted
    (SUBSORTS RegUser EventualUser < User)   ; optional chains
    (SIG f : s1 s2 -> s   a : -> s ...)      ; required when SORTS is given
    (CONDITIONTYPE ORIENTED)                 ; or JOIN
    (VAR x y:Sort ...)
    (RULES l -> r | s1 == t1, s2 == t2 ...)
    (COMMENT ...)

Untyped input uses the single default sort, with arities inferred from the
first use of each symbol; later uses at a different arity are rejected with
the offending span.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParseError, TermError
from .lexer import Token, TokenStream, tokenize
from .terms import (
    CTRS,
    DEFAULT_SORT,
    JOIN,
    ORIENTED,
    App,
    ConditionalRule,
    Signature,
    Term,
    Var,
)


@dataclass
class CTRSDocument:
    """A parsed system plus the declarations the rules were read under."""

    ctrs: CTRS
    var_sorts: dict[str, str] = field(default_factory=dict)
    condition_type: str = ORIENTED


def parse_ctrs(text: str, file: str | None = None) -> CTRS:
    return parse_ctrs_document(text, file).ctrs


def parse_ctrs_document(text: str, file: str | None = None) -> CTRSDocument:
    stream = TokenStream(tokenize(text, file), file)
    sorts: list[str] | None = None
    subsorts: list[tuple[str, str]] = []
    declared_functions: dict[str, tuple[tuple[str, ...], str]] | None = None
    condition_type = ORIENTED
    var_sorts: dict[str, str] = {}
    rule_blocks: list[list[Token]] = []

    while not stream.done():
        stream.expect("(")
        keyword = stream.expect_ident().text.upper()
        if keyword == "SORTS":
            sorts = []
            while not stream.at(")"):
                sorts.append(stream.expect_ident().text)
            stream.expect(")")
        elif keyword == "SUBSORTS":
            while not stream.at(")"):
                lhs = [stream.expect_ident().text]
                while not stream.at("<"):
                    lhs.append(stream.expect_ident().text)
                stream.expect("<")
                sup = stream.expect_ident().text
                subsorts.extend((sub, sup) for sub in lhs)
            stream.expect(")")
        elif keyword == "SIG":
            declared_functions = {}
            while not stream.at(")"):
                name_token = stream.expect_ident()
                stream.expect(":")
                arg_sorts: list[str] = []
                while not stream.at("->"):
                    arg_sorts.append(stream.expect_ident().text)
                stream.expect("->")
                result = stream.expect_ident().text
                if name_token.text in declared_functions:
                    raise ParseError(
                        f"duplicate declaration of '{name_token.text}'",
                        name_token.span(file),
                    )
                declared_functions[name_token.text] = (tuple(arg_sorts), result)
            stream.expect(")")
        elif keyword == "CONDITIONTYPE":
            token = stream.expect_ident()
            kind = token.text.upper()
            if kind == "ORIENTED":
                condition_type = ORIENTED
            elif kind == "JOIN":
                condition_type = JOIN
            else:
                raise ParseError(f"unknown condition type '{token.text}'", token.span(file))
            stream.expect(")")
        elif keyword == "VAR":
            while not stream.at(")"):
                name = stream.expect_ident().text
                if stream.at(":"):
                    stream.expect(":")
                    var_sorts[name] = stream.expect_ident().text
                else:
                    var_sorts[name] = DEFAULT_SORT
            stream.expect(")")
        elif keyword == "RULES":
            depth = 1
            body: list[Token] = []
            while depth > 0:
                token = stream.next()
                if token.kind == "(":
                    depth += 1
                elif token.kind == ")":
                    depth -= 1
                    if depth == 0:
                        break
                body.append(token)
            rule_blocks.append(body)
        elif keyword == "COMMENT":
            depth = 1
            while depth > 0:
                token = stream.next()
                if token.kind == "(":
                    depth += 1
                elif token.kind == ")":
                    depth -= 1
        else:
            raise ParseError(f"unknown block '{keyword}'", stream.span_here())

    typed = sorts is not None or declared_functions is not None
    if typed:
        if declared_functions is None:
            raise ParseError("a SORTS block requires a SIG block")
        if sorts is None:
            raise ParseError("a SIG block requires a SORTS block")
        for name, sort in var_sorts.items():
            if sort == DEFAULT_SORT:
                raise ParseError(f"variable '{name}' needs a sort annotation in sorted input")
        signature = Signature(tuple(sorts), tuple(subsorts), declared_functions)
        rules = []
        for body in rule_blocks:
            rules.extend(_parse_rules(body, file, var_sorts, signature, None, condition_type))
    else:
        inferred: dict[str, int] = {}
        rules = []
        for body in rule_blocks:
            rules.extend(_parse_rules(body, file, var_sorts, None, inferred, condition_type))
        signature = Signature(
            (DEFAULT_SORT,),
            (),
            {name: ((DEFAULT_SORT,) * arity, DEFAULT_SORT) for name, arity in inferred.items()},
        )

    try:
        ctrs = CTRS(signature, tuple(rules))
    except TermError as exc:  # sort errors surfaced with the rule's span
        raise ParseError(str(exc)) from exc
    return CTRSDocument(ctrs, var_sorts, condition_type)


def _parse_rules(
    body: list[Token],
    file: str | None,
    var_sorts: dict[str, str],
    signature: Signature | None,
    inferred: dict[str, int] | None,
    condition_type: str,
) -> list[ConditionalRule]:
    stream = TokenStream(body, file)
    rules: list[ConditionalRule] = []
    while not stream.done():
        start = stream.peek()
        lhs = _parse_term(stream, var_sorts, signature, inferred)
        stream.expect("->")
        rhs = _parse_term(stream, var_sorts, signature, inferred)
        conditions: list[tuple[Term, Term]] = []
        if stream.at("|"):
            stream.expect("|")
            while True:
                s = _parse_term(stream, var_sorts, signature, inferred)
                stream.expect("==")
                t = _parse_term(stream, var_sorts, signature, inferred)
                conditions.append((s, t))
                if stream.at(","):
                    stream.expect(",")
                else:
                    break
        span = start.span(file) if start else None
        try:
            rules.append(
                ConditionalRule(lhs, rhs, tuple(conditions), condition_type, span=span)
            )
        except Exception as exc:
            raise ParseError(str(exc), span) from exc
    return rules


def _parse_term(
    stream: TokenStream,
    var_sorts: dict[str, str],
    signature: Signature | None,
    inferred: dict[str, int] | None,
) -> Term:
    token = stream.expect_ident()
    name = token.text
    if name in var_sorts:
        if stream.at("("):
            raise ParseError(f"variable '{name}' cannot take arguments", token.span(stream.file))
        return Var(name, var_sorts[name])
    args: list[Term] = []
    if stream.at("("):
        stream.expect("(")
        if not stream.at(")"):
            args.append(_parse_term(stream, var_sorts, signature, inferred))
            while stream.at(","):
                stream.expect(",")
                args.append(_parse_term(stream, var_sorts, signature, inferred))
        stream.expect(")")
    if signature is not None:
        if name not in signature.functions:
            raise ParseError(f"undeclared symbol '{name}'", token.span(stream.file))
        declared = len(signature.functions[name][0])
        if declared != len(args):
            raise ParseError(
                f"'{name}' is declared with {declared} argument(s), used with {len(args)}",
                token.span(stream.file),
            )
    else:
        assert inferred is not None
        arity = inferred.setdefault(name, len(args))
        if arity != len(args):
            raise ParseError(
                f"'{name}' was first used with {arity} argument(s), now {len(args)}",
                token.span(stream.file),
            )
    return App(name, tuple(args))
