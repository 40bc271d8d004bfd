"""Ground substitution enumeration with size-bound pruning for the oracle."""
from __future__ import annotations

from typing import Iterator

from .terms import (
    ConditionalRule,
    Signature,
    Term,
    Var,
    term_size,
    term_sort,
)


def substitution_candidates(
    sig: Signature, rule: ConditionalRule, terms: set[Term], size_bound: int
) -> Iterator[dict[Var, Term]]:
    """Ground substitutions under which every term of the rule fits the bound.

    Variables are assigned depth-first; a partial assignment is abandoned as
    soon as some instantiated template cannot stay within the size bound
    even with every remaining variable mapped to a size-1 term.
    """
    variables = rule.variables()
    templates = rule.terms()
    occurrences: list[dict[Var, int]] = []
    bases: list[int] = []
    for template in templates:
        counts: dict[Var, int] = {}
        _count(template, counts)
        occurrences.append(counts)
        bases.append(term_size(template))
    pools: dict[Var, list[Term]] = {}
    for v in variables:
        pool = [t for t in terms if sig.le(term_sort(sig, t), v.sort)]
        pool.sort(key=lambda t: (term_size(t), _term_key(t)))
        pools[v] = pool
    if any(not pools[v] for v in variables):
        return

    extra = [0] * len(templates)  # accumulated size beyond the template's base

    def feasible() -> bool:
        return all(b + e <= size_bound for b, e in zip(bases, extra))

    assignment: dict[Var, Term] = {}

    def assign(index: int) -> Iterator[dict[Var, Term]]:
        if index == len(variables):
            yield dict(assignment)
            return
        v = variables[index]
        for candidate in pools[v]:
            growth = term_size(candidate) - 1
            for i, counts in enumerate(occurrences):
                extra[i] += counts.get(v, 0) * growth
            ok = feasible()
            if ok:
                assignment[v] = candidate
                yield from assign(index + 1)
                del assignment[v]
            for i, counts in enumerate(occurrences):
                extra[i] -= counts.get(v, 0) * growth
            if not ok:
                # pool is sorted by size, so every later candidate also overflows
                break
    yield from assign(0)


def _count(term: Term, counts: dict[Var, int]) -> None:
    if isinstance(term, Var):
        counts[term] = counts.get(term, 0) + 1
    else:
        for a in term.args:
            _count(a, counts)


def _term_key(t: Term) -> str:
    from .logic import format_term

    return format_term(t)
