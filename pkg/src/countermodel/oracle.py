"""Bounded bottom-up saturation of the rewriting inference rules.

Saturation derives ground atoms for ``->``, ``->*``, ``->^`` and ``|>``
over all ground terms within a size bound, to a fixpoint capped by a
derivation-depth bound (proof-tree height, condition subproofs included).
Instances whose terms exceed the size bound are discarded, which makes the
result an under-approximation of the actual rewrite relations: anything
derived here genuinely holds, while absence proves nothing.  That is the
right direction for cross-checking disproofs, where a derived atom would
contradict a claimed countermodel.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping

from .logic import Atom
from .oracle_util import substitution_candidates
from .terms import (
    ARROW,
    CTRS,
    JOIN,
    MANY_STEPS,
    ROOT_STEP,
    SUBTERM,
    App,
    ConditionalRule,
    Signature,
    Term,
    Var,
    apply_substitution,
    ground_terms,
    subterms,
    term_size,
    term_sort,
)


@dataclass(frozen=True)
class AtomSet:
    """Derived ground atoms with the minimal derivation depth of each."""

    atoms: Mapping[Atom, int]
    size_bound: int
    depth_bound: int

    def __contains__(self, atom: Atom) -> bool:
        return atom in self.atoms

    def depth(self, atom: Atom) -> int | None:
        return self.atoms.get(atom)

    def with_predicate(self, predicate: str) -> tuple[Atom, ...]:
        return tuple(a for a in self.atoms if a.predicate == predicate)

    def __len__(self) -> int:
        return len(self.atoms)


def saturate(ctrs: CTRS, size_bound: int, depth_bound: int) -> AtomSet:
    """Fixpoint of the conditional-rewriting inference rules within bounds."""
    if size_bound < 1 or depth_bound < 1:
        raise ValueError("size and depth bounds must be >= 1")
    sig = ctrs.signature
    terms: set[Term] = set()
    for sort in sig.sorts:
        terms.update(ground_terms(sig, sort, size_bound))
    atoms: dict[Atom, int] = {}

    def add(atom: Atom, depth: int) -> bool:
        if depth > depth_bound:
            return False
        best = atoms.get(atom)
        if best is None or depth < best:
            atoms[atom] = depth
            return True
        return False

    # Reflexivity of ->* and the subterm relation are depth-1 facts.
    for t in terms:
        add(Atom(MANY_STEPS, (t, t)), 1)
        for s in subterms(t):
            add(Atom(SUBTERM, (t, s)), 1)

    rules = _desugared_rules(sig, ctrs.rules)
    changed = True
    while changed:
        changed = False
        # (Rp): rule instances whose instantiated conditions are derived.
        for rule in rules:
            for subst in substitution_candidates(sig, rule, terms, size_bound):
                condition_depths = []
                feasible = True
                for s, t in rule.conditions:
                    atom = Atom(
                        MANY_STEPS,
                        (apply_substitution(subst, s), apply_substitution(subst, t)),
                    )
                    depth = atoms.get(atom)
                    if depth is None:
                        feasible = False
                        break
                    condition_depths.append(depth)
                if not feasible:
                    continue
                depth = 1 + max(condition_depths, default=0)
                lhs = apply_substitution(subst, rule.lhs)
                rhs = apply_substitution(subst, rule.rhs)
                changed |= add(Atom(ARROW, (lhs, rhs)), depth)
                changed |= add(Atom(ROOT_STEP, (lhs, rhs)), depth)
        # (C): one-step rewriting closed under contexts one argument at a time;
        # both the redex side and the contractum side must fit the size bound.
        for atom, depth in list(atoms.items()):
            if atom.predicate != ARROW:
                continue
            s, t = atom.args
            for context, hole in _one_hole_contexts(sig, terms, s, size_bound):
                name, index = hole
                if not sig.le(term_sort(sig, t), sig.functions[name][0][index]):
                    continue
                plugged = _plug(hole, context, s, t)
                if term_size(plugged) > size_bound:
                    continue
                changed |= add(Atom(ARROW, (context, plugged)), depth + 1)
        # (T): s ->* u from s -> t and t ->* u.
        steps = [(a.args, d) for a, d in atoms.items() if a.predicate == ARROW]
        many = [(a.args, d) for a, d in atoms.items() if a.predicate == MANY_STEPS]
        by_source: dict[Term, list[tuple[Term, int]]] = {}
        for (t, u), d in many:
            by_source.setdefault(t, []).append((u, d))
        for (s, t), d1 in steps:
            for u, d2 in by_source.get(t, ()):
                changed |= add(Atom(MANY_STEPS, (s, u)), 1 + max(d1, d2))
    return AtomSet(dict(atoms), size_bound, depth_bound)


def derivable(ctrs: CTRS, atom: Atom, size_bound: int, depth_bound: int) -> bool:
    return atom in saturate(ctrs, size_bound, depth_bound)


def _desugared_rules(
    sig: Signature, rules: tuple[ConditionalRule, ...]
) -> tuple[ConditionalRule, ...]:
    """Joinability conditions replaced by reachability into a fresh variable."""
    out = []
    for rule in rules:
        if rule.condition_semantics != JOIN or not rule.conditions:
            out.append(rule)
            continue
        taken = {v.name for v in rule.variables()}
        conditions: list[tuple[Term, Term]] = []
        counter = 0
        for s, t in rule.conditions:
            while True:
                counter += 1
                name = f"w{counter}"
                if name not in taken:
                    taken.add(name)
                    break
            sort = sig.lub(term_sort(sig, s), term_sort(sig, t)) or term_sort(sig, s)
            w = Var(name, sort)
            conditions.append((s, w))
            conditions.append((t, w))
        out.append(ConditionalRule(rule.lhs, rule.rhs, tuple(conditions)))
    return tuple(out)


def _one_hole_contexts(
    sig: Signature, terms: set[Term], s: Term, size_bound: int
) -> Iterator[tuple[Term, tuple[str, int]]]:
    """Terms of the form ``f(..., s, ...)`` within the size bound.

    Yields the context applied to ``s`` together with the symbol and
    argument index of the hole, so the rewritten side can be rebuilt.
    """
    s_size = term_size(s)
    s_sort = term_sort(sig, s)
    for name, (arg_sorts, _result) in sig.functions.items():
        arity = len(arg_sorts)
        if arity == 0:
            continue
        for i in range(arity):
            if not sig.le(s_sort, arg_sorts[i]):
                continue
            other_indices = [j for j in range(arity) if j != i]
            pools = []
            for j in other_indices:
                pools.append(
                    [
                        t
                        for t in terms
                        if sig.le(term_sort(sig, t), arg_sorts[j])
                    ]
                )
            for others in itertools.product(*pools):
                args: list[Term] = [None] * arity  # type: ignore[list-item]
                for j, t in zip(other_indices, others):
                    args[j] = t
                args[i] = s
                total = 1 + s_size + sum(term_size(t) for t in others)
                if total > size_bound:
                    continue
                yield App(name, tuple(args)), (name, i)


def _plug(hole: tuple[str, int], context: Term, s: Term, t: Term) -> Term:
    """The context with ``t`` at the hole position instead of ``s``."""
    assert isinstance(context, App)
    _name, index = hole
    args = list(context.args)
    args[index] = t
    return App(context.symbol, tuple(args))
