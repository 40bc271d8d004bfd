"""Compilation of rewrite systems into Horn theories.

A system compiles to, in this fixed order: the reflexivity clause (Rf) for
``->*``, the transitivity clause (T) relating ``->`` and ``->*``, one
congruence clause (C)(f,i) per function symbol and argument position in
declaration order, and one rule clause (Rp)(i) per rewrite rule in rule
order.  Rule conditions always compile to ``->*`` premises; joinability
conditions are first desugared into two reachability premises sharing a
fresh variable.

The subterm theory and the root-step theory are generated separately and
appended by callers that need them.  Sort relativization turns sorted
quantifiers into explicit membership atoms and adds the membership clauses
induced by subsort pairs and function ranks.
"""
from __future__ import annotations

from .errors import EmptySortError
from .logic import Atom, HornClause, Theory, sort_predicate
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
    term_sort,
)


def compile_ctrs(ctrs: CTRS) -> Theory:
    """Compile a CTRS into its Horn theory over ``->`` and ``->*``."""
    sig = ctrs.signature
    clauses: list[HornClause] = []
    closure_sorts = rewrite_closure_sorts(ctrs)
    for sort in closure_sorts:
        x = Var("x", sort)
        clauses.append(HornClause((x,), (), Atom(MANY_STEPS, (x, x)), tag="Rf"))
    for sort in closure_sorts:
        x, y, z = Var("x", sort), Var("y", sort), Var("z", sort)
        clauses.append(
            HornClause(
                (x, y, z),
                (Atom(ARROW, (x, y)), Atom(MANY_STEPS, (y, z))),
                Atom(MANY_STEPS, (x, z)),
                tag="T",
            )
        )
    clauses.extend(congruence_clauses(sig))
    for index, rule in enumerate(ctrs.rules, start=1):
        clauses.append(rule_clause(sig, rule, ARROW, tag=f"Rp({index})"))
    _check_quantified_sorts(sig, clauses)
    return Theory(sig, tuple(clauses))


def congruence_clauses(sig: Signature) -> list[HornClause]:
    clauses = []
    for name, (arg_sorts, _result) in sig.functions.items():
        arity = len(arg_sorts)
        if arity == 0:
            continue
        for i in range(arity):
            xs = tuple(Var(f"x{j + 1}" if arity > 1 else "x", arg_sorts[j]) for j in range(arity))
            yi = Var(f"y{i + 1}" if arity > 1 else "y", arg_sorts[i])
            lhs_args: tuple[Term, ...] = xs
            rhs_args = tuple(yi if j == i else xs[j] for j in range(arity))
            clauses.append(
                HornClause(
                    (*xs, yi),
                    (Atom(ARROW, (xs[i], yi)),),
                    Atom(ARROW, (App(name, lhs_args), App(name, rhs_args))),
                    tag=f"C({name},{i + 1})",
                )
            )
    return clauses


def rule_clause(sig: Signature, rule: ConditionalRule, head_predicate: str, tag: str) -> HornClause:
    """The clause ``s1 ->* t1 /\\ ... /\\ sn ->* tn => lhs -> rhs`` for one rule.

    Joinability conditions become two reachability premises with a fresh
    shared variable; fresh variables are named w1, w2, ... deterministically,
    skipping names already used by the rule.
    """
    taken = {v.name for v in rule.variables()}
    fresh_index = 0

    def fresh(sort: str) -> Var:
        nonlocal fresh_index
        while True:
            fresh_index += 1
            name = f"w{fresh_index}"
            if name not in taken:
                taken.add(name)
                return Var(name, sort)

    body: list[Atom] = []
    for s, t in rule.conditions:
        if rule.condition_semantics == JOIN:
            sort = _common_sort(sig, s, t)
            w = fresh(sort)
            body.append(Atom(MANY_STEPS, (s, w)))
            body.append(Atom(MANY_STEPS, (t, w)))
        else:
            body.append(Atom(MANY_STEPS, (s, t)))
    head = Atom(head_predicate, (rule.lhs, rule.rhs))
    variables: dict[Var, None] = {}
    for atom in (*body, head):
        for v in atom.variables():
            variables.setdefault(v)
    # Quantify in rule-reading order: lhs, rhs, then conditions.
    ordered: dict[Var, None] = {}
    for v in rule.variables():
        ordered.setdefault(v)
    for v in variables:
        ordered.setdefault(v)
    return HornClause(tuple(ordered), tuple(body), head, tag=tag)


def _common_sort(sig: Signature, s: Term, t: Term) -> str:
    a, b = term_sort(sig, s), term_sort(sig, t)
    common = sig.lub(a, b)
    if common is None:
        raise EmptySortError(f"joinability condition relates unrelated sorts '{a}' and '{b}'")
    return common


def rewrite_closure_sorts(ctrs: CTRS) -> tuple[str, ...]:
    """Sorts at which the reflexivity and transitivity clauses quantify.

    Unsorted systems use the single sort.  Sorted systems use the maximal
    sorts of every subsort component containing a rule's left-hand-side
    sort; with no rules, all maximal sorts.
    """
    sig = ctrs.signature
    if sig.single_sorted:
        return sig.sorts
    if not ctrs.rules:
        out: list[str] = []
        for sort in sig.sorts:
            for m in sig.maximal_sorts(sig.kind_of(sort)):
                if m not in out:
                    out.append(m)
        return tuple(out)
    components: list[frozenset[str]] = []
    for rule in ctrs.rules:
        comp = sig.kind_of(term_sort(sig, rule.lhs))
        if comp not in components:
            components.append(comp)
    out = []
    for comp in components:
        for m in sig.maximal_sorts(comp):
            if m not in out:
                out.append(m)
    return tuple(out)


def subterm_theory(sig: Signature) -> tuple[HornClause, ...]:
    """Reflexivity, transitivity, and per-argument projections for ``|>``."""
    clauses: list[HornClause] = []
    sorts: list[str] = []
    for sort in sig.sorts:
        for m in sig.maximal_sorts(sig.kind_of(sort)):
            if m not in sorts:
                sorts.append(m)
    for sort in sorts:
        x = Var("x", sort)
        clauses.append(HornClause((x,), (), Atom(SUBTERM, (x, x)), tag="Subterm"))
    for sort in sorts:
        x, y, z = Var("x", sort), Var("y", sort), Var("z", sort)
        clauses.append(
            HornClause(
                (x, y, z),
                (Atom(SUBTERM, (x, y)), Atom(SUBTERM, (y, z))),
                Atom(SUBTERM, (x, z)),
                tag="Subterm",
            )
        )
    for name, (arg_sorts, _result) in sig.functions.items():
        arity = len(arg_sorts)
        if arity == 0:
            continue
        xs = tuple(Var(f"x{j + 1}" if arity > 1 else "x", arg_sorts[j]) for j in range(arity))
        for i in range(arity):
            clauses.append(
                HornClause(xs, (), Atom(SUBTERM, (App(name, xs), xs[i])), tag="Subterm")
            )
    return tuple(clauses)


def root_theory(ctrs: CTRS) -> tuple[HornClause, ...]:
    """Rule clauses concluding ``->^`` and nothing else.

    Root steps are not propagated below the root, so there is no
    reflexivity, transitivity, or congruence for ``->^``; conditions are
    still evaluated with ``->*``.
    """
    return tuple(
        rule_clause(ctrs.signature, rule, ROOT_STEP, tag=f"Root({index})")
        for index, rule in enumerate(ctrs.rules, start=1)
    )


def relativize_sorts(theory: Theory) -> Theory:
    """Add sort-membership atoms to each clause of a many-sorted theory.

    Single-sort theories are returned unchanged.  Each clause quantifying
    ``x:s`` gains the body atom ``S_s(x)``; membership clauses for subsort
    pairs and function ranks are appended with tag SortMembership.
    """
    sig = theory.signature
    if sig.single_sorted or theory.relativized:
        return theory
    clauses: list[HornClause] = []
    for clause in theory.clauses:
        sort_atoms = tuple(Atom(sort_predicate(v.sort), (v,)) for v in clause.variables)
        clauses.append(
            HornClause(clause.variables, sort_atoms + clause.body, clause.head, tag=clause.tag)
        )
    for sub, sup in sig.subsort_pairs:
        x = Var("x", sub)
        clauses.append(
            HornClause(
                (x,),
                (Atom(sort_predicate(sub), (x,)),),
                Atom(sort_predicate(sup), (x,)),
                tag="SortMembership",
            )
        )
    for name, (arg_sorts, result) in sig.functions.items():
        arity = len(arg_sorts)
        xs = tuple(Var(f"x{j + 1}" if arity > 1 else "x", arg_sorts[j]) for j in range(arity))
        body = tuple(Atom(sort_predicate(s), (x,)) for x, s in zip(xs, arg_sorts))
        clauses.append(
            HornClause(
                xs,
                body,
                Atom(sort_predicate(result), (App(name, xs),)),
                tag="SortMembership",
            )
        )
    return Theory(sig, tuple(clauses), relativized=True)


def _check_quantified_sorts(sig: Signature, clauses: list[HornClause]) -> None:
    inhabited = sig.inhabited_sorts()
    for clause in clauses:
        for v in clause.variables:
            if v.sort not in inhabited:
                raise EmptySortError(
                    f"sort '{v.sort}' has no ground terms; "
                    "the signature must contain at least a constant symbol for it"
                )
