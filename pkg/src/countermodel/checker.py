"""Decide whether a structure models a theory and satisfies all obligations.

Finite structures are checked by exhaustive valuation enumeration in
lexicographic order over the sorted carriers, so a failing clause comes
with the first counterexample valuation.  Symbolic structures are checked
through the linear engine: a clause holds when, for every combination of
function guard cases and every inequality of the head predicate, the
system "carrier bounds and body constraints and negated head inequality"
is infeasible.  Rational-only witnesses that cannot be confirmed at an
integer point yield the verdict "unknown" rather than "fails": the checker
never overclaims in either direction.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .errors import ModelError
from .linear import ConstraintSystem, LinearConstraint, integer_tighten, solve
from .logic import HornClause, Theory, format_clause
from .queries import Obligation
from .structures import (
    ClauseLowering,
    ClosureViolation,
    FiniteStructure,
    Structure,
    SymbolicStructure,
    carrier_contains,
    closure_check,
    eval_atom,
    negate_constraint,
)
from .terms import Var

HOLDS = "holds"
FAILS = "fails"
UNKNOWN = "unknown"

VERIFIED = "verified"
REFUTED = "refuted"


@dataclass(frozen=True)
class Verdict:
    status: str
    witness: tuple[tuple[str, int], ...] | None = None
    reason: str | None = None

    def __str__(self) -> str:
        if self.status == FAILS and self.witness is not None:
            binding = ", ".join(f"{n}={v}" for n, v in self.witness)
            return f"fails [{binding}]"
        if self.status == UNKNOWN and self.reason:
            return f"unknown ({self.reason})"
        return self.status


@dataclass(frozen=True)
class Certificate:
    """A re-checkable record of one verification run.

    ``overall`` is "verified" only when closure holds and every clause and
    obligation verdict is "holds"; any failure makes it "refuted" and any
    unresolved check makes it "unknown".
    """

    theory: Theory
    obligations: tuple[Obligation, ...]
    structure: Structure
    closure_violations: tuple[ClosureViolation, ...]
    clause_verdicts: tuple[Verdict, ...]
    obligation_verdicts: tuple[Verdict, ...]
    overall: str

    def first_failure(self) -> str | None:
        """Human-readable pointer to the first failing check, if any."""
        for violation in self.closure_violations:
            if violation.certain:
                return f"closure: {violation}"
        for clause, verdict in zip(self.theory.clauses, self.clause_verdicts):
            if verdict.status == FAILS:
                return f"clause [{clause.tag}] {format_clause(clause)}: {verdict}"
        for obligation, verdict in zip(self.obligations, self.obligation_verdicts):
            if verdict.status == FAILS:
                return f"obligation {obligation}: {verdict}"
        return None


def verify(
    theory: Theory, obligations: Iterable[Obligation], structure: Structure
) -> Certificate:
    """Closure check, then every clause, then every obligation."""
    obligations = tuple(obligations)
    violations = closure_check(structure)
    if any(v.certain for v in violations):
        return Certificate(theory, obligations, structure, violations, (), (), REFUTED)
    clause_verdicts = tuple(check_clause(structure, c) for c in theory.clauses)
    obligation_verdicts = tuple(check_obligation(structure, ob) for ob in obligations)
    statuses = [v.status for v in (*clause_verdicts, *obligation_verdicts)]
    if violations or FAILS in statuses or UNKNOWN in statuses:
        overall = REFUTED if FAILS in statuses else UNKNOWN
    else:
        overall = VERIFIED
    return Certificate(
        theory, obligations, structure, violations, clause_verdicts, obligation_verdicts, overall
    )


# -- finite backend -------------------------------------------------------------


def _valuations(
    structure: FiniteStructure, variables: tuple[Var, ...]
) -> Iterator[dict[str, int]]:
    pools = [structure.carrier(v.sort) for v in variables]
    for values in itertools.product(*pools):
        yield dict(zip((v.name for v in variables), values))


def check_clause(structure: Structure, clause: HornClause) -> Verdict:
    if isinstance(structure, FiniteStructure):
        return _check_clause_finite(structure, clause)
    return _check_clause_symbolic(structure, clause)


def check_obligation(structure: Structure, obligation: Obligation) -> Verdict:
    if isinstance(structure, FiniteStructure):
        return _check_obligation_finite(structure, obligation)
    return _check_obligation_symbolic(structure, obligation)


def _check_clause_finite(structure: FiniteStructure, clause: HornClause) -> Verdict:
    try:
        for valuation in _valuations(structure, clause.variables):
            if all(eval_atom(structure, valuation, a) for a in clause.body) and not eval_atom(
                structure, valuation, clause.head
            ):
                return Verdict(FAILS, witness=tuple(valuation.items()))
    except ModelError as exc:
        # A table can be silent on kind-level terms outside its rank domain.
        return Verdict(UNKNOWN, reason=str(exc))
    return Verdict(HOLDS)


def _check_obligation_finite(structure: FiniteStructure, obligation: Obligation) -> Verdict:
    try:
        for valuation in _valuations(structure, obligation.variables):
            if all(eval_atom(structure, valuation, a) for a in obligation.atoms):
                return Verdict(FAILS, witness=tuple(valuation.items()))
    except ModelError as exc:
        return Verdict(UNKNOWN, reason=str(exc))
    return Verdict(HOLDS)


# -- symbolic backend ------------------------------------------------------------


def _check_clause_symbolic(structure: SymbolicStructure, clause: HornClause) -> Verdict:
    lowering = ClauseLowering(structure, clause.variables)
    body_constraints: list[LinearConstraint] = []
    for atom in clause.body:
        body_constraints.extend(lowering.atom_constraints(atom))
    head_constraints = lowering.atom_constraints(clause.head)
    if not head_constraints:
        return Verdict(HOLDS)  # head is the trivially true relation
    unknown: Verdict | None = None
    for choice in lowering.choices():
        for negated in map(negate_constraint, head_constraints):
            system = lowering.system(choice, body_constraints + [negated])
            verdict = _refutation_verdict(structure, clause.variables, system, clause=clause)
            if verdict is None:
                continue
            if verdict.status == FAILS:
                return verdict
            unknown = unknown or verdict
    return unknown or Verdict(HOLDS)


def _check_obligation_symbolic(
    structure: SymbolicStructure, obligation: Obligation
) -> Verdict:
    lowering = ClauseLowering(structure, obligation.variables)
    constraints: list[LinearConstraint] = []
    for atom in obligation.atoms:
        constraints.extend(lowering.atom_constraints(atom))
    unknown: Verdict | None = None
    for choice in lowering.choices():
        system = lowering.system(choice, constraints)
        verdict = _refutation_verdict(structure, obligation.variables, system, obligation=obligation)
        if verdict is None:
            continue
        if verdict.status == FAILS:
            return verdict
        unknown = unknown or verdict
    return unknown or Verdict(HOLDS)


def _refutation_verdict(
    structure: SymbolicStructure,
    variables: tuple[Var, ...],
    system: ConstraintSystem,
    clause: HornClause | None = None,
    obligation: Obligation | None = None,
) -> Verdict | None:
    """None when the system is infeasible; otherwise a fails/unknown verdict.

    A rational witness is only reported as a failure after an integer point
    near it has been confirmed by direct evaluation; otherwise the verdict
    is "unknown" (the rational relaxation is satisfiable but the integer
    carriers may not be).
    """
    outcome = solve(integer_tighten(system))
    if outcome.status == "infeasible":
        return None
    if outcome.status == "unknown":
        return Verdict(UNKNOWN, reason=outcome.reason)
    witness = _integer_witness(structure, variables, outcome.witness, clause, obligation)
    if witness is not None:
        return Verdict(FAILS, witness=tuple(sorted(witness.items())))
    return Verdict(UNKNOWN, reason="rational witness only; integer status undecided")


def _integer_witness(
    structure: SymbolicStructure,
    variables: tuple[Var, ...],
    rational: Mapping[str, Fraction],
    clause: HornClause | None,
    obligation: Obligation | None,
) -> dict[str, int] | None:
    candidates: list[tuple[int, ...]] = []
    pools = []
    for v in variables:
        value = rational.get(v.name, Fraction(0))
        carrier = structure.carrier(v.sort)
        lo = value.numerator // value.denominator  # floor
        near = [lo - 1, lo, lo + 1, lo + 2]
        pool = sorted({n for n in near if carrier_contains(carrier, n)})
        if not pool:
            pool = [carrier.lo]
        pools.append(pool)
    for point in itertools.islice(itertools.product(*pools), 4096):
        candidates.append(point)
    for point in candidates:
        valuation = dict(zip((v.name for v in variables), point))
        try:
            if clause is not None:
                if all(
                    eval_atom(structure, valuation, a) for a in clause.body
                ) and not eval_atom(structure, valuation, clause.head):
                    return valuation
            elif obligation is not None:
                if all(eval_atom(structure, valuation, a) for a in obligation.atoms):
                    return valuation
        except ModelError:
            continue  # e.g. a guard gap outside the declared carriers
    return None
