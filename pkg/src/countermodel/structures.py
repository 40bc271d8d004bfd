"""Finite and symbolic piecewise-affine structures over the integers.

A finite structure interprets each sort as an explicit finite set of
integers, each function symbol as a total table, and each predicate as an
explicit set of tuples.  A symbolic structure interprets sorts as integer
rays ``{v >= lo}`` or intervals ``[lo, hi]``, functions as guarded
piecewise-affine mappings (with clamping expanded into guard cases at
construction time), and predicates as conjunctions of linear inequalities
over the argument positions.

Evaluation follows structural recursion; for symbolic backends the module
also lowers atoms into exact linear constraint systems, choosing one guard
case per function application, so the linear engine can decide them.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .errors import ModelError
from .linear import ConstraintSystem, LinearConstraint, equality, integer_tighten, solve
from .logic import Atom, sort_of_predicate
from .terms import App, Signature, Term, Var

# -- carriers -----------------------------------------------------------------


@dataclass(frozen=True)
class Ray:
    """The integers >= lo."""

    lo: int


@dataclass(frozen=True)
class Interval:
    """The integers from lo to hi inclusive."""

    lo: int
    hi: int

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ModelError(f"empty interval carrier [{self.lo}, {self.hi}]")


Carrier = Ray | Interval


def carrier_contains(carrier: Carrier, value: int) -> bool:
    if isinstance(carrier, Ray):
        return value >= carrier.lo
    return carrier.lo <= value <= carrier.hi


def carrier_values(carrier: Carrier) -> tuple[int, ...]:
    if isinstance(carrier, Ray):
        raise ModelError("a ray carrier cannot be enumerated")
    return tuple(range(carrier.lo, carrier.hi + 1))


def carrier_subset(inner: Carrier, outer: Carrier) -> bool:
    if isinstance(outer, Ray):
        return inner.lo >= outer.lo
    if isinstance(inner, Ray):
        return False
    return inner.lo >= outer.lo and inner.hi <= outer.hi


def carrier_constraints(carrier: Carrier, form: "AffineForm") -> list[LinearConstraint]:
    """Linear constraints stating that the affine form lies in the carrier."""
    out = [_form_le(form.negate(), Fraction(-carrier.lo))]
    if isinstance(carrier, Interval):
        out.append(_form_le(form, Fraction(carrier.hi)))
    return out


# -- affine forms and interpretations -----------------------------------------


@dataclass(frozen=True)
class AffineForm:
    """``sum(c * v) + constant`` with exact rational coefficients."""

    coeffs: tuple[tuple[str, Fraction], ...]
    constant: Fraction

    @staticmethod
    def make(coeffs: Mapping[str, Fraction | int], constant: Fraction | int = 0) -> "AffineForm":
        cleaned = tuple(
            sorted((v, Fraction(c)) for v, c in coeffs.items() if Fraction(c) != 0)
        )
        return AffineForm(cleaned, Fraction(constant))

    @staticmethod
    def variable(name: str) -> "AffineForm":
        return AffineForm(((name, Fraction(1)),), Fraction(0))

    @staticmethod
    def const(value: Fraction | int) -> "AffineForm":
        return AffineForm((), Fraction(value))

    def negate(self) -> "AffineForm":
        return AffineForm(tuple((v, -c) for v, c in self.coeffs), -self.constant)

    def subst(self, mapping: Mapping[str, "AffineForm"]) -> "AffineForm":
        coeffs: dict[str, Fraction] = {}
        constant = self.constant
        for v, c in self.coeffs:
            image = mapping[v]
            constant += c * image.constant
            for u, d in image.coeffs:
                coeffs[u] = coeffs.get(u, Fraction(0)) + c * d
        return AffineForm.make(coeffs, constant)

    def eval(self, assignment: Mapping[str, int]) -> Fraction:
        return sum(
            (c * assignment[v] for v, c in self.coeffs), Fraction(0)
        ) + self.constant

    def eval_int(self, assignment: Mapping[str, int]) -> int:
        value = self.eval(assignment)
        if value.denominator != 1:
            raise ModelError(f"affine form evaluates to non-integer {value}")
        return int(value)

    def is_constant(self) -> bool:
        return not self.coeffs


def _form_le(form: AffineForm, bound: Fraction, strict: bool = False) -> LinearConstraint:
    return LinearConstraint.make(dict(form.coeffs), bound - form.constant, strict)


def instantiate_constraint(
    constraint: LinearConstraint, mapping: Mapping[str, AffineForm]
) -> LinearConstraint:
    """Substitute affine forms for the constraint's variables."""
    coeffs: dict[str, Fraction] = {}
    shift = Fraction(0)
    for v, c in constraint.terms:
        image = mapping[v]
        shift += c * image.constant
        for u, d in image.coeffs:
            coeffs[u] = coeffs.get(u, Fraction(0)) + c * d
    return LinearConstraint.make(coeffs, constraint.bound - shift, constraint.strict)


def negate_constraint(constraint: LinearConstraint) -> LinearConstraint:
    """Complement of ``t <= b`` is ``-t < -b``; of ``t < b`` is ``-t <= -b``."""
    coeffs = {v: -c for v, c in constraint.terms}
    return LinearConstraint.make(coeffs, -constraint.bound, strict=not constraint.strict)


@dataclass(frozen=True)
class PiecewiseCase:
    guard: tuple[LinearConstraint, ...]
    value: AffineForm


@dataclass(frozen=True)
class PiecewiseFunction:
    """Guarded piecewise-affine interpretation over named parameters.

    Guards must cover the carrier product and be pairwise disjoint; this is
    enforced by closure checking, not at construction.
    """

    params: tuple[str, ...]
    cases: tuple[PiecewiseCase, ...]

    @staticmethod
    def affine(params: Iterable[str], form: AffineForm) -> "PiecewiseFunction":
        return PiecewiseFunction(tuple(params), (PiecewiseCase((), form),))

    @staticmethod
    def clamped(
        params: Iterable[str], form: AffineForm, lo: int, hi: int
    ) -> "PiecewiseFunction":
        """``clamp(form, lo, hi)`` expanded into three affine guard cases."""
        if lo > hi:
            raise ModelError(f"clamp interval [{lo}, {hi}] is empty")
        below = _form_le(form, Fraction(lo), strict=True)
        at_least_lo = _form_le(form.negate(), Fraction(-lo))
        at_most_hi = _form_le(form, Fraction(hi))
        above = _form_le(form.negate(), Fraction(-hi), strict=True)
        cases = (
            PiecewiseCase((below,), AffineForm.const(lo)),
            PiecewiseCase((at_least_lo, at_most_hi), form),
            PiecewiseCase((above,), AffineForm.const(hi)),
        )
        return PiecewiseFunction(tuple(params), cases)

    def eval(self, args: tuple[int, ...]) -> int:
        assignment = dict(zip(self.params, args))
        for case in self.cases:
            if all(c.satisfied_by(assignment) for c in case.guard):
                return case.value.eval_int(assignment)
        raise ModelError(f"no guard case applies at {args}")


@dataclass(frozen=True)
class PredicateInterp:
    """A conjunction of linear inequalities over the argument positions."""

    params: tuple[str, ...]
    constraints: tuple[LinearConstraint, ...]

    def holds(self, args: tuple[int, ...]) -> bool:
        assignment = dict(zip(self.params, args))
        return all(c.satisfied_by(assignment) for c in self.constraints)


# -- the two structure classes -------------------------------------------------


@dataclass(frozen=True)
class FiniteStructure:
    signature: Signature
    carriers: Mapping[str, tuple[int, ...]]
    functions: Mapping[str, Mapping[tuple[int, ...], int]]
    predicates: Mapping[str, frozenset[tuple[int, ...]]]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "carriers", {s: tuple(sorted(set(v))) for s, v in self.carriers.items()}
        )
        object.__setattr__(self, "functions", {f: dict(t) for f, t in self.functions.items()})
        object.__setattr__(
            self, "predicates", {p: frozenset(t) for p, t in self.predicates.items()}
        )

    def carrier(self, sort: str) -> tuple[int, ...]:
        if sort not in self.carriers:
            raise ModelError(f"no carrier for sort '{sort}'")
        return self.carriers[sort]


@dataclass(frozen=True)
class SymbolicStructure:
    signature: Signature
    carriers: Mapping[str, Carrier]
    functions: Mapping[str, PiecewiseFunction]
    predicates: Mapping[str, PredicateInterp]

    def __post_init__(self) -> None:
        object.__setattr__(self, "carriers", dict(self.carriers))
        object.__setattr__(self, "functions", dict(self.functions))
        object.__setattr__(self, "predicates", dict(self.predicates))

    def carrier(self, sort: str) -> Carrier:
        if sort not in self.carriers:
            raise ModelError(f"no carrier for sort '{sort}'")
        return self.carriers[sort]


Structure = FiniteStructure | SymbolicStructure


# -- evaluation ----------------------------------------------------------------


def eval_term(structure: Structure, valuation: Mapping[str, int], term: Term) -> int:
    """Value of a term under a valuation keyed by variable name."""
    if isinstance(term, Var):
        try:
            return valuation[term.name]
        except KeyError:
            raise ModelError(f"valuation does not cover variable '{term.name}'") from None
    args = tuple(eval_term(structure, valuation, a) for a in term.args)
    interp = structure.functions.get(term.symbol)
    if interp is None:
        raise ModelError(f"structure does not interpret function '{term.symbol}'")
    if isinstance(structure, FiniteStructure):
        try:
            return interp[args]
        except KeyError:
            raise ModelError(
                f"table of '{term.symbol}' has no entry at {args}"
            ) from None
    return interp.eval(args)


def eval_atom(structure: Structure, valuation: Mapping[str, int], atom: Atom) -> bool:
    sort = sort_of_predicate(atom.predicate)
    if sort is not None:
        value = eval_term(structure, valuation, atom.args[0])
        if isinstance(structure, FiniteStructure):
            return value in structure.carrier(sort)
        return carrier_contains(structure.carrier(sort), value)
    values = tuple(eval_term(structure, valuation, a) for a in atom.args)
    interp = structure.predicates.get(atom.predicate)
    if interp is None:
        raise ModelError(f"structure does not interpret predicate '{atom.predicate}'")
    if isinstance(structure, FiniteStructure):
        return values in interp
    return interp.holds(values)


# -- closure checking ----------------------------------------------------------


@dataclass(frozen=True)
class ClosureViolation:
    symbol: str
    detail: str
    point: tuple[int, ...] | None = None
    certain: bool = True

    def __str__(self) -> str:
        where = f" at {self.point}" if self.point is not None else ""
        return f"{self.symbol}: {self.detail}{where}"


def closure_check(structure: Structure) -> tuple[ClosureViolation, ...]:
    """Totality and carrier closure of every function interpretation.

    Finite structures are checked exhaustively; symbolic ones with one
    linear feasibility query per guard case (plus guard disjointness and
    coverage).
    """
    if isinstance(structure, FiniteStructure):
        return _closure_finite(structure)
    return _closure_symbolic(structure)


def _closure_finite(structure: FiniteStructure) -> tuple[ClosureViolation, ...]:
    sig = structure.signature
    violations: list[ClosureViolation] = []
    for sort in sig.sorts:
        if not structure.carrier(sort):
            violations.append(ClosureViolation(sort, "empty carrier"))
    for sub, sup in sig.subsort_pairs:
        if not set(structure.carrier(sub)) <= set(structure.carrier(sup)):
            violations.append(ClosureViolation(sub, f"carrier not included in '{sup}'"))
    for name, (arg_sorts, result) in sig.functions.items():
        table = structure.functions.get(name)
        if table is None:
            violations.append(ClosureViolation(name, "missing interpretation"))
            continue
        result_carrier = set(structure.carrier(result))
        for point in itertools.product(*(structure.carrier(s) for s in arg_sorts)):
            if point not in table:
                violations.append(ClosureViolation(name, "table has no entry", point))
            elif table[point] not in result_carrier:
                violations.append(
                    ClosureViolation(name, f"value {table[point]} outside carrier of '{result}'", point)
                )
    return tuple(violations)


def _closure_symbolic(structure: SymbolicStructure) -> tuple[ClosureViolation, ...]:
    sig = structure.signature
    violations: list[ClosureViolation] = []
    for sub, sup in sig.subsort_pairs:
        if not carrier_subset(structure.carrier(sub), structure.carrier(sup)):
            violations.append(ClosureViolation(sub, f"carrier not included in '{sup}'"))
    for name, (arg_sorts, result) in sig.functions.items():
        interp = structure.functions.get(name)
        if interp is None:
            violations.append(ClosureViolation(name, "missing interpretation"))
            continue
        params = interp.params
        bounds: list[LinearConstraint] = []
        for p, s in zip(params, arg_sorts):
            bounds.extend(carrier_constraints(structure.carrier(s), AffineForm.variable(p)))
        result_carrier = structure.carrier(result)
        # Each case's value must lie in the result carrier over its guard.
        for index, case in enumerate(interp.cases):
            for requirement in carrier_constraints(result_carrier, case.value):
                system = ConstraintSystem(
                    params,
                    tuple(bounds) + case.guard + (negate_constraint(requirement),),
                )
                outcome = solve(integer_tighten(system))
                if outcome.status == "feasible":
                    point = tuple(
                        int(outcome.witness.get(p, Fraction(0))) for p in params
                    )
                    violations.append(
                        ClosureViolation(
                            name, f"case {index + 1} can leave the carrier of '{result}'", point
                        )
                    )
                elif outcome.status == "unknown":
                    violations.append(
                        ClosureViolation(name, f"case {index + 1}: {outcome.reason}", certain=False)
                    )
        # Pairwise disjointness of guards.
        for i, j in itertools.combinations(range(len(interp.cases)), 2):
            system = ConstraintSystem(
                params,
                tuple(bounds) + interp.cases[i].guard + interp.cases[j].guard,
            )
            outcome = solve(integer_tighten(system))
            if outcome.status == "feasible":
                violations.append(
                    ClosureViolation(name, f"guards of cases {i + 1} and {j + 1} overlap")
                )
            elif outcome.status == "unknown":
                violations.append(ClosureViolation(name, str(outcome.reason), certain=False))
        # Coverage: no point of the carrier product may escape every guard.
        # A case with an empty guard covers everything, making the product
        # below empty, so the loop is skipped.
        for chosen in itertools.product(*(range(len(c.guard)) for c in interp.cases)):
            negated = tuple(
                negate_constraint(case.guard[pick])
                for case, pick in zip(interp.cases, chosen)
            )
            system = ConstraintSystem(params, tuple(bounds) + negated)
            outcome = solve(integer_tighten(system))
            if outcome.status == "feasible":
                point = tuple(int(outcome.witness.get(p, Fraction(0))) for p in params)
                violations.append(ClosureViolation(name, "guards do not cover the carrier", point))
                break
            if outcome.status == "unknown":
                violations.append(ClosureViolation(name, str(outcome.reason), certain=False))
                break
    return tuple(violations)


def materialize(structure: SymbolicStructure) -> FiniteStructure:
    """Evaluate a symbolic structure with finite interval carriers pointwise."""
    sig = structure.signature
    carriers: dict[str, tuple[int, ...]] = {}
    for sort in sig.sorts:
        carriers[sort] = carrier_values(structure.carrier(sort))
    universe = sorted({v for vs in carriers.values() for v in vs})
    functions: dict[str, dict[tuple[int, ...], int]] = {}
    for name, (arg_sorts, _result) in sig.functions.items():
        interp = structure.functions[name]
        table: dict[tuple[int, ...], int] = {}
        for point in itertools.product(*(carriers[s] for s in arg_sorts)):
            table[point] = interp.eval(point)
        functions[name] = table
    predicates: dict[str, frozenset[tuple[int, ...]]] = {}
    for name, interp in structure.predicates.items():
        arity = len(interp.params)
        predicates[name] = frozenset(
            point
            for point in itertools.product(universe, repeat=arity)
            if interp.holds(point)
        )
    return FiniteStructure(sig, carriers, functions, predicates)


# -- lowering atoms to constraint systems ---------------------------------------


class ClauseLowering:
    """Translate the atoms of one clause into linear constraint systems.

    Each distinct application of a function with several guard cases becomes
    a fresh intermediate variable (a "slot") whose defining constraints
    depend on the chosen case; single-case applications of non-constant
    functions become slots with one choice, and constants are inlined.  All
    other constraints are independent of the case choice.
    """

    def __init__(self, structure: SymbolicStructure, variables: tuple[Var, ...]):
        self.structure = structure
        self.variables = variables
        self.slots: list[tuple[Term, PiecewiseFunction, str, tuple[AffineForm, ...]]] = []
        self._forms: dict[Term, AffineForm] = {}
        self._base: list[LinearConstraint] = []
        for v in variables:
            self._forms[v] = AffineForm.variable(v.name)
            self._base.extend(
                carrier_constraints(structure.carrier(v.sort), AffineForm.variable(v.name))
            )

    def form(self, term: Term) -> AffineForm:
        if term in self._forms:
            return self._forms[term]
        assert isinstance(term, App)
        args = tuple(self.form(a) for a in term.args)
        interp = self.structure.functions.get(term.symbol)
        if interp is None:
            raise ModelError(f"structure does not interpret function '{term.symbol}'")
        if not term.args:
            form = AffineForm.const(interp.eval(()))
        else:
            name = f"@t{len(self.slots)}"
            self.slots.append((term, interp, name, args))
            form = AffineForm.variable(name)
        self._forms[term] = form
        return form

    def atom_constraints(self, atom: Atom) -> list[LinearConstraint]:
        """Constraints stating that the atom holds (independent of case choice)."""
        sort = sort_of_predicate(atom.predicate)
        if sort is not None:
            return carrier_constraints(self.structure.carrier(sort), self.form(atom.args[0]))
        interp = self.structure.predicates.get(atom.predicate)
        if interp is None:
            raise ModelError(f"structure does not interpret predicate '{atom.predicate}'")
        mapping = dict(zip(interp.params, (self.form(a) for a in atom.args)))
        return [instantiate_constraint(c, mapping) for c in interp.constraints]

    def case_counts(self) -> tuple[int, ...]:
        return tuple(len(interp.cases) for _, interp, _, _ in self.slots)

    def choices(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(n) for n in self.case_counts()))

    def choice_constraints(self, choice: tuple[int, ...]) -> list[LinearConstraint]:
        out: list[LinearConstraint] = []
        for (term, interp, name, args), pick in zip(self.slots, choice):
            case = interp.cases[pick]
            mapping = dict(zip(interp.params, args))
            for g in case.guard:
                out.append(instantiate_constraint(g, mapping))
            value = case.value.subst(mapping)
            coeffs = dict(value.coeffs)
            coeffs[name] = coeffs.get(name, Fraction(0)) - 1
            out.extend(equality(coeffs, -value.constant))
        return out

    def engine_variables(self) -> tuple[str, ...]:
        return tuple(name for _, _, name, _ in self.slots) + tuple(
            v.name for v in self.variables
        )

    def system(
        self, choice: tuple[int, ...], extra: Iterable[LinearConstraint]
    ) -> ConstraintSystem:
        constraints = (
            tuple(self._base) + tuple(self.choice_constraints(choice)) + tuple(extra)
        )
        return ConstraintSystem(self.engine_variables(), constraints)


def symbolic_atom_constraints(
    structure: SymbolicStructure, atom: Atom, case_choice: tuple[int, ...] = ()
) -> ConstraintSystem:
    """Constraint system for one atom under a chosen guard case per application.

    The system conjoins the carrier bounds of the atom's variables, the
    chosen guards and defining equations of intermediate values, and the
    predicate's inequalities instantiated at the evaluated argument forms.
    """
    lowering = ClauseLowering(structure, atom.variables())
    atom_cs = lowering.atom_constraints(atom)
    counts = lowering.case_counts()
    if not case_choice:
        case_choice = tuple(0 for _ in counts)
    if len(case_choice) != len(counts):
        raise ValueError(f"expected {len(counts)} case choices, got {len(case_choice)}")
    return lowering.system(case_choice, atom_cs)
