"""Search for structures satisfying a theory and all obligations.

The finite finder enumerates interval carriers, interpreting constants as
carrier elements, functions as carrier-clamped affine templates, and
predicates from a template menu, with a raw-table fallback on tiny domains.
The symbolic finder enumerates ray carriers with unclamped affine function
templates (filtered for carrier closure) and the same predicate menu.

Search runs depth-first over interpretation slots ordered predicates,
then constants, then functions; every theory clause and obligation is
attached to the last slot interpreting one of its symbols and is used to
prune partial assignments (by exhaustive evaluation on finite carriers,
by integer grid sampling on rays).  Every complete candidate is re-checked
through the verifier, so no unverified structure is ever returned;
obligations are evaluated before theory clauses since they are usually the
cheapest refuters.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .checker import Certificate, VERIFIED, verify
from .logic import Atom, HornClause, Theory, sort_of_predicate
from .queries import Obligation
from .structures import (
    AffineForm,
    FiniteStructure,
    PiecewiseFunction,
    PredicateInterp,
    Ray,
    Structure,
    SymbolicStructure,
)
from .terms import App, BUILTIN_PREDICATES, Signature, Term, Var


@dataclass(frozen=True)
class SearchBudget:
    """Knobs of the model search; the defaults cover the bundled corpus."""

    carriers: tuple[tuple[int, int], ...] = ((0, 1), (0, 2), (0, 3), (-1, 1))
    coeff_min: int = -2
    coeff_max: int = 2
    base_relations: tuple[str, ...] = ("=", "<=", ">=", "<", ">")
    pair_coeff_min: int = -5
    pair_coeff_max: int = 5
    pair_const_min: int = -2
    pair_const_max: int = 2
    raw_table_max_size: int = 2
    raw_table_max_arity: int = 2
    ray_carriers: tuple[int, ...] = (0, -1, 1)
    time_limit: float = 60.0
    max_nodes: int = 2_000_000


@dataclass(frozen=True)
class FindOutcome:
    structure: Structure | None
    certificate: Certificate | None
    reason: str | None
    nodes: int

    @property
    def found(self) -> bool:
        return self.structure is not None


class _Stop(Exception):
    def __init__(self, reason: str):
        self.reason = reason


@dataclass
class _Candidate:
    interp: object  # what goes into the structure
    fast: object  # int for constants, callable for functions/predicates


@dataclass
class _Slot:
    kind: str  # "pred" | "const" | "func"
    name: str
    candidates: list[_Candidate]


@dataclass
class _State:
    budget: SearchBudget
    started: float = field(default_factory=time.monotonic)
    nodes: int = 0

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            raise _Stop("budget exhausted: candidate cap")
        if self.nodes % 256 == 0 and time.monotonic() - self.started > self.budget.time_limit:
            raise _Stop("budget exhausted: time cap")


def find_model(
    theory: Theory, obligations: Iterable[Obligation], budget: SearchBudget | None = None
) -> FindOutcome:
    """Search interval carriers for a verified finite structure."""
    budget = budget or SearchBudget()
    obligations = tuple(obligations)
    sig = theory.signature
    predicates = _needed_predicates(theory, obligations)
    state = _State(budget)
    try:
        for lo, hi in budget.carriers:
            carrier = tuple(range(lo, hi + 1))
            stages = ["template"]
            if len(carrier) <= budget.raw_table_max_size and all(
                len(args) <= budget.raw_table_max_arity for args, _ in sig.functions.values()
            ):
                stages.append("raw")
            for stage in stages:
                slots = _finite_slots(sig, predicates, carrier, budget, stage)
                found = _search(
                    slots,
                    theory,
                    obligations,
                    state,
                    points=carrier,
                    finish=lambda assignment: _finish_finite(
                        sig, carrier, assignment, theory, obligations
                    ),
                )
                if found is not None:
                    return FindOutcome(found[0], found[1], None, state.nodes)
    except _Stop as stop:
        return FindOutcome(None, None, stop.reason, state.nodes)
    return FindOutcome(None, None, "budget exhausted: search space", state.nodes)


def find_symbolic_model(
    theory: Theory, obligations: Iterable[Obligation], budget: SearchBudget | None = None
) -> FindOutcome:
    """Search ray carriers for a verified symbolic structure."""
    budget = budget or SearchBudget()
    obligations = tuple(obligations)
    sig = theory.signature
    predicates = _needed_predicates(theory, obligations)
    state = _State(budget)
    try:
        for lo in budget.ray_carriers:
            slots = _symbolic_slots(sig, predicates, lo, budget)
            grid = tuple(range(lo, lo + 4))
            found = _search(
                slots,
                theory,
                obligations,
                state,
                points=grid,
                finish=lambda assignment: _finish_symbolic(
                    sig, lo, assignment, theory, obligations
                ),
            )
            if found is not None:
                return FindOutcome(found[0], found[1], None, state.nodes)
    except _Stop as stop:
        return FindOutcome(None, None, stop.reason, state.nodes)
    return FindOutcome(None, None, "budget exhausted: search space", state.nodes)


def _needed_predicates(theory: Theory, obligations: tuple[Obligation, ...]) -> tuple[str, ...]:
    used = {
        atom.predicate
        for clause in theory.clauses
        for atom in (*clause.body, clause.head)
    }
    used.update(atom.predicate for ob in obligations for atom in ob.atoms)
    return tuple(p for p in BUILTIN_PREDICATES if p in used)


# -- slot construction ----------------------------------------------------------


def _finite_slots(
    sig: Signature,
    predicates: tuple[str, ...],
    carrier: tuple[int, ...],
    budget: SearchBudget,
    stage: str,
) -> list[_Slot]:
    slots: list[_Slot] = []
    if stage == "template":
        pred_candidates = _menu_predicates_finite(carrier, budget)
    else:
        pred_candidates = _raw_predicates(carrier)
    for name in predicates:
        slots.append(_Slot("pred", name, pred_candidates))
    const_candidates = [_Candidate(v, v) for v in carrier]
    for name, (args, _result) in sig.functions.items():
        if not args:
            slots.append(_Slot("const", name, const_candidates))
    for name, (args, _result) in sig.functions.items():
        if args:
            if stage == "template":
                candidates = _template_tables(len(args), carrier, budget)
            else:
                candidates = _raw_tables(len(args), carrier)
            slots.append(_Slot("func", name, candidates))
    return slots


def _symbolic_slots(
    sig: Signature, predicates: tuple[str, ...], lo: int, budget: SearchBudget
) -> list[_Slot]:
    slots: list[_Slot] = []
    pred_candidates = _menu_predicates_symbolic(budget)
    for name in predicates:
        slots.append(_Slot("pred", name, pred_candidates))
    const_candidates = [
        _Candidate(v, v)
        for v in range(max(budget.coeff_min, lo), budget.coeff_max + 1)
    ]
    for name, (args, _result) in sig.functions.items():
        if not args:
            slots.append(_Slot("const", name, const_candidates))
    for name, (args, _result) in sig.functions.items():
        if args:
            slots.append(_Slot("func", name, _affine_candidates(len(args), lo, budget)))
    return slots


def _menu_relations(budget: SearchBudget) -> list[tuple[str, tuple[int, int, int] | None]]:
    menu: list[tuple[str, tuple[int, int, int] | None]] = [
        (rel, None) for rel in budget.base_relations
    ]
    for a in range(budget.pair_coeff_min, budget.pair_coeff_max + 1):
        for b in range(budget.pair_coeff_min, budget.pair_coeff_max + 1):
            for c in range(budget.pair_const_min, budget.pair_const_max + 1):
                menu.append(("pair", (a, b, c)))
    return menu


def _relation_test(rel: str, payload: tuple[int, int, int] | None) -> Callable[[int, int], bool]:
    if rel == "=":
        return lambda x, y: x == y
    if rel == "<=":
        return lambda x, y: x <= y
    if rel == ">=":
        return lambda x, y: x >= y
    if rel == "<":
        return lambda x, y: x < y
    if rel == ">":
        return lambda x, y: x > y
    a, b, c = payload  # type: ignore[misc]
    return lambda x, y: a * x + b * y <= c


def _relation_interp(rel: str, payload: tuple[int, int, int] | None) -> PredicateInterp:
    from .linear import LinearConstraint

    x, y = "x", "y"
    if rel == "=":
        constraints = (
            LinearConstraint.make({x: 1, y: -1}, 0),
            LinearConstraint.make({x: -1, y: 1}, 0),
        )
    elif rel == "<=":
        constraints = (LinearConstraint.make({x: 1, y: -1}, 0),)
    elif rel == ">=":
        constraints = (LinearConstraint.make({x: -1, y: 1}, 0),)
    elif rel == "<":
        constraints = (LinearConstraint.make({x: 1, y: -1}, 0, strict=True),)
    elif rel == ">":
        constraints = (LinearConstraint.make({x: -1, y: 1}, 0, strict=True),)
    else:
        a, b, c = payload  # type: ignore[misc]
        constraints = (LinearConstraint.make({x: a, y: b}, c),)
    return PredicateInterp((x, y), constraints)


def _menu_predicates_finite(carrier: tuple[int, ...], budget: SearchBudget) -> list[_Candidate]:
    seen: set[frozenset[tuple[int, int]]] = set()
    out: list[_Candidate] = []
    for rel, payload in _menu_relations(budget):
        test = _relation_test(rel, payload)
        extension = frozenset(
            (x, y) for x in carrier for y in carrier if test(x, y)
        )
        if extension in seen:
            continue
        seen.add(extension)
        out.append(_Candidate(extension, lambda x, y, e=extension: (x, y) in e))
    return out


def _menu_predicates_symbolic(budget: SearchBudget) -> list[_Candidate]:
    out = []
    for rel, payload in _menu_relations(budget):
        out.append(_Candidate(_relation_interp(rel, payload), _relation_test(rel, payload)))
    return out


def _raw_predicates(carrier: tuple[int, ...]) -> list[_Candidate]:
    pairs = sorted(itertools.product(carrier, repeat=2))
    out = []
    for mask in range(1 << len(pairs)):
        extension = frozenset(p for i, p in enumerate(pairs) if mask >> i & 1)
        out.append(_Candidate(extension, lambda x, y, e=extension: (x, y) in e))
    return out


def _template_tables(arity: int, carrier: tuple[int, ...], budget: SearchBudget) -> list[_Candidate]:
    lo, hi = carrier[0], carrier[-1]
    rng = range(budget.coeff_min, budget.coeff_max + 1)
    seen: set[tuple] = set()
    out = []
    for coeffs in itertools.product(rng, repeat=arity):
        for b in rng:
            table = {}
            for point in itertools.product(carrier, repeat=arity):
                value = sum(a * x for a, x in zip(coeffs, point)) + b
                table[point] = min(max(value, lo), hi)
            key = tuple(sorted(table.items()))
            if key in seen:
                continue
            seen.add(key)
            out.append(_Candidate(table, lambda *args, t=table: t[args]))
    return out


def _raw_tables(arity: int, carrier: tuple[int, ...]) -> list[_Candidate]:
    keys = sorted(itertools.product(carrier, repeat=arity))
    out = []
    for values in itertools.product(carrier, repeat=len(keys)):
        table = dict(zip(keys, values))
        out.append(_Candidate(table, lambda *args, t=table: t[args]))
    return out


def _affine_candidates(arity: int, lo: int, budget: SearchBudget) -> list[_Candidate]:
    rng = range(budget.coeff_min, budget.coeff_max + 1)
    out = []
    for coeffs in itertools.product(rng, repeat=arity):
        if any(a < 0 for a in coeffs):
            continue  # negative slope escapes a ray carrier
        for b in rng:
            if sum(a * lo for a in coeffs) + b < lo:
                continue  # value at the carrier infimum must stay inside
            params = tuple(f"x{i + 1}" for i in range(arity))
            form = AffineForm.make(dict(zip(params, coeffs)), b)
            interp = PiecewiseFunction.affine(params, form)
            out.append(
                _Candidate(
                    interp,
                    lambda *args, cs=coeffs, b=b: sum(a * x for a, x in zip(cs, args)) + b,
                )
            )
    return out


# -- staged depth-first search ----------------------------------------------------


def _search(
    slots: list[_Slot],
    theory: Theory,
    obligations: tuple[Obligation, ...],
    state: _State,
    points: tuple[int, ...],
    finish: Callable[[dict[str, object]], tuple[Structure, Certificate] | None],
) -> tuple[Structure, Certificate] | None:
    position = {slot.name: index for index, slot in enumerate(slots)}
    checks_by_slot: list[list[tuple[str, object]]] = [[] for _ in slots]
    for ob in obligations:
        index = _latest_slot(position, _obligation_symbols(ob))
        if index is not None:
            checks_by_slot[index].append(("obligation", ob))
    for clause in theory.clauses:
        index = _latest_slot(position, _clause_symbols(clause))
        if index is not None:
            checks_by_slot[index].append(("clause", clause))

    env: dict[str, object] = {}
    interps: dict[str, object] = {}

    def descend(index: int) -> tuple[Structure, Certificate] | None:
        if index == len(slots):
            state.tick()
            return finish(interps)
        slot = slots[index]
        for candidate in slot.candidates:
            state.tick()
            env[slot.name] = candidate.fast
            interps[slot.name] = candidate.interp
            if all(
                not _refuted(env, points, kind, payload)
                for kind, payload in checks_by_slot[index]
            ):
                result = descend(index + 1)
                if result is not None:
                    return result
        env.pop(slot.name, None)
        interps.pop(slot.name, None)
        return None

    return descend(0)


def _clause_symbols(clause: HornClause) -> set[str]:
    symbols: set[str] = set()
    for atom in (*clause.body, clause.head):
        if sort_of_predicate(atom.predicate) is None:
            symbols.add(atom.predicate)
        for arg in atom.args:
            _term_symbols(arg, symbols)
    return symbols


def _obligation_symbols(ob: Obligation) -> set[str]:
    symbols: set[str] = set()
    for atom in ob.atoms:
        if sort_of_predicate(atom.predicate) is None:
            symbols.add(atom.predicate)
        for arg in atom.args:
            _term_symbols(arg, symbols)
    return symbols


def _term_symbols(term: Term, acc: set[str]) -> None:
    if isinstance(term, App):
        acc.add(term.symbol)
        for a in term.args:
            _term_symbols(a, acc)


def _latest_slot(position: Mapping[str, int], symbols: set[str]) -> int | None:
    indices = [position[s] for s in symbols if s in position]
    if len(indices) < len(symbols):
        return None  # mentions a symbol the search does not interpret
    return max(indices) if indices else None


def _refuted(
    env: Mapping[str, object], points: tuple[int, ...], kind: str, payload
) -> bool:
    """Exact grid falsification; sort atoms hold by construction of candidates."""
    if kind == "obligation":
        variables, body, head = payload.variables, payload.atoms, None
    else:
        variables, body, head = payload.variables, payload.body, payload.head
    names = [v.name for v in variables]
    for values in itertools.product(points, repeat=len(names)):
        valuation = dict(zip(names, values))
        if not all(_atom_true(env, valuation, atom) for atom in body):
            continue
        if head is None or not _atom_true(env, valuation, head):
            return True
    return False


def _atom_true(env: Mapping[str, object], valuation: Mapping[str, int], atom: Atom) -> bool:
    if sort_of_predicate(atom.predicate) is not None:
        return True
    test = env[atom.predicate]
    args = tuple(_eval_fast(env, valuation, a) for a in atom.args)
    return test(*args)  # type: ignore[operator]


def _eval_fast(env: Mapping[str, object], valuation: Mapping[str, int], term: Term) -> int:
    if isinstance(term, Var):
        return valuation[term.name]
    interp = env[term.symbol]
    if not term.args:
        return interp  # type: ignore[return-value]
    args = tuple(_eval_fast(env, valuation, a) for a in term.args)
    return interp(*args)  # type: ignore[operator]


# -- candidate completion -----------------------------------------------------------


def _finish_finite(
    sig: Signature,
    carrier: tuple[int, ...],
    interps: Mapping[str, object],
    theory: Theory,
    obligations: tuple[Obligation, ...],
) -> tuple[Structure, Certificate] | None:
    carriers = {sort: carrier for sort in sig.sorts}
    functions: dict[str, Mapping[tuple[int, ...], int]] = {}
    for name, (args, _result) in sig.functions.items():
        if args:
            functions[name] = interps[name]  # type: ignore[assignment]
        else:
            functions[name] = {(): interps[name]}  # type: ignore[dict-item]
    predicates = {
        name: interp
        for name, interp in interps.items()
        if name in BUILTIN_PREDICATES
    }
    structure = FiniteStructure(sig, carriers, functions, predicates)
    certificate = verify(theory, obligations, structure)
    if certificate.overall == VERIFIED:
        return structure, certificate
    return None


def _finish_symbolic(
    sig: Signature,
    lo: int,
    interps: Mapping[str, object],
    theory: Theory,
    obligations: tuple[Obligation, ...],
) -> tuple[Structure, Certificate] | None:
    carriers = {sort: Ray(lo) for sort in sig.sorts}
    functions: dict[str, PiecewiseFunction] = {}
    for name, (args, _result) in sig.functions.items():
        if args:
            functions[name] = interps[name]  # type: ignore[assignment]
        else:
            functions[name] = PiecewiseFunction.affine((), AffineForm.const(interps[name]))  # type: ignore[arg-type]
    predicates = {
        name: interp
        for name, interp in interps.items()
        if name in BUILTIN_PREDICATES
    }
    structure = SymbolicStructure(sig, carriers, functions, predicates)
    certificate = verify(theory, obligations, structure)
    if certificate.overall == VERIFIED:
        return structure, certificate
    return None
