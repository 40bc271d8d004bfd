from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest

from countermodel.linear import (
    ConstraintSystem,
    LinearConstraint,
    equality,
    integer_tighten,
    is_infeasible,
    solve,
)


def le(coeffs, bound):
    return LinearConstraint.make(coeffs, bound)


def lt(coeffs, bound):
    return LinearConstraint.make(coeffs, bound, strict=True)


def system(variables, *constraints):
    flat = []
    for c in constraints:
        flat.extend(c if isinstance(c, tuple) else (c,))
    return ConstraintSystem(tuple(variables), tuple(flat))


def test_antisymmetry_is_infeasible():
    sys_ = system("xy", lt({"x": 1, "y": -1}, 0), le({"y": 1, "x": -1}, 0))
    assert is_infeasible(sys_)


def test_ordered_chain_into_negative_is_infeasible():
    # x >= 1, x <= y, y <= -1
    sys_ = system(
        "xy",
        le({"x": -1}, -1),
        le({"x": 1, "y": -1}, 0),
        le({"y": 1}, -1),
    )
    assert is_infeasible(sys_)


def test_doubling_equation_with_decrease_is_infeasible():
    # v = 2x + 2, v <= x, x >= -1; hand elimination: 2x + 2 <= x gives x <= -2.
    sys_ = system(
        "vx",
        equality({"v": 1, "x": -2}, 2),
        le({"v": 1, "x": -1}, 0),
        le({"x": -1}, 1),
    )
    assert is_infeasible(sys_)
    # cross-check by sampling the claimed-empty region
    for x in range(-10, 11):
        v = 2 * x + 2
        assert not (v <= x and x >= -1)


def test_feasible_witness_satisfies_every_constraint():
    sys_ = system(
        "xyz",
        le({"x": 1, "y": 1}, 3),
        lt({"y": -1, "z": 2}, 7),
        equality({"x": 1, "z": -1}, 0),
    )
    outcome = solve(sys_)
    assert outcome.status == "feasible"
    witness = outcome.witness
    for c in sys_.constraints:
        total = sum(witness[v] * coeff for v, coeff in c.terms)
        assert total < c.bound if c.strict else total <= c.bound


def test_equality_stored_as_two_inequalities():
    first, second = equality({"x": 1}, 3)
    assert not first.strict and not second.strict
    assert first.terms == (("x", Fraction(1)),) and first.bound == 3
    assert second.terms == (("x", Fraction(-1)),) and second.bound == -3


def test_tighten_strict_integer():
    sys_ = system("xy", lt({"x": 1, "y": -1}, 0))
    (c,) = integer_tighten(sys_).constraints
    assert not c.strict and c.bound == -1  # x - y <= -1, i.e. x <= y - 1


def test_tighten_scales_fractional_coefficients():
    sys_ = system("x", lt({"x": Fraction(1, 2)}, 1))
    (c,) = integer_tighten(sys_).constraints
    # x/2 < 1 scales to x < 2 and tightens to x <= 1
    assert c.terms == (("x", Fraction(1)),) and c.bound == 1 and not c.strict
    for x in range(-5, 6):
        assert (Fraction(x, 2) < 1) == (x <= 1)


def test_tighten_keeps_nonstrict_systems_unchanged():
    sys_ = system("xy", le({"x": 1, "y": 1}, 2), le({"x": -1}, 0))
    assert integer_tighten(sys_) == sys_


def test_budget_exhaustion_reports_unknown_never_infeasible():
    variables = [f"x{i}" for i in range(9)]
    constraints = []
    for i, j in itertools.combinations(range(9), 2):
        constraints.append(le({variables[i]: 1, variables[j]: 1}, 1))
        constraints.append(le({variables[i]: -1, variables[j]: -1}, 1))
    sys_ = ConstraintSystem(tuple(variables), tuple(constraints))
    outcome = solve(sys_, max_constraints=200)
    assert outcome.status == "unknown"
    assert "budget" in outcome.reason
    assert not is_infeasible(sys_, max_constraints=200)


def random_system(rng: random.Random) -> ConstraintSystem:
    k = rng.randint(1, 4)
    variables = tuple(f"x{i}" for i in range(k))
    constraints = []
    for _ in range(rng.randint(1, 6)):
        coeffs = {v: rng.randint(-5, 5) for v in variables}
        bound = rng.randint(-5, 5)
        kind = rng.random()
        if kind < 0.2:
            constraints.extend(equality(coeffs, bound))
        elif kind < 0.6:
            constraints.append(le(coeffs, bound))
        else:
            constraints.append(lt(coeffs, bound))
    return ConstraintSystem(variables, tuple(constraints))


@pytest.mark.parametrize("seed", range(60))
def test_infeasible_verdicts_confirmed_on_integer_box(seed):
    rng = random.Random(10_000 + seed)
    sys_ = random_system(rng)
    outcome = solve(sys_)
    if outcome.status == "infeasible":
        box = range(-6, 7)
        for point in itertools.product(box, repeat=len(sys_.variables)):
            assignment = dict(zip(sys_.variables, point))
            assert not sys_.satisfied_by(assignment)
    elif outcome.status == "feasible":
        assert sys_.satisfied_by(outcome.witness)


@pytest.mark.parametrize("seed", range(40))
def test_verdict_independent_of_elimination_order(seed):
    rng = random.Random(20_000 + seed)
    sys_ = random_system(rng)
    forward = solve(sys_, elimination_order=sys_.variables)
    backward = solve(sys_, elimination_order=tuple(reversed(sys_.variables)))
    assert forward.status == backward.status


def test_trivially_false_constant_constraint():
    sys_ = ConstraintSystem((), (le({}, -1),))
    assert is_infeasible(sys_)
    assert solve(ConstraintSystem((), (lt({}, 0),))).status == "infeasible"
    assert solve(ConstraintSystem((), (le({}, 0),))).status == "feasible"


def test_unbounded_variable_gets_integer_witness():
    outcome = solve(system("x", le({"x": -1}, -3)))  # x >= 3
    assert outcome.status == "feasible"
    assert outcome.witness["x"] == 3
