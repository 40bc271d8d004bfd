"""Independent integer-box enumeration used to audit linear-engine verdicts.

Vectorized staged enumeration: variables are assigned one level at a time,
with each level's scan range narrowed per partial assignment by bounds
propagation over the remaining variables' intervals.  The final level is
checked exactly, so the result is precisely "does the box contain an
integer solution", computed without the elimination machinery under test.
"""
from __future__ import annotations

import numpy as np

from countermodel.linear import ConstraintSystem


def box_has_integer_point(
    system: ConstraintSystem, lo: int = -20, hi: int = 20, row_cap: int = 30_000_000
) -> bool:
    variables = list(system.variables)
    if not variables:
        return all(
            (0 < c.bound if c.strict else 0 <= c.bound) for c in system.constraints
        )
    cons = []
    for c in system.constraints:
        scale = c.bound.denominator
        coeffs = {v: int(k * scale) for v, k in c.terms}
        cons.append((coeffs, int(c.bound * scale), c.strict))

    intervals = {v: [lo, hi] for v in variables}
    for coeffs, bound, strict in cons:
        items = [(v, c) for v, c in coeffs.items() if c]
        if len(items) != 1:
            continue
        v, c = items[0]
        t = bound - (1 if strict else 0)
        if c > 0:
            intervals[v][1] = min(intervals[v][1], t // c)
        else:
            intervals[v][0] = max(intervals[v][0], -(t // -c))
    if any(a > b for a, b in intervals.values()):
        return False
    occurs = {v: sum(1 for cf, _, _ in cons if cf.get(v)) for v in variables}
    variables.sort(key=lambda v: (intervals[v][1] - intervals[v][0], -occurs[v]))

    rows = np.zeros((1, 0), dtype=np.int64)
    for level, v in enumerate(variables):
        assigned = variables[:level]
        rest = variables[level + 1 :]
        lb = np.full(len(rows), intervals[v][0], dtype=np.int64)
        ub = np.full(len(rows), intervals[v][1], dtype=np.int64)
        for coeffs, bound, strict in cons:
            c = coeffs.get(v, 0)
            if not c:
                continue
            fixed = np.zeros(len(rows), dtype=np.int64)
            for j, u in enumerate(assigned):
                cu = coeffs.get(u, 0)
                if cu:
                    fixed += cu * rows[:, j]
            res_min = sum(
                min(coeffs.get(u, 0) * intervals[u][0], coeffs.get(u, 0) * intervals[u][1])
                for u in rest
            )
            t = bound - fixed - res_min - (1 if strict else 0)
            if c > 0:
                np.minimum(ub, t // c, out=ub)
            else:
                np.maximum(lb, -(t // -c), out=lb)
        lengths = np.maximum(ub - lb + 1, 0)
        total = int(lengths.sum())
        if total == 0:
            return False
        if total > row_cap:
            raise RuntimeError(f"enumeration row cap exceeded ({total})")
        idx = np.repeat(np.arange(len(rows)), lengths)
        starts = np.repeat(lb, lengths)
        offsets = np.arange(total) - np.repeat(np.cumsum(lengths) - lengths, lengths)
        rows = np.column_stack([rows[idx], starts + offsets])

    alive = np.ones(len(rows), dtype=bool)
    for coeffs, bound, strict in cons:
        total = np.zeros(len(rows), dtype=np.int64)
        for j, u in enumerate(variables):
            cu = coeffs.get(u, 0)
            if cu:
                total += cu * rows[:, j]
        alive &= (total < bound) if strict else (total <= bound)
        if not alive.any():
            return False
    return bool(alive.any())
