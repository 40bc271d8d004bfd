"""Synthesizing countermodels instead of writing them by hand.

The finder enumerates small interpretation templates: finite interval
carriers with carrier-clamped affine tables, or integer rays with
unclamped affine functions, both combined with a menu of linear predicate
templates and a raw-table fallback on two-element domains.  Every
candidate that survives pruning is re-checked by the verifier before it is
returned, so whatever comes back is a certified disproof.
"""
from pathlib import Path

from countermodel import parse_query, serialize_model
from countermodel.pipeline import disprove
from countermodel.trs_format import parse_ctrs_document

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

CASES = [
    ("intro.trs", "a -> b", "a never rewrites to b in one step"),
    ("pair_gf.trs", "FEASIBLE(g(x) == f(a, b))", "the duplicating-g condition is infeasible"),
    ("hg.trs", "FEASIBLE(h(x) == b)", "h(x) never reaches b"),
    ("fab.trs", "JOINABLE(a, b)", "a and b are not joinable"),
    ("loop_cb.trs", "LOOPING(a)", "a is non-looping"),
    ("loop_cb.trs", "CYCLING()", "the system is non-cycling (needs a ray!)"),
]

for system_file, query_text, claim in CASES:
    document = parse_ctrs_document((CORPUS / system_file).read_text())
    query = parse_query(query_text, document.ctrs.signature, document.var_sorts)
    result = disprove(document.ctrs, query)
    print(f"== {claim}")
    if not result.succeeded:
        print(f"   no countermodel found: {result.reasons}")
        continue
    print(f"   disproved with a {result.backend} structure:")
    for line in serialize_model(result.certificate.structure).strip().splitlines():
        print(f"     {line}")
    print()

print("A property that actually holds cannot be disproved, at any budget:")
document = parse_ctrs_document((CORPUS / "intro.trs").read_text())
query = parse_query("REACHABLE(b, a)", document.ctrs.signature)  # b -> a is a rule
result = disprove(document.ctrs, query)
print(f"   {'succeeded?!' if result.succeeded else 'correctly failed: ' + '; '.join(result.reasons)}")
