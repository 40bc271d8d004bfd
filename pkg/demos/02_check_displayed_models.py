"""Checking structures as disproofs.

Any model of the system's Horn theory that also satisfies the negation of
an existential positive property witnesses that the property fails for
actual rewriting: satisfaction of such properties travels along the
homomorphism from the least Herbrand model into every model, so if some
model refutes the property, so does rewriting itself.

This script verifies a gallery of hand-written structures: finite tables,
integer rays with affine functions, and a guarded piecewise division
model, then shows how a broken structure is pinpointed.
"""
from pathlib import Path

from countermodel import parse_model, parse_query, verify
from countermodel.pipeline import required_predicates, theory_for_query
from countermodel.queries import negate_to_obligations
from countermodel.trs_format import parse_ctrs_document

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

GALLERY = [
    ("intro.trs", "a -> b", "intro_restricted.model", "one-step reachability of b from a"),
    ("fab.trs", "JOINABLE(a, b)", "fab_nonjoin.model", "joinability of a and b"),
    ("fig3.trs", "FEASIBLE(f(x) == x)", "fig3_feas.model", "feasibility of f(x) ->* x"),
    ("loop_cb.trs", "CYCLING()", "loop_noncycl.model", "existence of a cycle"),
    ("loop_cb.trs", "LOOPING(a)", "loop_nonloop.model", "loopingness of a"),
    ("root_f.trs", "EXISTS x y . f(x) ->^ y", "root_irred.model", "root reducibility of f(t)"),
    ("division.trs", (CORPUS / "queries" / "division_ccp.q").read_text().strip(),
     "division.model", "feasibility of the division critical pair"),
]

for system_file, query_text, model_file, label in GALLERY:
    document = parse_ctrs_document((CORPUS / system_file).read_text())
    query = parse_query(query_text, document.ctrs.signature, document.var_sorts)
    theory = theory_for_query(document.ctrs, query)
    obligations = negate_to_obligations(query)
    structure = parse_model(
        (CORPUS / "models" / model_file).read_text(),
        document.ctrs.signature,
        required_predicates=required_predicates(theory, obligations),
    )
    cert = verify(theory, obligations, structure)
    print(f"{label:32s} {model_file:24s} -> {cert.overall}")

print()
print("A structure that is not closed is rejected, with the escape point:")
document = parse_ctrs_document((CORPUS / "pair_gf.trs").read_text())
query = parse_query("FEASIBLE(g(x) == f(a, b))", document.ctrs.signature)
theory = theory_for_query(document.ctrs, query)
structure = parse_model(
    (CORPUS / "models" / "pair_gf_printed.model").read_text(), document.ctrs.signature
)
cert = verify(theory, negate_to_obligations(query), structure)
print(f"  {cert.overall}: {cert.first_failure()}")
