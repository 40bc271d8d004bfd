"""The bounded rewriting oracle and the model-oracle bridge.

Saturation derives ground rewriting atoms bottom-up from the inference
rules, over all ground terms within a size bound and proofs within a depth
bound.  It under-approximates rewriting: everything derived is real.  Two
consistency facts follow for any verified countermodel:

  * every derived atom must evaluate to true in the countermodel
    (atoms survive the homomorphism from the least Herbrand model), and
  * no disproved ground atom may ever be derived.

Both are checked mechanically here against a synthesized disproof.
"""
from pathlib import Path

from countermodel import parse_query, saturate
from countermodel.pipeline import disprove, oracle_cross_check
from countermodel.structures import eval_atom
from countermodel.trs_format import parse_ctrs_document

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

document = parse_ctrs_document((CORPUS / "intro.trs").read_text())
ctrs = document.ctrs

print("Saturation of the two-constant system (term size <= 1, depth <= 5):")
atoms = saturate(ctrs, 1, 5)
for atom in sorted(map(str, atoms.atoms)):
    print(f"   {atom}")
print("   note: a -> b is absent; its condition c ->* b is underivable.")

print()
query = parse_query("a -> b", ctrs.signature)
result = disprove(ctrs, query)
assert result.succeeded
structure = result.certificate.structure
print("Synthesized countermodel evaluates every derived atom to true:")
for atom in sorted(atoms.atoms, key=str):
    if atom.predicate in structure.predicates:
        print(f"   {str(atom):16s} -> {eval_atom(structure, {}, atom)}")

violations = oracle_cross_check(ctrs, result.certificate)
print(f"\noracle cross-check violations: {list(violations) or 'none'}")

print()
print("Depths grow with proof height (conditions included):")
fig3 = parse_ctrs_document((CORPUS / "fig3.trs").read_text()).ctrs
for atom, depth in sorted(saturate(fig3, 2, 4).atoms.items(), key=lambda kv: (kv[1], str(kv[0]))):
    print(f"   depth {depth}: {atom}")
