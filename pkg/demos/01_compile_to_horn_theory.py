"""From rewrite rules to Horn clauses.

A conditional rewrite system is a set of rules l -> r <= s1 == t1, ...
whose conditions must be reachable before the rule fires.  Its one-step
and many-step rewrite relations are exactly characterized by a small Horn
theory: reflexivity and transitivity of ->*, one congruence clause per
function argument, and one clause per rule whose premises are the
conditions read as ->* atoms.
"""
from pathlib import Path

from countermodel import compile_ctrs, format_theory, parse_ctrs, root_theory, subterm_theory
from countermodel.logic import format_clause

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

intro = parse_ctrs((CORPUS / "intro.trs").read_text())
print("== two-constant system ==")
print(format_theory(compile_ctrs(intro)))

print()
print("== unary f and g (seven sentences) ==")
fig3 = parse_ctrs((CORPUS / "fig3.trs").read_text())
print(format_theory(compile_ctrs(fig3)))

print()
print("== subterm clauses for the same signature ==")
for clause in subterm_theory(fig3.signature):
    print(f"{format_clause(clause)}  [{clause.tag}]")

print()
print("== root-step clauses: no closure below the root ==")
root = parse_ctrs((CORPUS / "root_f.trs").read_text())
for clause in root_theory(root):
    print(f"{format_clause(clause)}  [{clause.tag}]")
