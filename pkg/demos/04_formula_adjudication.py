"""Check closed-form energy formulas against the numeric series.

Every reading of the doubtful coefficients in the second-order formula is
tried; the report says which readings reproduce the numeric sums. The ladder
expansions of W_H and W_K are checked the same way.
"""
from pdmosc import oracle
from pdmosc.model import ModelParams

adj = oracle.adjudicate(ModelParams(m1=0.05))
for v in adj.verdicts:
    print(f"{v.verdict:>20}  {v.question}")
    if v.note:
        print(" " * 22 + v.note)

print()
for which, tpl in adj.corrected_templates.items():
    print(f"reading that matches for {which.value}: {tpl.label()}")

print()
for d in adj.ladder:
    print(f"{d.max_deviation:10.2e}  {d.printed_form}")

q = adj.quartic_coefficient_fit
print(f"\nK quartic coefficient: best fit {q['fit_with_corrected_words']:.10g}, sigma {q['sigma']:.10g}")

with open("adjudication.json", "w") as fh:
    fh.write(adj.to_json())
print("full report written to adjudication.json")
