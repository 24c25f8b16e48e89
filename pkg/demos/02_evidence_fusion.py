"""Fuse several pieces of graded evidence and read off a risk score.

Run: python3 demos/02_evidence_fusion.py
"""

from svmer.er import (
    AssessmentIndex, GradeSet, assign_masses, combine, combine_pairwise, final_beliefs,
    final_intersection_beliefs, risk_score,
)

grades = GradeSet(("low", "medium", "high"), (0.0, 0.5, 1.0))

evidence = [
    AssessmentIndex("firewall-logs", 0.8, (0.1, 0.6, 0.3)),
    AssessmentIndex("patch-level", 0.5, (0.0, 0.2, 0.8)),
    # this auditor gave only 70% of their belief; the rest is ignorance
    AssessmentIndex("audit", 0.6, (0.5, 0.2, 0.0)),
]

masses = [assign_masses(e) for e in evidence]
for e, m in zip(evidence, masses):
    print(f"{e.id:14s} assigned={tuple(round(x, 3) for x in m.assigned)} "
          f"unassigned={m.unassigned:.3f} (weight {m.weight_residual:.3f}, incomplete {m.incompleteness_residual:.3f})")

fused = combine(masses)
beliefs = final_beliefs(fused)
print("\nnormalization j = %.4f" % fused.normalization)
print("fused beliefs:", tuple(round(b, 4) for b in beliefs), "sum %.4f" % sum(beliefs))
r = risk_score(beliefs, grades)
print(f"risk score {r.score:.4f} in [{r.lower:.4f}, {r.upper:.4f}]")

# pairwise focal-set enumeration gives the same answer, only slower
slow = combine_pairwise(masses)
print("pairwise max difference: %.1e" % max(abs(a - b) for a, b in zip(slow.assigned, fused.assigned)))

# Overlapping grades: evidence may sit between "low" and "medium"
fuzzy = GradeSet(("low", "medium", "high"), (0.0, 0.5, 1.0), fuzzy=True)
ev = [
    AssessmentIndex("sensor-a", 0.7, (0.2, 0.3, 0.1), intersection_beliefs=(0.3, 0.1)),
    AssessmentIndex("sensor-b", 0.7, (0.1, 0.5, 0.2), intersection_beliefs=(0.1, 0.1)),
]
fused = combine([assign_masses(e) for e in ev])
b, inter = final_beliefs(fused), final_intersection_beliefs(fused)
r = risk_score(b, fuzzy, inter)
print("\nfuzzy beliefs", tuple(round(x, 3) for x in b), "overlaps", tuple(round(x, 3) for x in inter))
print(f"risk score {r.score:.4f} in [{r.lower:.4f}, {r.upper:.4f}]")
