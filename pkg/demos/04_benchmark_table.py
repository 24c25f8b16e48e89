"""SVM-ER against Gaussian Naive Bayes on the three benchmark files.

Run: python3 demos/04_benchmark_table.py [seed]
"""

import sys
from pathlib import Path

from svmer.evaluation import format_table1, run_table1

data_dir = Path(__file__).resolve().parent.parent / "data"
seed = int(sys.argv[1]) if len(sys.argv) > 1 else 42

report = run_table1({"data_dir": str(data_dir), "seed": seed})
print(format_table1(report))

for e in report["datasets"]:
    d = e["delta"]
    print(f"{e['id']:5s} SVM-ER minus naive: recall {d['recall']:+.3f}, precision {d['precision']:+.3f}; "
          f"SVM epochs {e['svm_epochs']}, converged {e['svm_converged']}")

print("\nwith the negative class as positive:")
for e in report["datasets"]:
    s, n = e["class_swapped"]["svm_er"], e["class_swapped"]["naive"]
    print(f"{e['id']:5s} recall {s['recall']:.3f} vs {n['recall']:.3f}, precision {s['precision']:.3f} vs {n['precision']:.3f}")
