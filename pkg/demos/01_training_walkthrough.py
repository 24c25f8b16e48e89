"""Train the dual-weight SVM on small problems and look at what it learns.

Run: python3 demos/01_training_walkthrough.py
"""

import numpy as np

from svmer import Dataset, KernelSpec, TrainConfig, decision_value, geometric_margin, gram_matrix, train
from svmer.svm import predict_many

# Two points on a line. After one sweep pi = (1, 0); the second sweep
# changes nothing, so training stops.
pair = Dataset(np.array([[-1.0], [1.0]]), np.array([-1, 1]))
model, trace = train(pair, KernelSpec.linear(), TrainConfig())
print("pair weights:", model.dual_weights, "epochs:", trace.epochs)
print("f(-2), f(0.5):", decision_value(model, [-2.0]), decision_value(model, [0.5]))
print("margin:", geometric_margin(model))

# A noisier 2-D problem with an RBF kernel
rng = np.random.default_rng(3)
X = rng.uniform(-1, 1, size=(120, 2))
y = np.where(X[:, 0] ** 2 + X[:, 1] ** 2 < 0.45, 1, -1)
flip = rng.choice(120, 6, replace=False)
y[flip] *= -1
ring = Dataset(X, y, name="ring")

G = gram_matrix(KernelSpec.rbf(3.0), ring)
print("\nGram matrix", G.entries.shape, "smallest eigenvalue %.2e" % np.linalg.eigvalsh(G.entries).min())

for D in (0.1, 1.0, 10.0):
    model, trace = train(ring, KernelSpec.rbf(3.0), TrainConfig(penalty=D), gram=G)
    acc = (predict_many(model, X) == y).mean()
    at_bound = int((model.dual_weights == D).sum())
    print(f"D={D:5.1f}: {trace.epochs:4d} epochs, converged={trace.converged}, "
          f"{model.n_support:3d} support vectors ({at_bound} at D), train acc {acc:.3f}")

# The trace records per-epoch movement; the last lines show the settle-down
print("\n" + "\n".join(trace.to_csv().splitlines()[-3:]))

# A crude picture of the D=10 boundary on a grid
xs = np.linspace(-1, 1, 41)
grid = np.array([[a, b] for b in xs[::-1] for a in xs])
labels = predict_many(model, grid).reshape(41, 41)
print("\n".join("".join("#" if v > 0 else "." for v in row) for row in labels[::2, ::1]))
