import sys
from pathlib import Path

import numpy as np
import pytest

from svmer.data import Dataset

ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = ROOT / "data"
BENCHMARK_FILES = {
    "hdds": "processed.cleveland.data",
    "bcds": "wdbc.data",
    "ids": "ionosphere.data",
}

# oracles.py lives next to the tests
sys.path.insert(0, str(Path(__file__).parent))


def blobs(n_per_class=20, gap=3.0, dim=2, seed=0):
    """Two Gaussian clouds centered at -gap/2 and +gap/2 on every axis."""
    rng = np.random.default_rng(seed)
    neg = rng.normal(-gap / 2, 0.5, size=(n_per_class, dim))
    pos = rng.normal(gap / 2, 0.5, size=(n_per_class, dim))
    X = np.vstack([neg, pos])
    y = np.r_[-np.ones(n_per_class, int), np.ones(n_per_class, int)]
    return Dataset(X, y, name="blobs")


@pytest.fixture
def blob_set():
    return blobs()


def require_benchmarks():
    missing = [f for f in BENCHMARK_FILES.values() if not (DATA_DIR / f).exists()]
    if missing:
        pytest.fail(
            f"benchmark files missing from {DATA_DIR}: {missing}; "
            "run `python3 scripts/prepare_datasets.py` first"
        )
    return DATA_DIR


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])
