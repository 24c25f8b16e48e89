#!/usr/bin/env python3
"""Materialize the three benchmark files in their UCI layouts.

Writes into ``data/`` (or ``--out``):

    processed.cleveland.data   heart disease, Cleveland   (hdds)
    wdbc.data                  breast cancer diagnostic   (bcds)
    ionosphere.data            ionosphere                 (ids)

Each file is fetched from the UCI repository first. When the repository
is unreachable the script rebuilds the same layout from copies that ship
inside PyPI packages: scikit-learn's bundled WDBC table, and the Cleveland
and Ionosphere tables inside the Orange3 wheel. The rebuilt files are
row-for-row the UCI data, but not byte-identical to the UCI downloads
(number formatting and the WDBC ID column differ), so their checksums are
listed separately in ``data/SHA256SUMS``.

Nothing in the library downloads at runtime; run this once before the
benchmark and acceptance suites.
"""

from __future__ import annotations

import argparse
import glob
import hashlib
import io
import subprocess
import sys
import tempfile
import urllib.request
import zipfile
from pathlib import Path

UCI_URLS = {
    "processed.cleveland.data": "https://archive.ics.uci.edu/ml/machine-learning-databases/heart-disease/processed.cleveland.data",
    "wdbc.data": "https://archive.ics.uci.edu/ml/machine-learning-databases/breast-cancer-wisconsin/wdbc.data",
    "ionosphere.data": "https://archive.ics.uci.edu/ml/machine-learning-databases/ionosphere/ionosphere.data",
}
ORANGE_WHEEL = "orange3==3.39.0"

# Cleveland integer codes for Orange's text categories
HEART_CODES = {
    1: {"female": "0", "male": "1"},
    2: {"typical ang": "1", "atypical ang": "2", "non-anginal": "3", "asymptomatic": "4"},
    6: {"normal": "0", "ST-T abnormal": "1", "left vent hypertrophy": "2"},
    10: {"upsloping": "1", "flat": "2", "downsloping": "3"},
    12: {"normal": "3", "fixed defect": "6", "reversable defect": "7"},
}


def try_uci(name: str, timeout: float = 10.0) -> bytes | None:
    try:
        with urllib.request.urlopen(UCI_URLS[name], timeout=timeout) as resp:
            return resp.read()
    except OSError:
        return None


def wdbc_from_sklearn() -> bytes:
    from sklearn.datasets import load_breast_cancer

    bunch = load_breast_cancer()
    out = io.StringIO()
    for i, (row, target) in enumerate(zip(bunch.data, bunch.target)):
        # sklearn: 0 = malignant, 1 = benign
        diag = "M" if target == 0 else "B"
        out.write(",".join([str(i + 1), diag] + [repr(float(v)) for v in row]) + "\n")
    return out.getvalue().encode()


def orange_tables() -> dict[str, str]:
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "-q", "-d", tmp, ORANGE_WHEEL],
            check=True,
        )
        wheel = glob.glob(str(Path(tmp) / "*.whl"))[0]
        with zipfile.ZipFile(wheel) as zf:
            return {
                "heart": zf.read("Orange/datasets/heart_disease.tab").decode(),
                "ionosphere": zf.read("Orange/tests/datasets/ionosphere.tab").decode(),
            }


def cleveland_from_orange(tab: str) -> bytes:
    lines = tab.splitlines()[3:]
    out = io.StringIO()
    for line in lines:
        cells = line.split("\t")
        row = [HEART_CODES[j][c] if j in HEART_CODES and c != "?" else c for j, c in enumerate(cells)]
        out.write(",".join(row) + "\n")
    return out.getvalue().encode()


def ionosphere_from_orange(tab: str) -> bytes:
    lines = tab.splitlines()[3:]
    return ("\n".join(",".join(line.split("\t")) for line in lines) + "\n").encode()


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    ap.add_argument("--offline", action="store_true", help="skip the UCI download attempt")
    args = ap.parse_args(argv)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    blobs: dict[str, tuple[bytes, str]] = {}
    for name in UCI_URLS:
        raw = None if args.offline else try_uci(name)
        if raw is not None:
            blobs[name] = (raw, "uci")

    missing = [n for n in UCI_URLS if n not in blobs]
    if "wdbc.data" in missing:
        blobs["wdbc.data"] = (wdbc_from_sklearn(), "scikit-learn")
    if {"processed.cleveland.data", "ionosphere.data"} & set(missing):
        tables = orange_tables()
        blobs.setdefault("processed.cleveland.data", (cleveland_from_orange(tables["heart"]), ORANGE_WHEEL))
        blobs.setdefault("ionosphere.data", (ionosphere_from_orange(tables["ionosphere"]), ORANGE_WHEEL))

    sums = []
    for name in sorted(blobs):
        raw, source = blobs[name]
        (out / name).write_bytes(raw)
        digest = hashlib.sha256(raw).hexdigest()
        sums.append(f"{digest}  {name}\n")
        print(f"{name:28s} {len(raw.splitlines()):4d} rows  from {source}  sha256={digest}")
    (out / "SHA256SUMS").write_text("".join(sums))
    return 0


if __name__ == "__main__":
    sys.exit(main())
