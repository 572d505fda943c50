#!/usr/bin/env python3
"""Download the real benchmark datasets into data/ as headered CSVs.

This sandbox image has no general internet access, so the test suite falls
back to the bundled synthetic surrogates; run this script on a connected
machine to put the real files in place, then rerun the benchmarks or the
real-data tests (they unskip themselves when the files exist).

Labels are written as +1/-1 in the last column:
  fourclass     LIBSVM "fourclass" (862 x 2), labels already +/-1
  breastcancer  UCI breast-cancer-wisconsin.data: rows with missing values
                dropped (683 x 9 remain), malignant (4) -> +1, benign (2) -> -1
  haberman      UCI haberman.data (306 x 3): died within 5 years (2) -> +1
"""

from __future__ import annotations

import argparse
import csv
import sys
import urllib.request
from pathlib import Path

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"
LIBSVM = "https://www.csie.ntu.edu.tw/~cjlin/libsvmtools/datasets/binary"

SOURCES = {
    "fourclass": f"{LIBSVM}/fourclass",
    "breastcancer": f"{UCI}/breast-cancer-wisconsin/breast-cancer-wisconsin.data",
    "haberman": f"{UCI}/haberman/haberman.data",
}


def fetch(url: str) -> list[str]:
    with urllib.request.urlopen(url, timeout=60) as resp:
        return resp.read().decode("utf-8").splitlines()


def write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def fourclass(out: Path) -> None:
    rows = []
    for line in fetch(SOURCES["fourclass"]):
        parts = line.split()
        if not parts:
            continue
        label = "1" if float(parts[0]) > 0 else "-1"
        feats = {int(k): v for k, v in (p.split(":") for p in parts[1:])}
        rows.append([feats.get(1, "0"), feats.get(2, "0"), label])
    write_csv(out / "fourclass.csv", ["f1", "f2", "label"], rows)


def breastcancer(out: Path) -> None:
    rows = []
    for line in fetch(SOURCES["breastcancer"]):
        parts = line.strip().split(",")
        if len(parts) != 11 or "?" in parts:
            continue
        label = "1" if parts[10] == "4" else "-1"
        rows.append(parts[1:10] + [label])
    write_csv(out / "breastcancer.csv", [f"f{i}" for i in range(1, 10)] + ["label"], rows)


def haberman(out: Path) -> None:
    rows = []
    for line in fetch(SOURCES["haberman"]):
        parts = line.strip().split(",")
        if len(parts) != 4:
            continue
        label = "1" if parts[3] == "2" else "-1"
        rows.append(parts[:3] + [label])
    write_csv(out / "haberman.csv", ["age", "year", "nodes", "label"], rows)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--out", default="data", help="output directory (default: data/)")
    parser.add_argument("--only", choices=sorted(SOURCES), action="append",
                        help="fetch just this dataset (repeatable)")
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    jobs = {"fourclass": fourclass, "breastcancer": breastcancer, "haberman": haberman}
    failures = 0
    for name in (args.only or sorted(jobs)):
        try:
            jobs[name](out)
        except Exception as exc:
            print(f"{name}: FAILED ({exc})", file=sys.stderr)
            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
