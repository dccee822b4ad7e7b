"""Regenerate the synthetic benchmark corpus shipped with the example model.

    python3 scripts/make_example_corpus.py > src/qme/data/example/corpus.csv
"""

from __future__ import annotations

import csv
import random
import sys

SEED = 20120602


def main() -> None:
    rng = random.Random(SEED)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["system_id", "measure_id", "value"])
    for i in range(40):
        sid = f"java-{i:02d}"
        out.writerow([sid, "core/clone-coverage", f"{min(0.57, rng.betavariate(1.2, 6.0)):.4f}"])
        nan = rng.choice([1, 2, 3]) / rng.uniform(2e5, 2e6) if i in (3, 17, 29) else 0.0
        out.writerow([sid, "java/doomed-nan@core/loc", f"{nan:.6g}"])
        out.writerow([sid, "java/float-equality@core/loc", f"{rng.lognormvariate(-11.8, 0.7):.6g}"])
        sid_eq = rng.lognormvariate(-12.5, 0.9) if rng.random() < 0.6 else 0.0
        out.writerow([sid, "java/string-identity@core/loc", f"{sid_eq:.6g}"])
        out.writerow([sid, "java/missing-javadoc@core/classes", f"{rng.uniform(0.05, 0.9):.4f}"])
    for i in range(8):
        sid = f"csharp-{i:02d}"
        out.writerow([sid, "core/clone-coverage", f"{min(0.57, rng.betavariate(1.2, 6.0)):.4f}"])
        out.writerow([sid, "csharp/float-equality@core/loc", f"{rng.lognormvariate(-11.5, 0.6):.6g}"])


if __name__ == "__main__":
    main()
