"""Regenerate the four-version result fixtures used by the compare regression test.

    python3 scripts/make_version_fixtures.py tests/fixtures/versions
"""

from __future__ import annotations

import sys
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

from qme import AdaptationGoal, Assessor, MeasurementDataset, adapt, load_model
from qme.reporting import kiviat_dumps, to_kiviat

# raw measure values per version; findings shrink and documentation grows
VERSIONS = {
    "2.0.1": dict(loc=410_000, classes=3_900, clones=0.034, nan=1, feq=2, streq=1, javadoc=560, exc=0.74),
    "2.1.0": dict(loc=436_000, classes=4_120, clones=0.029, nan=0, feq=2, streq=1, javadoc=520, exc=0.79),
    "2.2.0": dict(loc=452_000, classes=4_300, clones=0.024, nan=0, feq=1, streq=1, javadoc=470, exc=0.83),
    "2.2.1": dict(loc=455_000, classes=4_330, clones=0.021, nan=0, feq=1, streq=0, javadoc=420, exc=0.86),
}


def main(out: Path) -> None:
    root = resources.files("qme") / "data" / "example"
    model = load_model([Path(str(root / "model"))])
    goal = AdaptationGoal.load(Path(str(root / "goal.json")))
    tailored = adapt(model, goal, clock=lambda: datetime(1970, 1, 1, tzinfo=timezone.utc)).model
    assessor = Assessor(tailored)
    results = []
    for version, v in VERSIONS.items():
        raw = {
            "core/loc": v["loc"], "core/classes": v["classes"], "core/clone-coverage": v["clones"],
            "java/doomed-nan": v["nan"], "java/float-equality": v["feq"], "java/string-identity": v["streq"],
            "java/missing-javadoc": v["javadoc"], "java/exception-rating": v["exc"],
        }
        r = assessor.assess(MeasurementDataset(f"example-{version}", {k: float(x) for k, x in raw.items()}))
        (out / f"v{version}.json").write_text(r.dumps(), "utf-8")
        results.append(r)
        print(version, r.root.utility.lo, r.root_grade[0].continuous)
    (out / "kiviat.golden.json").write_text(kiviat_dumps(to_kiviat(results)), "utf-8")


if __name__ == "__main__":
    main(Path(sys.argv[1]))
