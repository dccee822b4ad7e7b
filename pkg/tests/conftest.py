from __future__ import annotations

import sys
from importlib import resources
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=150, deadline=None)
settings.load_profile("default")

EXAMPLE = Path(str(resources.files("qme") / "data" / "example"))
FIXTURES = Path(__file__).parent / "fixtures"

# acceptance outcomes, printed in the terminal summary
ACCEPTANCE: list[str] = []


@pytest.fixture(scope="session")
def example_dir() -> Path:
    return EXAMPLE


@pytest.fixture(scope="session")
def example_model():
    from qme import load_model

    return load_model([EXAMPLE / "model"])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
