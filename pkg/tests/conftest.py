from __future__ import annotations

import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(Path(__file__).resolve().parent))

from smarttaint.catalog import read_catalog  # noqa: E402
from smarttaint.frontend import parse_file  # noqa: E402

LISTINGS = ROOT / "corpus" / "listings"
MICRO = ROOT / "corpus" / "micro"

settings.register_profile(
    "repo", derandomize=True, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")

# filled by tests/test_acceptance.py, printed at the end of the session
CRITERIA: dict = {}


@pytest.fixture(scope="session")
def sensitive():
    """Catalog that adds ``sensitiveData`` as a source, as the small listings assume."""
    return read_catalog(LISTINGS / "sensitive.catalog")


@pytest.fixture
def listing():
    def load(name: str):
        return parse_file(LISTINGS / f"{name}.groovy")
    return load


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, title = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}")
