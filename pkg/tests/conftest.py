import math
import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))
os.environ.setdefault("PRIMEGEO_OFFLINE", "1")

from primegeo.chamber import BoxSpec  # noqa: E402
from primegeo.harvest import Harvester, SweepConfig  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def fact_cache_path() -> Path:
    return FIXTURES / "fieldfacts.json"


@pytest.fixture(scope="session")
def harvest_11():
    """(1,1), S={2,3}: the largest criterion-6 box, harvested once."""
    cfg = SweepConfig(3, (1, 1), (2, 3), BoxSpec((1e4,), "multiplicative"))
    return Harvester(cfg).run()


@pytest.fixture(scope="session")
def harvest_30():
    """(3,0), S={2,3}: the largest criterion-7 box, harvested once."""
    cfg = SweepConfig(3, (3, 0), (2, 3), BoxSpec((300.0, 300.0), "multiplicative"))
    return Harvester(cfg).run()


def log_box(*t: float) -> BoxSpec:
    return BoxSpec(tuple(math.exp(v) for v in t), "multiplicative")


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
