import sys
from importlib.resources import files
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from ctrs_nonconf.cops import parse_cops  # noqa: E402

settings.register_profile("repro", derandomize=True, deadline=None)
settings.load_profile("repro")

FIXTURES = files("ctrs_nonconf").joinpath("fixtures")


def fixture_path(number: int) -> Path:
    return Path(str(FIXTURES.joinpath(f"cops_{number}.trs")))


def load(number: int):
    return parse_cops(fixture_path(number).read_bytes())


@pytest.fixture
def cops320():
    return load(320)


@pytest.fixture
def cops271():
    return load(271)


@pytest.fixture
def cops262():
    return load(262)


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
