import hypothesis
import numpy as np
import pytest

from uavbs.rf import Airspace, RadioConfig, SharingPolicy

hypothesis.settings.register_profile("ci", max_examples=200, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=25, deadline=None)
hypothesis.settings.load_profile("ci")

np.seterr(all="raise", under="ignore")


@pytest.fixture
def airspace():
    return Airspace()


@pytest.fixture
def radio():
    return RadioConfig()


@pytest.fixture
def noss():
    return SharingPolicy.noss(50.0, -73.0)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance(capsys):
    """Record one PASS/FAIL line per criterion and return the verdict."""

    def report(tag: str, ok: bool, detail: str) -> bool:
        line = f"{tag} {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print(f"\n    {line}")
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
