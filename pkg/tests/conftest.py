import random

import pytest

from dcident import keys, params


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(scope="session")
def toy_keys():
    return keys.keygen(params.TOY, random.Random(7))


@pytest.fixture(scope="session")
def p81_keys():
    return keys.keygen(params.P81, random.Random(81))


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record a PASS/FAIL line for an acceptance criterion, then assert it."""

    def check(number, name, ok, detail=""):
        line = "%s criterion %d: %s%s" % ("PASS" if ok else "FAIL", number, name, (" | " + detail) if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return check


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
