import pytest

from hillspec.potential import make_potential, mathieu, truncated_sawtooth, zero_potential


@pytest.fixture(scope="session")
def zero():
    return zero_potential()


@pytest.fixture(scope="session")
def mat():
    return mathieu()


@pytest.fixture(scope="session")
def saw():
    return truncated_sawtooth()


@pytest.fixture(scope="session")
def one_sided():
    # Q = a e^{2ix}: the spectrum of every boundary problem is the free one
    return make_potential(0.0, {2: 0.7 + 0.3j})


_CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion(capsys):
    """Record one acceptance line; printed immediately and again in the summary."""
    def record(number: int, passed: bool, detail: str):
        line = f"CRITERION {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        _CRITERIA[number] = line
        with capsys.disabled():
            print("\n" + line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[k])
