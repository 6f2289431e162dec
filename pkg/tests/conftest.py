import pytest

from bellpoly.hull import facets
from bellpoly.scenario import Scenario, vertex_matrix

SCENARIOS = {name: Scenario.parse(name) for name in ("2,2", "2,3", "2,4", "3,3", "2,2,2")}


@pytest.fixture(scope="session")
def scenarios():
    return SCENARIOS


@pytest.fixture(scope="session")
def vertices():
    return {name: vertex_matrix(sc) for name, sc in SCENARIOS.items()}


@pytest.fixture(scope="session")
def small_facets(vertices):
    """Double-description facets of every scenario except (2,2,2)."""
    return {name: facets(vertices[name]) for name in SCENARIOS if name != "2,2,2"}


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record():
    """Log one acceptance line per criterion; printed after the run."""

    def _record(criterion: str, ok: bool, detail: str) -> bool:
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {criterion}: {detail}")
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
