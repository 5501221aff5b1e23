import functools
import json
from pathlib import Path

from gforge.cli import Session
from gforge.galgebra import GradedAlgebra
from gforge.problem import load_problem

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "gforge" / "fixtures"


def fixture_doc(name: str) -> dict:
    return json.loads((FIXTURES / f"{name}.json").read_text())


@functools.lru_cache(maxsize=None)
def _session(name: str, params: tuple, D, H) -> Session:
    return Session(load_problem(fixture_doc(name), dict(params), D=D, H=H))


def session(name: str, D=None, H=None, **params) -> Session:
    """Shared, cached pipeline state for a fixture."""
    return _session(name, tuple(sorted((k, str(v)) for k, v in params.items())), D, H)


def algebra(names, relations, bound=6, **kw) -> GradedAlgebra:
    return GradedAlgebra.from_strings(names, relations, bound, **kw)


CUBIC = ["x1*x1*x2 - x2*x1*x1", "x1*x2*x2 - x2*x2*x1"]


@functools.lru_cache(maxsize=None)
def cubic_A(bound=8) -> GradedAlgebra:
    return algebra(["x1", "x2"], CUBIC, bound)


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
