from pathlib import Path

import pytest
from hypothesis import settings

from nestdet import catalog

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

DATA = Path(__file__).parent / "data"


@pytest.fixture
def verma():
    return catalog.graph("verma")


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def criterion(request):
    """Context manager recording one PASS/FAIL line per acceptance criterion."""
    from contextlib import contextmanager

    log = request.config.__dict__.setdefault("_acceptance", {})

    @contextmanager
    def check(number: int, title: str):
        try:
            yield
        except BaseException as exc:
            reason = str(exc).strip().splitlines()[0] if str(exc).strip() else type(exc).__name__
            log[number] = f"FAIL  criterion {number:>2}: {title} -- {reason}"
            raise
        log[number] = f"PASS  criterion {number:>2}: {title}"

    return check


def pytest_terminal_summary(terminalreporter, config):
    log = config.__dict__.get("_acceptance")
    if log:
        terminalreporter.section("acceptance criteria")
        for k in sorted(log):
            terminalreporter.write_line(log[k])
