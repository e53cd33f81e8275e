import contextlib
import pathlib
import time

import pytest

DATA = pathlib.Path(__file__).parent / "data"

# criterion number -> (passed, detail), filled by test_acceptance.py
ACCEPTANCE: dict = {}


@contextlib.contextmanager
def criterion(number: int):
    """Record a pass/fail line for an acceptance criterion.

    The body may store a short summary under ``info["detail"]``.
    """
    info: dict = {}
    start = time.perf_counter()
    try:
        yield info
    except BaseException as exc:
        ACCEPTANCE[number] = (False, f"{type(exc).__name__}: {exc}".splitlines()[0][:160])
        raise
    elapsed = time.perf_counter() - start
    ACCEPTANCE[number] = (True, f"{info.get('detail', '')} ({elapsed:.2f} s)".strip())


@pytest.fixture
def data_dir() -> pathlib.Path:
    return DATA


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
