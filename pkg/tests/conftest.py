import time

import pytest

_LINES: dict[str, tuple[int, str]] = {}


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line for an acceptance criterion.

    Usage: ``criterion(n, title, ok, detail)``.  A test that dies before
    reporting is recorded as a failure.
    """
    started = time.perf_counter()
    seen = []

    def report(n: int, title: str, ok: bool, detail: str = "") -> bool:
        elapsed = time.perf_counter() - started
        status = "PASS" if ok else "FAIL"
        _LINES[request.node.nodeid] = (n, f"{status}  [{n:2d}] {title}: {detail} ({elapsed:.1f}s)")
        seen.append(n)
        return ok

    yield report
    if not seen:
        _LINES[request.node.nodeid] = (99, f"FAIL  {request.node.name}: did not complete")


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_LINES.values()):
            terminalreporter.write_line(line)
