import pytest

from sheafnet.complex import build_closure

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def path():
    """Three nodes in a row: the running example, 0 - 1 - 2."""
    return build_closure([(0, 1), (1, 2)])


@pytest.fixture
def triangle():
    return build_closure([(0, 1, 2)])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def criterion(request):
    """Context manager that logs one PASS/FAIL line per acceptance criterion."""
    import contextlib
    import time

    @contextlib.contextmanager
    def record(label, budget=None):
        start = time.perf_counter()
        try:
            yield
            elapsed = time.perf_counter() - start
            if budget is not None:
                assert elapsed < budget, f"took {elapsed:.1f}s, budget {budget}s"
        except BaseException as exc:
            line = f"FAIL  {label}: {type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}"
            ACCEPTANCE_LINES.append(line)
            print(line)
            raise
        line = f"PASS  {label} ({time.perf_counter() - start:.2f}s)"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return record
