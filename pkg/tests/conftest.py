import contextlib
import time

import pytest

_RESULTS_KEY = pytest.StashKey[list]()


class _Criterion:
    def __init__(self):
        self.detail = ""


@pytest.fixture
def criterion(request):
    """Context manager that records one PASS/FAIL line per acceptance criterion."""
    results = request.config.stash.setdefault(_RESULTS_KEY, [])

    @contextlib.contextmanager
    def run(number, title):
        c = _Criterion()
        start = time.perf_counter()
        try:
            yield c
        except BaseException as exc:
            msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
            line = f"criterion {number:>2} FAIL  {title}: {c.detail or msg}"
            raise
        else:
            line = f"criterion {number:>2} PASS  {title}: {c.detail}"
        finally:
            line += f" [{time.perf_counter() - start:.1f}s]"
            results.append((number, line))
            print(line)

    return run


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_RESULTS_KEY, [])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(results):
        terminalreporter.write_line(line)
