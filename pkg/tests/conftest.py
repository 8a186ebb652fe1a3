import functools

from adiwave.convergence import run_case
from adiwave.manufactured import ManufacturedCase


@functools.lru_cache(maxsize=None)
def cached_run(scheme, gamma, N):
    """Full 5-period manufactured run at the default config, shared across modules."""
    return run_case(scheme, ManufacturedCase.standard(gamma), N)


ACCEPTANCE_LINES = []


def report(criterion, passed, detail):
    """Record one acceptance verdict; shown at the end of the pytest run."""
    line = f"criterion {criterion}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
