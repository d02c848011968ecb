import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ruledsurf.ambient import SpaceForm

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SPACE_FORMS = [SpaceForm.sphere(1.0), SpaceForm.sphere(2.0), SpaceForm.hyperbolic(1.0),
               SpaceForm.hyperbolic(2.0), SpaceForm.euclidean()]

_ACCEPTANCE_LINES = []


def lift_expr(sf, x):
    """First coordinate putting (x1, x) on the model of sf (x has three entries)."""
    if sf.is_euclidean:
        return "0"
    sq = "+".join(f"({e})**2" for e in x)
    r2 = f"{sf.r!r}**2"
    return f"sqrt({r2} - ({sq}))" if sf.kind == "sphere" else f"sqrt({r2} + ({sq}))"


@pytest.fixture
def acceptance_line():
    """Record one PASS/FAIL line per acceptance criterion; printed in the terminal summary."""

    def record(number, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
        print(line)
        _ACCEPTANCE_LINES.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
