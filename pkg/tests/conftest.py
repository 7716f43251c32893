import numpy as np
import pytest
from hypothesis import settings

from growth_lab.set_arith import FpSet

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def random_fpset(rng, p, size, exclude=()):
    pool = np.setdiff1d(np.arange(p), np.array([e % p for e in exclude], dtype=np.int64))
    return FpSet(p, rng.choice(pool, size=size, replace=False))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# Acceptance tests record (passed, detail) parts per criterion; one line per
# criterion is printed at the end of the run.
ACCEPTANCE_RESULTS: dict[int, list[tuple[bool, str]]] = {}


def acceptance_lines() -> list[str]:
    lines = []
    for k in sorted(ACCEPTANCE_RESULTS):
        parts = ACCEPTANCE_RESULTS[k]
        verdict = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        lines.append(f"criterion {k}: {verdict}: " + "; ".join(text for _, text in parts))
    return lines


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance_lines():
        terminalreporter.write_line(line)
