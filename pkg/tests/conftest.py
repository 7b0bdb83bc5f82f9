import numpy as np
import pytest

from expbern import EigenSystem


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_real_system(rng, n_max=10, lam_max=2.0, n_min=1):
    n = int(rng.integers(n_min, n_max + 1))
    lams = rng.uniform(-lam_max, lam_max, n + 1)
    # sprinkle in repeated eigenvalues now and then
    if n >= 2 and rng.random() < 0.3:
        lams[1] = lams[0]
    return EigenSystem(tuple(np.round(lams, 3)))


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}


@pytest.fixture
def criterion():
    def record(number: int, ok: bool, detail: str):
        ACCEPTANCE.setdefault(number, []).append((bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[number]
        status = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        detail = "; ".join(d if ok else f"[not met] {d}" for ok, d in parts)
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {detail}")
