import math

import numpy as np
import pytest

from decaybell.kinematics import DecayAngles, physical_region
from decaybell.states import SpinDirection


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_spin(rng) -> SpinDirection:
    v = rng.standard_normal(3)
    return SpinDirection.from_vector(v)


def random_physical_angles(rng) -> DecayAngles:
    while True:
        b, c = rng.uniform(0, math.pi, 2)
        if b + c > math.pi + 1e-3 and max(b, c) < math.pi - 1e-3:
            return DecayAngles(float(b), float(c))


def random_couplings(rng) -> tuple[float, ...]:
    return tuple(float(x) for x in rng.uniform(-1, 1, 4))


def physical_cells(n: int) -> list[tuple[float, float]]:
    """Cell-centre grid points of an n x n grid that lie in the physical region."""
    axis = (np.arange(n) + 0.5) * math.pi / n
    return [(float(b), float(c)) for b in axis for c in axis if physical_region(DecayAngles(b, c))]


# acceptance results: criterion -> list of (check, passed, detail)
ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}


def record(criterion: int, check: str, passed: bool, detail: str = "") -> bool:
    ACCEPTANCE.setdefault(criterion, []).append((check, bool(passed), detail))
    print(f"{'PASS' if passed else 'FAIL'} criterion {criterion} [{check}] {detail}")
    return bool(passed)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        checks = ACCEPTANCE[n]
        ok = all(p for _, p, _ in checks)
        parts = "; ".join(f"{c}: {'ok' if p else 'FAILED'} {d}".rstrip() for c, p, d in checks)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {n:2d}  {parts}")
