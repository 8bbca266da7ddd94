import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from decaybell.errors import DegenerateKinematics, UnphysicalAngles
from decaybell.kinematics import (
    DecayAngles,
    conservation_residuals,
    physical_region,
    require_physical,
    solve_momenta,
)


def linear_solve(b, c):
    # energy and the two momentum components as a 3x3 system, m = 1
    M = np.array([
        [1.0, 1.0, 1.0],
        [1.0, math.cos(b), math.cos(c)],
        [0.0, math.sin(b), -math.sin(c)],
    ])
    return np.linalg.solve(M, [1.0, 0.0, 0.0])


def test_against_linear_solve():
    rng = np.random.default_rng(1)
    n = 0
    while n < 10_000:
        b, c = rng.uniform(0, math.pi, 2)
        angles = DecayAngles(b, c)
        if not physical_region(angles) or math.sin(b) + math.sin(c) - math.sin(b + c) < 1e-3:
            continue
        p = solve_momenta(angles)
        ref = linear_solve(b, c)
        np.testing.assert_allclose([p.p_A, p.p_B, p.p_C], ref, rtol=1e-9, atol=1e-10)
        n += 1


def test_symmetric_configuration():
    p = solve_momenta(DecayAngles(2 * math.pi / 3, 2 * math.pi / 3))
    np.testing.assert_allclose([p.p_A, p.p_B, p.p_C], [1 / 3] * 3, atol=1e-14)


def test_physical_region_examples():
    assert physical_region(DecayAngles(2 * math.pi / 3, 5 * math.pi / 6))
    assert not physical_region(DecayAngles(math.pi / 4, math.pi / 4))
    assert not physical_region(DecayAngles(-0.1, 3.2))
    with pytest.raises(UnphysicalAngles):
        require_physical(DecayAngles(0.3, 0.4))
    with pytest.raises(UnphysicalAngles):
        solve_momenta(DecayAngles(0.3, 0.4))


def test_degenerate_corner():
    with pytest.raises(DegenerateKinematics):
        solve_momenta(DecayAngles(math.pi, math.pi))


def test_boundary_pa_zero():
    p = solve_momenta(DecayAngles(1.0, math.pi - 1.0))
    assert p.p_A == 0.0
    assert p.p_B == pytest.approx(0.5) and p.p_C == pytest.approx(0.5)


def test_nonfinite_rejected():
    with pytest.raises(ValueError):
        DecayAngles(float("nan"), 1.0)


@settings(max_examples=300, deadline=None)
@given(st.floats(0.0, math.pi), st.floats(0.0, math.pi))
def test_conservation_and_positivity(b, c):
    angles = DecayAngles(b, c)
    if not physical_region(angles):
        return
    try:
        p = solve_momenta(angles)
    except DegenerateKinematics:
        return
    assert min(p.p_A, p.p_B, p.p_C) >= -1e-12
    denom = math.sin(b) + math.sin(c) - math.sin(b + c)
    # residuals scale with the size of the momenta, i.e. 1/denom
    assert np.max(np.abs(conservation_residuals(angles, p))) <= 1e-12 * max(1.0, 1 / denom)
