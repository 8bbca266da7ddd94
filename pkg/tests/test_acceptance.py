"""Acceptance gate: criteria 1-10, one summary line per criterion.

Each test records its checks with ``record`` and then asserts them, so the
terminal summary shows every sub-check even when one fails.
"""
import math
from collections import defaultdict

import numpy as np
import pytest

from decaybell import bell, cli, entanglement, nosignal as ns, scan
from decaybell.kinematics import DecayAngles
from decaybell.states import (
    PAULI,
    ScalarCouplings,
    SpinDirection,
    VectorCouplings,
    apply_local_unitaries,
    correlation_tensor,
    density_matrix,
    ghz_state,
    random_state,
    random_unitary,
    reduce,
    scalar_state,
    vector_state,
    w_state,
)

from conftest import physical_cells, random_couplings, random_spin, record
from oracles import sampled_max

SQ2 = math.sqrt(2)
E_Y = SpinDirection(math.pi / 2, math.pi / 2)
E_Z = SpinDirection(0.0, 0.0)
YY = np.kron(PAULI[2], PAULI[2]).real
GHZ_TARGETS = dict(C_AB=0, C_AC=0, C_BC=0, C_A_BC=1, C_B_AC=1, C_C_AB=1, tau=1, F3=1,
                   mermin=4, svetlichny=4 * SQ2, b442=8)


def _worst(pairs):
    """Largest |got - want| over (got, want) pairs."""
    return max((abs(g - w) for g, w in pairs), default=0.0)


# ---------------------------------------------------------------- generic oracles


def rank2_pair_concurrence(rho):
    """Wootters concurrence from the two dominant eigenpairs of a pair state.

    A pair reduced from a three-qubit pure state has rank at most 2, so the
    subnormalised decomposition sqrt(p_k)|psi_k> is exact and the concurrence
    is sigma_1 - sigma_2 of the symmetric matrix W^T (Y x Y) W.
    """
    p, V = np.linalg.eigh(rho)
    W = V[:, 2:] * np.sqrt(np.clip(p[2:], 0.0, None))
    s = np.linalg.svd(W.T @ YY @ W, compute_uv=False)
    return max(0.0, s[0] - s[1])


def single_concurrence(rho1):
    w = np.linalg.eigvalsh(rho1)
    return 2.0 * math.sqrt(max(w[0], 0.0) * max(w[1], 0.0))


# ---------------------------------------------------------------- 1


def test_criterion_1_scalar_analytics(rng):
    bell_err, meas_err = [], []
    for _ in range(100):
        s = scalar_state(ScalarCouplings(*random_couplings(rng)), random_spin(rng))
        T = correlation_tensor(s)
        bell_err += [(bell.optimize_mermin(T).value, 2 * SQ2), (bell.optimize_b442(T).value, 4 * SQ2),
                     (bell.optimize_svetlichny(T).value, 4.0)]
        rep = entanglement.report(s)
        meas_err += [(rep.C_BC, 1), (rep.C_AB, 0), (rep.C_AC, 0), (rep.C_A_BC, 0), (rep.F3, 0)]
    a = record(1, "bell", _worst(bell_err) <= 1e-6, f"max err {_worst(bell_err):.1e}")
    b = record(1, "measures", _worst(meas_err) <= 1e-10, f"max err {_worst(meas_err):.1e}")
    assert a and b


# ---------------------------------------------------------------- 2


def test_criterion_2_golden_states():
    T = correlation_tensor(ghz_state())
    rep = entanglement.report(ghz_state()).to_dict()
    meas = [(rep[k], GHZ_TARGETS[k]) for k in entanglement.REPORT_FIELDS]
    opt = [(bell.optimize_mermin(T).value, 4), (bell.optimize_svetlichny(T).value, 4 * SQ2),
           (bell.optimize_b442(T).value, 8)]
    w = w_state()
    wrep = entanglement.report(w)
    meas += [(wrep.C_AB, 2 / 3), (wrep.C_AC, 2 / 3), (wrep.C_BC, 2 / 3), (wrep.tau, 0), (wrep.F3, 8 / 9)]
    meas += [(v, 2 * SQ2 / 3) for v in (wrep.C_A_BC, wrep.C_B_AC, wrep.C_C_AB)]
    a = record(2, "measures", _worst(meas) <= 1e-9, f"max err {_worst(meas):.1e}")
    b = record(2, "ghz bell", _worst(opt) <= 1e-6, f"max err {_worst(opt):.1e}")
    assert a and b


# ---------------------------------------------------------------- 3


def test_criterion_3_tensor_ey_grid():
    cfg = scan.ScanConfig(interaction="tensor", spin_theta=E_Y.theta, spin_phi=E_Y.phi,
                          observables=("measures", "mermin", "svetlichny", "b442"))
    cells = physical_cells(10)
    errs = []
    for tb, tc in cells:
        row = scan.run_point(cfg, tb, tc)
        errs += [(row[k], v) for k, v in GHZ_TARGETS.items()]
    ok = record(3, "ghz maxima", _worst(errs) <= 1e-6, f"{len(cells)} cells, max err {_worst(errs):.1e}")
    assert ok


# ---------------------------------------------------------------- 4


def test_criterion_4_tensor_ez_diagonal():
    cfg = scan.ScanConfig(interaction="tensor", spin_theta=0.0, spin_phi=0.0,
                          observables=("measures", "b442", "b442sym"))
    axis = scan.angle_axis(25, False)
    rows = [scan.run_point(cfg, th, th) for th in axis if th > math.pi / 2]
    f3 = max(r["F3"] for r in rows)
    b442 = [(r[k], 4.0) for r in rows for k in ("b442", "b442sym")]
    a = record(4, "F3", f3 <= 1e-9, f"max F3 {f3:.1e} over {len(rows)} rows")
    b = record(4, "b442", _worst(b442) <= 1e-6, f"max |B442 - 4| {_worst(b442):.1e}")
    assert a and b


# ---------------------------------------------------------------- 5


def test_criterion_5_vector_closed_forms(rng):
    cells = physical_cells(15)
    zero, pair, one = 0.0, 0.0, 0.0
    for _ in range(20):
        c = VectorCouplings(*random_couplings(rng))
        n = random_spin(rng)
        for tb, tc in cells:
            s = vector_state(c, DecayAngles(tb, tc), n)
            LL, LR, RL, RR = (s.amplitude(k) for k in ("-+-", "--+", "++-", "+-+"))
            rho = density_matrix(s)
            rep = entanglement.report(s)
            zero = max(zero, rep.C_AB, rep.C_AC, rank2_pair_concurrence(reduce(rho, "AB")),
                       rank2_pair_concurrence(reduce(rho, "AC")))
            cbc = 2 * abs(LL * LR.conjugate() + RL * RR.conjugate())
            pair = max(pair, abs(cbc - rank2_pair_concurrence(reduce(rho, "BC"))), abs(cbc - rep.C_BC))
            ca = 2 * abs(RR * LL - LR * RL)
            cb = 2 * math.sqrt((abs(LL) ** 2 + abs(RL) ** 2) * (abs(LR) ** 2 + abs(RR) ** 2))
            for want, p, got in ((ca, "A", rep.C_A_BC), (cb, "B", rep.C_B_AC), (cb, "C", rep.C_C_AB)):
                one = max(one, abs(want - single_concurrence(reduce(rho, p))), abs(want - got))
    a = record(5, "C_AB = C_AC = 0", zero <= 1e-10, f"max {zero:.1e}")
    b = record(5, "pair closed form", pair <= 1e-9, f"max err {pair:.1e}")
    c = record(5, "one-to-other closed form", one <= 1e-9, f"max err {one:.1e} over {20 * len(cells)} states")
    assert a and b and c


# ---------------------------------------------------------------- 6

VALUE_COLUMNS = entanglement.REPORT_FIELDS + scan.BELL_COLUMNS


@pytest.fixture(scope="module")
def vector_tables():
    """Full 25x25 vector scans for n = e_z and n = e_y, keyed by grid index."""
    out = {}
    for name, n in (("ez", E_Z), ("ey", E_Y)):
        cfg = scan.ScanConfig(spin_theta=n.theta, spin_phi=n.phi)
        rows = scan.run_scan(cfg)
        out[name] = {(i // 25, i % 25): r for i, r in enumerate(rows) if r["status"] != scan.STATUS_SKIPPED}
    return out


def test_criterion_6_ez_landmarks():
    cfg = scan.ScanConfig(spin_theta=0.0, spin_phi=0.0)
    mid = scan.run_point(cfg, math.pi / 2, math.pi / 2)["F3"]
    corner = scan.run_point(cfg, math.pi, math.pi)["F3"]
    assert record(6, "F3(pi/2, pi/2) = 1", abs(mid - 1) <= 1e-6, f"{mid:.9f}")
    assert record(6, "F3(pi, pi) = 0", corner <= 1e-9, f"{corner:.1e}")


def test_criterion_6_ez_symmetry(vector_tables):
    tab = vector_tables["ez"]
    worst = 0.0
    for (i, j), row in tab.items():
        other = tab[(j, i)]
        for k in VALUE_COLUMNS:
            worst = max(worst, abs(row[k] - other[k]))
    assert record(6, "e_z table symmetric", worst <= 1e-6, f"max asymmetry {worst:.1e}")


def test_criterion_6_ey_sum_dependence(vector_tables):
    # cell centres with equal i + j share theta_B + theta_C
    groups = defaultdict(list)
    for (i, j), row in vector_tables["ey"].items():
        groups[i + j].append(row)
    spread = {}
    for k in VALUE_COLUMNS:
        spread[k] = max(max(r[k] for r in g) - min(r[k] for r in g) for g in groups.values())
    worst = max(spread, key=spread.get)
    ok = record(6, "e_y rows depend only on theta_B + theta_C", spread[worst] <= 1e-6,
                f"largest spread {spread[worst]:.1e} in {worst}")
    assert ok, spread


def test_criterion_6_ey_svetlichny_corner():
    cfg = scan.ScanConfig(spin_theta=E_Y.theta, spin_phi=E_Y.phi, observables=("svetlichny",))
    v = scan.run_point(cfg, math.pi, math.pi)["svetlichny"]
    assert record(6, "e_y Svetlichny(pi, pi) = 4", abs(v - 4) <= 1e-6, f"{v:.9f}")


# ---------------------------------------------------------------- 7


def test_criterion_7_haar_properties(rng):
    mono, bound, lu_meas, lu_opt = 0.0, -np.inf, 0.0, 0.0
    pairs = {"A": ("C_AB", "C_AC"), "B": ("C_AB", "C_BC"), "C": ("C_AC", "C_BC")}
    ones = {"A": "C_A_BC", "B": "C_B_AC", "C": "C_C_AB"}
    caps = {"mermin": 4.0, "svetlichny": 4 * SQ2, "b442": 8.0, "b442sym": 8.0}
    for i in range(1000):
        s = random_state(rng)
        t = apply_local_unitaries(s, *(random_unitary(rng) for _ in range(3)))
        d, dt = entanglement.report(s).to_dict(), entanglement.report(t).to_dict()
        for p, (x, y) in pairs.items():
            mono = max(mono, abs(d[ones[p]] ** 2 - d[x] ** 2 - d[y] ** 2 - d["tau"]))
        lu_meas = max(lu_meas, max(abs(d[k] - dt[k]) for k in entanglement.REPORT_FIELDS))
        T, Tt = correlation_tensor(s), correlation_tensor(t)
        sym = bell.optimize_b442_sym(T)
        vals = {"mermin": bell.optimize_mermin(T).value, "svetlichny": bell.optimize_svetlichny(T).value,
                "b442": sym.diagnostics["per_role"]["442"], "b442sym": sym.value}
        rot = {"mermin": bell.optimize_mermin(Tt).value, "svetlichny": bell.optimize_svetlichny(Tt).value,
               "b442": bell.optimize_b442(Tt).value}
        if i < 100:
            # the symmetrised value costs three b442 runs; check its invariance on a subset
            rot["b442sym"] = bell.optimize_b442_sym(Tt).value
        bound = max(bound, max(vals[k] - caps[k] for k in vals))
        lu_opt = max(lu_opt, max(abs(vals[k] - rot[k]) for k in rot))
    a = record(7, "monogamy", mono <= 1e-9, f"max residual {mono:.1e}")
    b = record(7, "quantum bounds", bound <= 1e-9, f"max excess {bound:.1e}")
    c = record(7, "LU invariance", max(lu_meas, lu_opt) <= 1e-6,
               f"measures {lu_meas:.1e}, optimised {lu_opt:.1e}")
    assert a and b and c


# ---------------------------------------------------------------- 8


def test_criterion_8_frame_reconstruction(rng):
    recon, deficit = 0.0, -np.inf
    for _ in range(100):
        T = correlation_tensor(random_state(rng))
        res = bell.optimize_b442(T)
        axes = bell.reconstruct_b442_axes(T, res.internal_angles)
        semi = 4 * math.sqrt(bell.b442_lambda_sum(T, *res.internal_angles))
        recon = max(recon, abs(bell.evaluate(T, axes, "b442") - semi), abs(res.value - semi))
        oracle = sampled_max(T.block, ("b442",), rng)["b442"]
        deficit = max(deficit, oracle - res.value)
    a = record(8, "reconstruction", recon <= 1e-9, f"max err {recon:.1e}")
    b = record(8, "beats 1e5-sample oracle", deficit <= 1e-6, f"max oracle excess {deficit:.2e}")
    assert a and b


# ---------------------------------------------------------------- 9


def test_criterion_9_exact_boxes():
    checks = ns.box_identity_checks()
    failed = [c.name for c in checks if not c.passed]
    a = record(9, "box identities", not failed, f"{len(checks) - len(failed)}/{len(checks)} hold")
    q = [float(ns.chsh_value(ns.quantum_box(s))) for s in (0, 1)]
    err = max(abs(q[0] - 2 * SQ2), abs(q[1] + 2 * SQ2))
    b = record(9, "CHSH(quantum box) = +-2 sqrt 2", err <= 1e-12, f"err {err:.1e}")
    assert a and b, failed


# ---------------------------------------------------------------- 10


def test_criterion_10_determinism(tmp_path):
    argv = ["scan2d", "--grid", "6x6", "--interaction", "tensor", "--spin-theta", "1.1", "--spin-phi", "0.4",
            "--seed", "7", "--restarts", "16"]
    outs = []
    for k in range(2):
        path = tmp_path / f"run{k}.csv"
        assert cli.main(argv + ["--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert record(10, "bit-identical CSV", outs[0] == outs[1], f"{len(outs[0])} bytes")
