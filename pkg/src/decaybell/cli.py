"""``decaybell`` command line: single points, scans and the box report.

Any flag can also come from a flat ``key = value`` file given with
``--config``; flags on the command line win.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

from . import bell, entanglement, nosignal, scan
from .errors import DecayBellError
from .kinematics import DecayAngles, require_physical
from .states import correlation_tensor, decay_state

_BOOL_FLAGS = {"include_boundary"}


def _floats(text: str, n: int | None = None) -> tuple[float, ...]:
    vals = tuple(_angle(v) for v in text.split(","))
    if n is not None and len(vals) != n:
        raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {text!r}")
    return vals


def _angle(text: str) -> float:
    """Float, also accepting multiples of pi such as ``pi/2`` or ``0.75pi``."""
    t = text.strip().lower().replace(" ", "")
    if "pi" not in t:
        return float(t)
    num, _, den = t.partition("/")
    num = num.replace("*", "").replace("pi", "")
    factor = float(num) if num not in ("", "+", "-") else float(num + "1")
    return factor * math.pi / (float(den) if den else 1.0)


def _grid(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"grid must look like 25x25, got {text!r}")
    return int(parts[0]), int(parts[1])


def _observables(text: str) -> tuple[str, ...]:
    vals = tuple(v.strip().lower() for v in text.split(",") if v.strip())
    if vals == ("all",):
        return scan.OBSERVABLES
    bad = set(vals) - set(scan.OBSERVABLES)
    if bad:
        raise argparse.ArgumentTypeError(f"unknown observables {sorted(bad)}")
    return vals


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value file with defaults for any flag")
    p.add_argument("--interaction", choices=("scalar", "vector", "tensor"), default="vector")
    p.add_argument("--couplings", type=lambda s: _floats(s, 4), default=(1 / math.sqrt(2),) * 4,
                   help="four comma-separated couplings (scalar: cS,cA,dS,dA; vector: cL,cR,dL,dR; "
                        "tensor: cM,cE,dM,dE)")
    p.add_argument("--spin-theta", type=_angle, default=0.0)
    p.add_argument("--spin-phi", type=_angle, default=0.0)
    p.add_argument("--theta-B", dest="theta_B", type=_angle, default=2 * math.pi / 3)
    p.add_argument("--theta-C", dest="theta_C", type=_angle, default=5 * math.pi / 6)
    p.add_argument("--observables", type=_observables, default=scan.OBSERVABLES,
                   help="comma list from measures,mermin,svetlichny,b442,b442sym (or all)")
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output path (stdout when omitted)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="decaybell", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in (("state", "print the spin state and correlation tensor as JSON"),
                        ("measures", "print the entanglement report as JSON"),
                        ("bell", "print optimised Bell values (OptResult JSON per observable)")):
        _common(sub.add_parser(name, help=help_))

    p = sub.add_parser("scan2d", help="scan the (theta_B, theta_C) plane")
    _common(p)
    p.add_argument("--grid", type=_grid, default=(25, 25), help="NxM cells")
    p.add_argument("--include-boundary", action="store_true",
                   help="grid on [0, pi] including edges instead of cell centres")

    p = sub.add_parser("scan-spin", help="rotate the parent spin about x or y")
    _common(p)
    p.add_argument("--rot-axis", choices=("x", "y"), required=True)
    p.add_argument("--rot-steps", type=int, default=73)
    p.add_argument("--rot-range", type=lambda s: _floats(s, 2), default=(0.0, 2 * math.pi),
                   help="omega range a,b (inclusive)")

    sub.add_parser("boxes", help="verify the exact no-signalling box identities")
    return parser


def _config_argv(path: str) -> list[str]:
    argv = []
    for key, value in scan.load_config_file(path).items():
        if key == "config":
            continue
        if key.lower() in ("theta_b", "theta_c"):
            flag = "--theta-" + key[-1].upper()
        else:
            flag = "--" + key.replace("_", "-")
        if key in _BOOL_FLAGS:
            if value.lower() in ("1", "true", "yes", "on"):
                argv.append(flag)
            continue
        argv += [flag, value]
    return argv


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        # file values first, so explicit flags override them
        args = parser.parse_args([argv[0]] + _config_argv(args.config) + argv[1:])
    return args


def config_from_args(args: argparse.Namespace) -> scan.ScanConfig:
    kw = {k: getattr(args, k) for k in (
        "interaction", "couplings", "spin_theta", "spin_phi", "theta_B", "theta_C", "observables",
        "restarts", "tol", "seed", "out", "format", "threads", "grid", "include_boundary",
        "rot_axis", "rot_steps", "rot_range") if hasattr(args, k)}
    return scan.ScanConfig(**kw)


def _point_state(cfg: scan.ScanConfig):
    angles = DecayAngles(cfg.theta_B, cfg.theta_C)
    require_physical(angles)
    return decay_state(cfg.interaction, cfg.couplings, angles, cfg.spin)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_state(cfg):
    state = _point_state(cfg)
    data = {"state": state.to_json_dict(), "correlation_tensor": correlation_tensor(state).to_json_dict()}
    _emit(json.dumps(data, indent=1) + "\n", cfg.out)


def _cmd_measures(cfg):
    rep = entanglement.report(_point_state(cfg))
    _emit(json.dumps(rep.to_dict(), indent=1) + "\n", cfg.out)


def _cmd_bell(cfg):
    T = correlation_tensor(_point_state(cfg))
    opts = dict(restarts=cfg.restarts, tol=cfg.tol, seed=cfg.seed)
    out = {}
    for kind in cfg.observables:
        if kind == "measures":
            continue
        k = bell.ObservableKind(kind)
        if k in (bell.ObservableKind.MERMIN, bell.ObservableKind.SVETLICHNY):
            res = bell.OPTIMIZERS[k](T, **opts)
        else:
            res = bell.OPTIMIZERS[k](T)
        out[kind] = res.to_json_dict()
    _emit(json.dumps(out, indent=1) + "\n", cfg.out)


def _cmd_scan(cfg, rows):
    text = scan.write_rows(rows, cfg.out, cfg.format)
    if cfg.out is None:
        sys.stdout.write(text)


def _cmd_boxes() -> int:
    checks = nosignal.box_identity_checks()
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  ({c.detail})")
    n_fail = sum(not c.passed for c in checks)
    print(f"{len(checks) - n_fail}/{len(checks)} identities hold")
    return 1 if n_fail else 0


def main(argv: list[str] | None = None) -> int:
    args = parse_args(argv)
    if args.command == "boxes":
        return _cmd_boxes()
    try:
        cfg = config_from_args(args)
        if args.command == "state":
            _cmd_state(cfg)
        elif args.command == "measures":
            _cmd_measures(cfg)
        elif args.command == "bell":
            _cmd_bell(cfg)
        elif args.command == "scan2d":
            _cmd_scan(cfg, scan.run_scan(cfg))
        elif args.command == "scan-spin":
            _cmd_scan(cfg, scan.run_spin_scan(cfg))
    except (DecayBellError, ValueError) as exc:
        print(f"decaybell: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
