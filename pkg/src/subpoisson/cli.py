"""Command-line front end for critical-transmittance sweeps.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 verification
failure.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ConfigError, SubPoissonError
from .sweep import build_config, emit_csv, read_config_file, run_sweep, verify_mode


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subpoisson-sweep",
        description=(
            "Sweep the critical transmittance of a fluctuating thermal-loss channel "
            "over displacement, fluctuation strength and temperature grids, writing CSV."
        ),
    )
    parser.add_argument("--config", metavar="PATH", help="key = value configuration file")
    parser.add_argument("--state", choices=("squeezed", "cat", "fock"), help="input state family")
    parser.add_argument("--r", type=float, help="squeezing magnitude (squeezed family)")
    parser.add_argument("--phi", type=float, help="relative phase theta - psi/2 in radians")
    parser.add_argument("--theta", type=float, help="displacement phase (alternative to --phi)")
    parser.add_argument("--psi", type=float, help="squeezing phase (alternative to --phi)")
    parser.add_argument(
        "--beta-sq",
        dest="beta_sq_grid",
        metavar="GRID",
        help="squared displacement grid: 'a,b,c' or 'start:stop:count' "
        "(photon numbers for --state fock)",
    )
    parser.add_argument("--f-list", dest="f_list", metavar="GRID", help="fluctuation strengths")
    parser.add_argument("--nth-list", dest="nth_list", metavar="GRID", help="thermal occupancies")
    parser.add_argument(
        "--beta-hw-list",
        dest="beta_hw_list",
        metavar="GRID",
        help="photon energies over k_B*T, converted to thermal occupancies",
    )
    parser.add_argument("--out", metavar="PATH", help="output CSV path (default sweep.csv)")
    parser.add_argument(
        "--verify",
        action="store_const",
        const=True,
        help="replay sampled grid points through the Fock-space oracle",
    )
    parser.add_argument(
        "--truncation", type=int, help="fixed Fock-space size for verification"
    )
    parser.add_argument("--verify-tolerance", dest="verify_tolerance", type=float)
    parser.add_argument("--verify-samples", dest="verify_samples", type=int)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)

    try:
        mapping: dict = {}
        if args.config is not None:
            try:
                mapping.update(read_config_file(args.config))
            except OSError as exc:
                print(f"error: cannot read config {args.config}: {exc}", file=sys.stderr)
                return 3
        for key in (
            "state",
            "r",
            "phi",
            "theta",
            "psi",
            "beta_sq_grid",
            "f_list",
            "nth_list",
            "beta_hw_list",
            "out",
            "verify",
            "truncation",
            "verify_tolerance",
            "verify_samples",
        ):
            value = getattr(args, key)
            if value is not None:
                mapping[key] = value
        cfg = build_config(mapping)
        points = run_sweep(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except SubPoissonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        emit_csv(points, cfg.out)
    except OSError as exc:
        print(f"I/O error writing {cfg.out}: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {len(points)} rows to {cfg.out}")

    if cfg.verify:
        report = verify_mode(cfg, points)
        for line in report.summary_lines():
            print(line)
        if not report.ok:
            return 4
    return 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
