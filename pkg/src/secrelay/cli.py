"""Command-line front end: ``point``, ``sweep`` and ``verify``.

Exit codes: 0 success, 1 verification failure, 2 usage or validation
error, 3 internal-consistency error from an estimator.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .errors import InternalConsistencyError, QuadratureError, UsageError
from .sweep import (
    HEADER, SweepSpec, load_config, run_sweep, specs_from_config, to_csv,
)
from .verify import PRESETS

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

SEED_ENV = "SECRELAY_SEED"

log = logging.getLogger("secrelay")


def _add_point_flags(p: argparse.ArgumentParser, sweep: bool) -> None:
    # every default is None so that only flags actually given override a config file
    p.add_argument("--topology", choices=["no-direct", "with-direct"])
    p.add_argument("--lambda-m-db", metavar="START:STOP:STEP" if sweep else "DB",
                   help="relay-to-destination mean SNR in dB")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--lambda-e-db", type=float, metavar="DB",
                   help="relay-to-eavesdropper mean SNR in dB")
    g.add_argument("--kappa-db", type=float, metavar="DB",
                   help="ratio lambda_m / lambda_e in dB")
    p.add_argument("--lambda-sd-db", metavar="DB|track")
    p.add_argument("--lambda-se-db", metavar="DB|track")
    p.add_argument("--n", metavar="N[,N...]" if sweep else "N", help="relay count(s)")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--rate-nats", type=float)
    g.add_argument("--rate-bits", type=float)
    p.add_argument("--estimators", metavar="LIST",
                   help="comma list from analytic,asymptotic,mc,oracle")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, help=f"default ${SEED_ENV} or 0")
    p.add_argument("--jobs", type=int, help="worker threads")
    p.add_argument("--out", default="stdout", metavar="PATH|stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="secrelay",
        description="Secrecy outage probability of decode-and-forward relay selection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    point = sub.add_parser("point", help="evaluate one parameter point")
    _add_point_flags(point, sweep=False)
    point.add_argument("--pretty", action="store_true", help="human-readable block instead of CSV")

    sweep = sub.add_parser("sweep", help="sweep lambda_m over a dB grid, CSV output")
    sweep.add_argument("--config", metavar="PATH", help="JSON recipe (path or bundled name)")
    _add_point_flags(sweep, sweep=True)

    verify = sub.add_parser("verify", help="cross-check closed forms, quadrature and simulation")
    verify.add_argument("--preset", default="acceptance")
    verify.add_argument("--trials", type=int, default=1_000_000)
    verify.add_argument("--seed", type=int)
    verify.add_argument("--jobs", type=int, default=1)
    verify.add_argument("--max-rel-err", type=float,
                        help="override every relative tolerance (also caps Monte Carlo error)")
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    mapping = {
        "topology": args.topology,
        "lambda_m_db": args.lambda_m_db,
        "lambda_e_db": args.lambda_e_db,
        "kappa_db": args.kappa_db,
        "lambda_sd_db": args.lambda_sd_db,
        "lambda_se_db": args.lambda_se_db,
        "n_list": args.n,
        "rate_nats": args.rate_nats,
        "rate_bits": args.rate_bits,
        "estimators": args.estimators,
        "trials": args.trials,
        "seed": args.seed,
        "jobs": args.jobs,
    }
    return {k: v for k, v in mapping.items() if v is not None}


def _env_seed() -> dict:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return {}
    try:
        return {"seed": int(raw)}
    except ValueError:
        raise UsageError("seed", f"{SEED_ENV} is not an integer: {raw!r}") from None


def _write(text: str, out: str) -> None:
    if out in ("stdout", "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(out).write_text(text)


def cmd_point(args: argparse.Namespace) -> int:
    settings = {**_env_seed(), **_overrides(args)}
    n_list = settings.get("n_list")
    if n_list is not None and "," in str(n_list):
        raise UsageError("n_relays", "point takes a single relay count")
    spec = SweepSpec.from_mapping(settings)
    if spec.lambda_m_db[0] != spec.lambda_m_db[1]:
        raise UsageError("lambda_m_db", "point takes a single value")
    (result,) = run_sweep(spec)
    if args.pretty:
        lines = [f"{name:<12} {value}" for name, value in zip(HEADER, result.row()) if value != ""]
        _write("\n".join(lines) + "\n", args.out)
    else:
        _write(to_csv([result]), args.out)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    config = load_config(args.config) if args.config else {}
    specs = specs_from_config({**_env_seed(), **config}, _overrides(args))
    for spec in specs:
        spec.points()  # validate every grid point before any output
    if len(specs) == 1:
        _write(to_csv(run_sweep(specs[0])), args.out)
        return EXIT_OK
    if args.out in ("stdout", "-"):
        raise UsageError("out", "a multi-curve recipe needs --out <directory>")
    outputs = {spec.label: to_csv(run_sweep(spec)) for spec in specs}
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for label, text in outputs.items():
        (out_dir / f"{label}.csv").write_text(text)
        log.info("wrote %s", out_dir / f"{label}.csv")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    if args.preset not in PRESETS:
        raise UsageError("preset", f"unknown preset {args.preset!r} (have {', '.join(PRESETS)})")
    if args.trials < 1:
        raise UsageError("trials", f"must be >= 1 (got {args.trials})")
    if args.jobs < 1:
        raise UsageError("jobs", f"must be >= 1 (got {args.jobs})")
    if args.max_rel_err is not None and not args.max_rel_err > 0:
        raise UsageError("max_rel_err", "must be positive")
    seed = args.seed if args.seed is not None else _env_seed().get("seed", 0)
    if not 0 <= seed < 2**64:
        raise UsageError("seed", f"must be an unsigned 64-bit integer (got {seed})")
    report = PRESETS[args.preset](args.trials, seed, args.max_rel_err, args.jobs)
    print(report.format())
    return EXIT_OK if report.passed else EXIT_VERIFY


COMMANDS = {"point": cmd_point, "sweep": cmd_sweep, "verify": cmd_verify}


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"secrelay {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InternalConsistencyError, QuadratureError) as exc:
        print(f"secrelay {args.command}: internal-consistency error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
