"""Command-line front end.

Subcommands:
  ccdf             PAPR exceedance curve of a transmitted frame stream
  sweep            distortion vs SNR through the full chain
  roundtrip        noiseless transmit/inverse distortion check
  gradcheck        finite-difference verification of the analytic gradients
  gen-latents-stub write a stream of source frames as a SYMF file

Every experiment flag can instead come from a key=value config file via
--config; explicit flags override file values.
"""

import argparse
import sys

import numpy as np

from .errors import ConfigError, PaprSimError
from .gradients import GRAD_CHECK_OPS, grad_check
from .harness import (
    ExperimentSpec,
    build_spec,
    parse_config_file,
    run_ccdf_experiment,
    run_distortion_sweep,
)
from .rng import probe_rng
from .sources import make_source
from .symf import write_symf

# argparse dest -> config file / flag key
_KEY_BY_DEST = {
    "source": "source",
    "n": "n",
    "frames": "frames",
    "technique": "technique",
    "rho": "rho",
    "mu": "mu",
    "v": "v",
    "m_trials": "m-trials",
    "gamma": "gamma",
    "snr_db": "snr-db",
    "seed": "seed",
    "workers": "workers",
    "out": "out",
    "papr_out": "papr-out",
}

_DEFAULT_SWEEP_GRID = "0,5,10,15,20"


def _add_experiment_flags(sub, with_technique: bool = True):
    sub.add_argument("--config", help="key=value config file; flags override it")
    sub.add_argument("--source", help="qam16, gaussian, or file:<path> (default gaussian)")
    sub.add_argument("--n", help="subcarriers per frame, power of two (default 64)")
    sub.add_argument("--frames", help="number of frames (default 100000)")
    sub.add_argument("--seed", help="master seed (default 0)")
    sub.add_argument("--out", help="output CSV/SYMF path")
    if with_technique:
        sub.add_argument(
            "--technique",
            help="none, clip, compand, slm, pts, or softclip (default none)",
        )
        sub.add_argument("--rho", help="clip/softclip amplitude ratio (default 1.4)")
        sub.add_argument("--mu", help="companding strength (default 4)")
        sub.add_argument("--v", help="slm candidates / pts partitions (default 4)")
        sub.add_argument("--m-trials", help="pts weight trials (default 16)")
        sub.add_argument("--gamma", help="softclip stabilizer (default 1e-12)")
        sub.add_argument("--snr-db", help="comma-separated SNR grid for sweeps")
        sub.add_argument("--workers", help="parallel workers (default 1)")
        sub.add_argument("--papr-out", help="also write per-frame PAPR CSV here")


def _collect_values(args, presets=None) -> dict:
    values = dict(presets or {})
    if getattr(args, "config", None):
        values.update(parse_config_file(args.config))
    for dest, key in _KEY_BY_DEST.items():
        flag = getattr(args, dest, None)
        if flag is not None:
            values[key] = flag
    return values


def _require_out(spec: ExperimentSpec) -> ExperimentSpec:
    if spec.out is None:
        raise ConfigError("out is required: pass --out or set out= in the config")
    return spec


def _cmd_ccdf(args) -> int:
    spec = _require_out(build_spec(_collect_values(args)))
    record = run_ccdf_experiment(spec)
    print(
        f"wrote {spec.out}: {spec.n_frames} frames, technique {spec.technique.describe()}, "
        f"{record.wall_time_s:.2f}s"
    )
    return 0


def _cmd_sweep(args) -> int:
    values = _collect_values(args)
    values.setdefault("snr-db", _DEFAULT_SWEEP_GRID)
    spec = _require_out(build_spec(values))
    record = run_distortion_sweep(spec)
    print(
        f"wrote {spec.out}: {spec.n_frames} frames x {len(spec.snr_db)} SNR points, "
        f"technique {spec.technique.describe()}, {record.wall_time_s:.2f}s"
    )
    return 0


def _cmd_roundtrip(args) -> int:
    values = _collect_values(args)
    values.pop("snr-db", None)
    spec = build_spec(values)
    record = run_distortion_sweep(spec, snr_grid=(float("inf"),))
    _, report = record.distortion[0]
    print(
        f"technique {spec.technique.describe()}: frames={spec.n_frames} "
        f"mse={report.mse!r} evm_db={report.evm_db!r}"
    )
    return 0


def _cmd_gradcheck(args) -> int:
    ops = [args.op] if args.op else list(GRAD_CHECK_OPS)
    for index, op in enumerate(ops):
        report = grad_check(
            op,
            trials=args.trials,
            step=args.step,
            rng=probe_rng(args.seed, index),
            n_subcarriers=args.n,
            rho=args.rho,
        )
        print(
            f"{op}: max_rel_error={report.max_rel_error!r} "
            f"trials={report.probe_count} step={report.step!r}"
        )
    return 0


def _cmd_gen_latents_stub(args) -> int:
    values = _collect_values(args, presets={"frames": "256"})
    spec = _require_out(build_spec(values))
    source = make_source(spec.source)
    symbols = source.batch_symbols(spec.master_seed, np.arange(spec.n_frames))
    write_symf(spec.out, symbols)
    print(f"wrote {spec.out}: {spec.n_frames} frames of {spec.n_subcarriers} symbols")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paprsim",
        description="OFDM peak-to-average power ratio reduction experiments",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    ccdf = subs.add_parser("ccdf", help="PAPR exceedance curve to CSV")
    _add_experiment_flags(ccdf)
    ccdf.set_defaults(handler=_cmd_ccdf)

    sweep = subs.add_parser("sweep", help="distortion vs SNR to CSV")
    _add_experiment_flags(sweep)
    sweep.set_defaults(handler=_cmd_sweep)

    roundtrip = subs.add_parser("roundtrip", help="noiseless transmit/inverse check")
    _add_experiment_flags(roundtrip)
    roundtrip.set_defaults(handler=_cmd_roundtrip)

    gradcheck = subs.add_parser("gradcheck", help="finite-difference gradient check")
    gradcheck.add_argument("--op", choices=GRAD_CHECK_OPS, help="default: run both")
    gradcheck.add_argument("--trials", type=int, default=100)
    gradcheck.add_argument("--step", type=float, default=1e-5)
    gradcheck.add_argument("--seed", type=int, default=0)
    gradcheck.add_argument("--n", type=int, default=32, help="probe frame length")
    gradcheck.add_argument("--rho", type=float, default=1.4, help="soft clip ratio")
    gradcheck.set_defaults(handler=_cmd_gradcheck)

    stub = subs.add_parser(
        "gen-latents-stub", help="write source frames as a SYMF latent file"
    )
    _add_experiment_flags(stub, with_technique=False)
    stub.set_defaults(handler=_cmd_gen_latents_stub)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except PaprSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
