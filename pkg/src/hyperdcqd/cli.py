"""Command-line pipeline: build, simulate, calibrate, reconstruct, compare, plot data.

Exit codes: 0 success, 2 usage or validation error, 3 result undefined for the data.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import dcqd, labsim
from .channels import ChannelSpec, ChannelSpecError, build_channel, preset
from .dcqd import CalibrationData, ExtractionUndefinedError
from .estimation import MLEOptions
from .pipeline import reconstruct
from .quantum import UndefinedFidelityError, dumps, matrix_to_json, tagged_matrix, untag_matrix
from .report import compare_methods, emit_chi_plot_data

LEDGER = """configuration counts:
  SQPT      18 (over-complete: 6 inputs x 3 bases), 12 minimal (4 inputs x 3 bases)
  DCQD       4 (one Bell-analysis setting per probe state)
  calibration 45 (4 probes x 9 tomography settings + 9 analyzer settings)"""


class UsageError(Exception):
    pass


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _write(path: str, text: str) -> None:
    Path(path).write_text(text)


def _load_spec(arg: str) -> ChannelSpec:
    text = arg.strip()
    data = json.loads(text) if text.startswith("{") else _read_json(arg)
    if "spec" in data and "chi" in data:
        data = data["spec"]
    return ChannelSpec.from_json(data)


def load_chi(path: str) -> np.ndarray:
    data = _read_json(path)
    if "chi" in data:
        return untag_matrix(data["chi"], "chi")
    return untag_matrix(data, "chi")


def cmd_channel_build(args) -> int:
    if (args.spec is None) == (args.preset is None):
        raise UsageError("give exactly one of --spec or --preset")
    spec = preset(args.preset) if args.preset else _load_spec(args.spec)
    chi, kraus = build_channel(spec)
    doc = {"kind": "channel", "spec": spec.to_json(), "chi": tagged_matrix("chi", chi), "kraus": [matrix_to_json(k) for k in kraus]}
    _write(args.out, dumps(doc))
    return 0


def cmd_simulate(args) -> int:
    spec = _load_spec(args.channel)
    if args.errors is None:
        errors = labsim.ErrorModel()
    elif args.errors == "default":
        errors = labsim.inject_default_systematics()
    else:
        errors = labsim.ErrorModel.from_json(_read_json(args.errors))
    run = labsim.RunSpec(spec, args.scheme, args.n, args.seed, errors, args.noiseless)
    labsim.save_counts(args.out, labsim.simulate_run(run))
    return 0


def cmd_calibrate(args) -> int:
    doc = labsim.load_counts(args.counts)
    if labsim.scheme_of(doc) not in ("calibration", ""):
        raise UsageError(f"{args.counts} holds {labsim.scheme_of(doc)} counts, not calibration counts")
    cal = dcqd.characterize_from_calibration(doc["records"])
    _write(args.out, dumps(cal.to_json()))
    return 0


def cmd_reconstruct(args) -> int:
    doc = labsim.load_counts(args.counts)
    found = labsim.scheme_of(doc)
    if found and found != args.scheme:
        raise UsageError(f"{args.counts} holds {found} counts but --scheme is {args.scheme}")
    calibration = None
    if args.calibration:
        if args.scheme != "dcqd":
            raise UsageError("--calibration applies to the dcqd scheme only")
        calibration = CalibrationData.from_json(_read_json(args.calibration))
    options = MLEOptions(
        tol=args.tol, max_iter=args.max_iter, trace_preserving=args.tp, bootstrap=args.bootstrap, seed=args.seed
    )
    reference = load_chi(args.reference) if args.reference else None
    result = reconstruct(args.scheme, doc["records"], calibration, options, reference)
    out = result.to_json()
    out["scheme"] = args.scheme
    out["calibrated"] = calibration is not None
    _write(args.out, dumps(out))
    return 0


def cmd_compare(args) -> int:
    truth = load_chi(args.truth) if args.truth else None
    out = compare_methods(load_chi(args.a), load_chi(args.b), truth)
    _write(args.out, dumps(out))
    return 0


def cmd_plotdata(args) -> int:
    _write(args.out, emit_chi_plot_data(load_chi(args.chi)))
    return 0


def cmd_relaxation(args) -> int:
    doc = labsim.load_counts(args.counts)
    records = [r for r in doc["records"] if r.get("input_label") == "BELL"]
    if args.config_id is not None:
        records = [r for r in doc["records"] if r["config_id"] == args.config_id]
    if len(records) != 1:
        raise UsageError(f"expected exactly one Bell-input record in {args.counts}, found {len(records)}")
    rec = records[0]
    probs = dcqd.counts_to_probs(rec["counts"])
    alpha, beta = dcqd.relaxation_multipliers_from_probs(probs)
    ratio = dcqd.extract_relaxation_ratio(probs)
    out = {"ratio_T2_T1": ratio, "alpha": alpha, "beta": beta, "config_id": rec["config_id"], "budget": rec["budget"]}
    _write(args.out, dumps(out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperdcqd",
        description="Simulate and reconstruct single-qubit process tomography with SQPT and DCQD.",
        epilog=LEDGER,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ch = sub.add_parser("channel", help="channel construction")
    ch_sub = ch.add_subparsers(dest="channel_command", required=True)
    b = ch_sub.add_parser("build", help="write chi and Kraus operators for a channel spec")
    b.add_argument("--spec", help="ChannelSpec JSON, inline or as a file")
    b.add_argument("--preset", help="preset name, e.g. fig3c")
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_channel_build)

    s = sub.add_parser("simulate", help="simulate photon counts", epilog=LEDGER, formatter_class=argparse.RawDescriptionHelpFormatter)
    s.add_argument("--scheme", choices=labsim.SCHEMES, required=True)
    s.add_argument("--channel", required=True, help="channel file from 'channel build' or a ChannelSpec")
    s.add_argument("--n", type=int, required=True, help="pair budget N per configuration")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--errors", help="ErrorModel JSON file, or 'default' for the preset systematics")
    s.add_argument("--noiseless", action="store_true", help="write rounded expected counts instead of Poisson draws")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("calibrate", help="characterize probes and Bell analyzer from calibration counts")
    c.add_argument("--counts", required=True)
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_calibrate)

    r = sub.add_parser("reconstruct", help="maximum-likelihood chi from counts")
    r.add_argument("--scheme", choices=("sqpt", "dcqd"), required=True)
    r.add_argument("--counts", required=True)
    r.add_argument("--calibration")
    r.add_argument("--tp", action="store_true", help="penalize departures from trace preservation")
    r.add_argument("--bootstrap", type=int, default=0, metavar="B")
    r.add_argument("--seed", type=int, default=0, help="bootstrap seed")
    r.add_argument("--reference", help="chi file the bootstrap fidelity is measured against")
    r.add_argument("--tol", type=float, default=1e-10)
    r.add_argument("--max-iter", type=int, default=5000)
    r.add_argument("--out", required=True)
    r.set_defaults(func=cmd_reconstruct)

    cm = sub.add_parser("compare", help="Jamiolkowski fidelities between chi files")
    cm.add_argument("--a", required=True)
    cm.add_argument("--b", required=True)
    cm.add_argument("--truth")
    cm.add_argument("--out", required=True)
    cm.set_defaults(func=cmd_compare)

    p = sub.add_parser("plotdata", help="CSV of chi elements")
    p.add_argument("--chi", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plotdata)

    x = sub.add_parser("relaxation", help="T2:T1 from a single Bell-input setting")
    x.add_argument("--counts", required=True)
    x.add_argument("--config-id", type=int)
    x.add_argument("--out", required=True)
    x.set_defaults(func=cmd_relaxation)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ExtractionUndefinedError, UndefinedFidelityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (UsageError, ChannelSpecError, labsim.CountsFormatError, labsim.SchemaVersionError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
