"""Command-line experiment runner.

Exit codes: 0 success, 2 usage or validation error, 3 numeric failure
(overflow, non-finite values, unexpected instability).
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from pathlib import Path

from . import __version__
from .analysis import DEFAULT_K, DEFAULT_RUN_THRESHOLD, bibo_verdict, find_stability_boundary
from .coefficients import cifb_coefficients
from .errors import CIFBError
from .experiments import PRESETS, input_bound, run_ddc, run_perturbation
from .modulator import Mode, ModulatorConfig, Status, run
from .signals import SignalSpec, generate
from .transfer import eval_magnitude, ntf, stf

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


class UsageError(Exception):
    pass


def fmt(v) -> str:
    """Integers verbatim, reals with 17 significant digits."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return "%.17g" % v


def _clean(obj):
    """Replace non-finite floats by strings so JSON stays strict."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return fmt(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dump_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_csv(path: Path, header: list[str], rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    path.write_text(buf.getvalue())


def digest(values) -> str:
    h = hashlib.sha256()
    for v in values:
        h.update(fmt(v).encode())
        h.update(b"\n")
    return h.hexdigest()


def write_manifest(out: Path, command: str, params: dict, mode: str, status: str,
                   outputs: list[str], input_digest: str | None, notes=()) -> Path:
    manifest = {
        "command": command,
        "params": params,
        "mode": mode,
        "status": status,
        "outputs": sorted(outputs),
        "version": __version__,
        "input_digest": input_digest,
        "notes": list(notes),
    }
    path = out / "manifest.json"
    path.write_text(dump_json(manifest))
    return path


# -- argument plumbing -------------------------------------------------------

STIM_DEFAULTS = dict(amplitude=8.0, freqs=[0.01], samples=201, dq=0.0, mode="float",
                     round_input=False, llim=-math.inf, ulim=math.inf)


def _add_stimulus(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("stimulus and loop")
    g.add_argument("--amplitude", "-A", type=float)
    g.add_argument("--freq", "-F", type=float, action="append", dest="freqs",
                   help="relative tone frequency f/fs; give twice for a two-tone stimulus")
    g.add_argument("--samples", "-N", type=int)
    g.add_argument("--round-input", action="store_true", default=None,
                   help="round stimulus samples to integers")
    g.add_argument("--input-csv", type=Path, help="read stimulus from column 'x' of a CSV file")
    g.add_argument("--dq", type=float, help="quantization step (0 disables)")
    g.add_argument("--llim", type=float)
    g.add_argument("--ulim", type=float)
    g.add_argument("--mode", choices=["float", "int"])
    g.add_argument("--K", type=float, default=DEFAULT_K, help="BIBO gain bound")
    g.add_argument("--run-threshold", type=int, default=DEFAULT_RUN_THRESHOLD)


def _resolve(args, command: str, defaults: dict) -> dict:
    """Merge preset, command defaults and explicit flags (flags win)."""
    merged = dict(STIM_DEFAULTS)
    merged.update(defaults)
    notes: list[str] = []
    preset = getattr(args, "preset", None)
    if preset:
        pre = dict(PRESETS[preset])
        if pre.pop("command") != command:
            raise UsageError(f"preset {preset} belongs to another command")
        notes += pre.pop("notes", [])
        merged.update(pre)
    for key, val in vars(args).items():
        if val is not None and key not in ("func", "preset"):
            merged[key] = val
    merged["notes"] = notes
    return merged


def _stimulus(p: dict):
    """Return ``(SignalSpec or None, samples)`` for resolved parameters."""
    if p.get("input_csv"):
        with open(p["input_csv"], newline="") as fh:
            rows = list(csv.DictReader(fh))
        if not rows or "x" not in rows[0]:
            raise UsageError("input CSV needs a column named 'x'")
        xs = [float(r["x"]) for r in rows]
        if p["round_input"]:
            from ._rounding import round_half_away
            xs = [int(round_half_away(v)) for v in xs]
        elif all(v.is_integer() for v in xs) and p["mode"] == "int":
            xs = [int(v) for v in xs]
        return None, xs
    if p["samples"] is None or p["samples"] < 1:
        raise UsageError(f"stimulus length must be >= 1, got {p['samples']}")
    spec = SignalSpec(p["amplitude"], tuple(p["freqs"]), p["samples"], bool(p["round_input"]))
    return spec, generate(spec)


def _config(p: dict) -> ModulatorConfig:
    mode = Mode(p["mode"])
    dq = p["dq"]
    llim, ulim = p["llim"], p["ulim"]
    if mode is Mode.INT:
        if not float(dq).is_integer():
            raise UsageError("int mode needs an integer --dq")
        dq = int(dq)
    return ModulatorConfig.binomial(p["order"], dq=dq, llim=llim, ulim=ulim, mode=mode)


def _out_dir(p: dict) -> Path:
    out = Path(p["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _public(p: dict, keys) -> dict:
    return {k: (str(p[k]) if isinstance(p[k], Path) else p[k]) for k in keys if k in p}


# -- commands ----------------------------------------------------------------

def cmd_coeffs(args) -> int:
    cs = cifb_coefficients(args.order)
    if args.format == "json":
        sys.stdout.write(dump_json({"order": cs.order, "c": list(cs.c), "d": list(cs.d)}))
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "c", "d"])
        for k in range(1, cs.order + 2):
            w.writerow([k, cs.c_at(k) if k <= cs.order else "", cs.d_at(k)])
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def _verdict_line(v) -> str:
    state = "stable" if v.stable else "UNSTABLE"
    extra = f" first violation at n={v.first_violation_index}" if v.first_violation_index else ""
    return f"verdict: {state} ({v.reason}) max|y|={fmt(v.max_abs_output)}{extra}"


def cmd_simulate(args) -> int:
    p = _resolve(args, "simulate", dict(order=30))
    spec, x = _stimulus(p)
    if not x:
        raise UsageError("stimulus is empty")
    cfg = _config(p)
    if cfg.mode is Mode.INT and not all(isinstance(v, int) for v in x):
        raise UsageError("int mode needs integer samples: pass --round-input")
    trace = run(cfg, x)
    out = _out_dir(p)
    write_csv(out / "trace.csv", ["n", "x", "w", "y", "e"],
              zip(trace.n, trace.x, trace.w, trace.y, trace.e))
    B = input_bound(spec) if spec else max(max(abs(v) for v in x), 1e-300)
    verdict = bibo_verdict(trace, B, p["K"], p["run_threshold"])
    params = _public(p, ["preset", "order", "amplitude", "freqs", "samples", "round_input", "dq",
                         "llim", "ulim", "K", "run_threshold", "input_csv"])
    params["preset"] = getattr(args, "preset", None)
    params["verdict"] = verdict.to_dict()
    write_manifest(out, "simulate", params, cfg.mode.value, trace.status.value,
                   ["trace.csv"], digest(x), p["notes"])
    print(_verdict_line(verdict))
    print(f"status: {trace.status.value}, {len(trace)} samples -> {out / 'trace.csv'}")
    return EXIT_OK if trace.status is Status.COMPLETED else EXIT_NUMERIC


def cmd_perturb(args) -> int:
    p = _resolve(args, "perturb", dict(order=30, index=None, eps=1e-12))
    if p["index"] is not None and not 1 <= p["index"] <= p["order"]:
        raise UsageError(f"--index must lie in 1..{p['order']}")
    spec, _ = _stimulus(p)
    if spec is None:
        raise UsageError("perturb needs a generated stimulus")
    rep = run_perturbation(p["order"], spec, p["index"], p["eps"], p["dq"],
                           K=p["K"], run_threshold=p["run_threshold"])
    print(f"coefficient c_{rep.index} scaled by (1 + {fmt(rep.eps)})")
    print("reference " + _verdict_line(rep.reference_verdict))
    print("perturbed " + _verdict_line(rep.perturbed_verdict))
    print(f"max|y| ratio: {fmt(rep.ratio)}")
    if p.get("out"):
        out = _out_dir(p)
        (out / "perturb.json").write_text(dump_json(rep.to_dict()))
        params = _public(p, ["order", "index", "eps", "amplitude", "freqs", "samples", "dq", "K",
                             "run_threshold"])
        params["index"] = rep.index
        write_manifest(out, "perturb", params, "float", "completed", ["perturb.json"],
                       digest(generate(spec)), p["notes"])
    return EXIT_OK


def cmd_sweep(args) -> int:
    p = _resolve(args, "sweep", dict(order_min=30, order_max=40))
    lo, hi = p["order_min"], p["order_max"]
    if not 1 <= lo <= hi <= 64:
        raise UsageError(f"order range {lo}..{hi} outside 1..64")
    spec, _ = _stimulus(p)
    if spec is None:
        raise UsageError("sweep needs a generated stimulus")
    mode = Mode(p["mode"])
    dq = int(p["dq"]) if mode is Mode.INT else p["dq"]
    if mode is Mode.INT and not spec.integer_rounded:
        raise UsageError("int mode needs integer samples: pass --round-input")
    scan = find_stability_boundary(lo, hi, spec, p["K"], p["run_threshold"], mode, dq)
    out = _out_dir(p)
    write_csv(out / "sweep.csv", ["L", "stable", "reason", "max_abs_y"],
              [(L, v.stable, v.reason, v.max_abs_output) for L, v in scan.rows()])
    params = _public(p, ["order_min", "order_max", "amplitude", "freqs", "samples", "round_input",
                         "dq", "K", "run_threshold"])
    params["largest_stable"] = scan.largest_stable
    write_manifest(out, "sweep", params, mode.value, "completed", ["sweep.csv"],
                   digest(generate(spec)), p["notes"])
    for L, v in scan.rows():
        print(f"L={L:2d} {'stable  ' if v.stable else 'UNSTABLE'} {v.reason:15s} max|y|={fmt(v.max_abs_output)}")
    print(f"largest stable order: {scan.largest_stable}")
    return EXIT_OK


def cmd_ddc(args) -> int:
    p = _resolve(args, "ddc", dict(PRESETS["fig12"], window="bh0", band=None, simultaneous=False,
                                   full_scale=False))
    p.pop("command", None)
    notes = list(PRESETS["fig12"]["notes"]) if p["samples"] == PRESETS["fig12"]["samples"] else []
    if p["full_scale"]:
        p["samples"] = 2**24
        notes = []
    N = p["samples"]
    if N < 8 or N & (N - 1):
        raise UsageError(f"--samples must be a power of two >= 8, got {N}")
    mode = Mode(p["mode"])
    dq = int(p["dq"]) if mode is Mode.INT else p["dq"]
    groups = [tuple(p["freqs"])] if p["simultaneous"] or len(p["freqs"]) == 1 else [(f,) for f in p["freqs"]]
    out = _out_dir(p)
    outputs, failed, summary = [], False, []
    for i, freqs in enumerate(groups):
        sfx = "" if len(groups) == 1 else f"_{i + 1}"
        res = run_ddc(p["order"], p["amplitude"], freqs, N, dq, mode, bool(p["round_input"]),
                      p["window"], tuple(p["band"]) if p["band"] else None,
                      K=p["K"], run_threshold=p["run_threshold"])
        t = res.trace
        write_csv(out / f"trace{sfx}.csv", ["n", "x", "w", "y", "e"], zip(t.n, t.x, t.w, t.y, t.e))
        sp = res.spectrum
        write_csv(out / f"spectrum{sfx}.csv", ["frequency", "power_db", "reference_db"],
                  zip(sp.frequency.tolist(), sp.power_db.tolist(), res.reference_db().tolist()))
        expected = 20.0 * p["order"]
        slope = {
            "frequencies": list(freqs),
            "order": p["order"],
            "expected_slope_db_per_decade": expected,
            "window": sp.window_name,
            "band": list(res.band),
            "fit": res.fit.to_dict() if res.fit else None,
            "fit_error": res.fit_error or None,
            "relative_deviation": (res.fit.slope_db_per_decade - expected) / expected if res.fit else None,
            "verdict": res.verdict.to_dict(),
            "status": t.status.value,
        }
        (out / f"slope{sfx}.json").write_text(dump_json(slope))
        outputs += [f"trace{sfx}.csv", f"spectrum{sfx}.csv", f"slope{sfx}.json"]
        failed |= not res.verdict.stable or t.status is not Status.COMPLETED
        summary.append(slope)
        fitted = fmt(res.fit.slope_db_per_decade) if res.fit else f"n/a ({res.fit_error})"
        print(f"F={','.join(fmt(f) for f in freqs)}: " + _verdict_line(res.verdict))
        print(f"  noise slope over [{fmt(res.band[0])}, {fmt(res.band[1])}]: {fitted} dB/decade"
              f" (expected {fmt(expected)})")
    params = _public(p, ["order", "amplitude", "freqs", "samples", "dq", "round_input", "window",
                         "band", "simultaneous", "K", "run_threshold"])
    write_manifest(out, "ddc", params, mode.value, "unstable" if failed else "completed", outputs,
                   None, notes)
    return EXIT_NUMERIC if failed else EXIT_OK


def cmd_ntf(args) -> int:
    if args.points < 2:
        raise UsageError("--points must be >= 2")
    cs = cifb_coefficients(args.order)
    h_n, h_s = ntf(cs.c, cs.order), stf(cs.c, cs.d, cs.order)
    rows = []
    for i in range(1, args.points + 1):
        om = math.pi * i / args.points
        n_db = 20 * math.log10(eval_magnitude(h_n, om))
        s_db = 20 * math.log10(eval_magnitude(h_s, om))
        rows.append((om, n_db, s_db))
    if args.out:
        path = Path(args.out)
        path.mkdir(parents=True, exist_ok=True)
        write_csv(path / "ntf.csv", ["omega", "ntf_db", "stf_db"], rows)
        write_manifest(path, "ntf", {"order": args.order, "points": args.points}, "float",
                       "completed", ["ntf.csv"], None)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["omega", "ntf_db", "stf_db"])
        w.writerows([[fmt(v) for v in r] for r in rows])
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_reproduce(args) -> int:
    command = PRESETS[args.preset]["command"]
    argv = [command, "--preset", args.preset]
    if args.out:
        argv += ["--out", str(args.out)]
    return main(argv)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cifb", description="Binomial CIFB delta-sigma toolkit")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="print binomial loop coefficients")
    p.add_argument("--order", "-L", type=int, required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("simulate", help="run the modulator and write a trace")
    p.add_argument("--preset", choices=[k for k, v in PRESETS.items() if v["command"] == "simulate"])
    p.add_argument("--order", "-L", type=int)
    p.add_argument("--out", type=Path, default=Path("cifb-out/simulate"))
    _add_stimulus(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("perturb", help="scale one feedback coefficient and compare")
    p.add_argument("--preset", choices=["fig9"])
    p.add_argument("--order", "-L", type=int)
    p.add_argument("--index", type=int, help="1-based coefficient index (default: largest)")
    p.add_argument("--eps", type=float, help="relative perturbation")
    p.add_argument("--out", type=Path)
    _add_stimulus(p)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("sweep", help="stability verdicts over a range of orders")
    p.add_argument("--preset", choices=["fig11"])
    p.add_argument("--from", dest="order_min", type=int)
    p.add_argument("--to", dest="order_max", type=int)
    p.add_argument("--out", type=Path, default=Path("cifb-out/sweep"))
    _add_stimulus(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ddc", help="bit-width reduction run with noise spectrum and slope fit")
    p.add_argument("--preset", choices=["fig12"])
    p.add_argument("--order", "-L", type=int)
    p.add_argument("--window", choices=["bh0", "bh"])
    p.add_argument("--band", type=float, nargs=2, metavar=("F_LO", "F_HI"))
    p.add_argument("--simultaneous", action="store_true", default=None,
                   help="apply all tones at once instead of one run per tone")
    p.add_argument("--full-scale", action="store_true", default=None, help="use 2^24 samples")
    p.add_argument("--out", type=Path, default=Path("cifb-out/ddc"))
    _add_stimulus(p)
    p.set_defaults(func=cmd_ddc)

    p = sub.add_parser("ntf", help="NTF/STF magnitude table on (0, pi]")
    p.add_argument("--order", "-L", type=int, required=True)
    p.add_argument("--points", type=int, default=512)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_ntf)

    p = sub.add_parser("reproduce", help="run a named preset end to end")
    p.add_argument("preset", choices=sorted(PRESETS))
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_reproduce)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, CIFBError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
