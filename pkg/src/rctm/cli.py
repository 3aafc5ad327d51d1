"""Command-line front end: key entry, stream generation, test batteries,
analysis sweeps and dataset/report export.

Exit codes: 0 on success, 1 on invalid parameters or unwritable output,
2 when a test battery runs but misses its acceptance thresholds.  All file
output is byte-deterministic for a fixed invocation.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict

import numpy as np

from . import analysis, dynamics, nist
from .core import InvalidKeyError, MapKey, ctm_key, make_key, orbit_chunks
from .ent import ent_battery
from .prbg import pack_bytes, quantize_values

# ENT gate values, calibrated for the standard 10^6-byte battery run
ENT_THRESHOLDS = {
    "min_entropy": 7.999,
    "mean_tolerance": 0.3,
    "max_serial_correlation": 0.005,
    "max_pi_error_pct": 0.5,
    "chi_square_percentile_range": (1.0, 99.0),
}

DEGENERATE_TAIL = 100


def _parse_float(text: str) -> float:
    """Decimal or C99 hex float literal (e.g. 0x1p-48) to binary64."""
    try:
        return float(text)
    except ValueError:
        return float.fromhex(text)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None  # keep reports strict-JSON parseable
    return obj


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(_jsonable(payload), fh, indent=2)
        fh.write("\n")


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _key_meta(key: MapKey) -> dict:
    return {
        "mu": key.mu,
        "mu_hex": float(key.mu).hex(),
        "x0": key.x0,
        "x0_hex": float(key.x0).hex(),
        "n1": key.n1,
        "n2": key.n2,
        "key_fingerprint": key.fingerprint(),
    }


def _stream_bits(key: MapKey, n: int, burn_in: int) -> tuple[np.ndarray, bool]:
    """Bits plus a degenerate-tail flag (last 100 samples identical)."""
    chunks = []
    tail = np.empty(0)
    for block in orbit_chunks(key, n, burn_in):
        chunks.append((block >= 0.5).astype(np.uint8))
        tail = np.concatenate([tail, block])[-DEGENERATE_TAIL:]
    bits = np.concatenate(chunks)
    degenerate = tail.size >= DEGENERATE_TAIL and bool(np.all(tail == tail[0]))
    return bits, degenerate


def _warn_degenerate() -> None:
    print(f"warning: degenerate orbit, last {DEGENERATE_TAIL} samples identical "
          "(stream written anyway)", file=sys.stderr)


def _write_bits(path: str, bits: np.ndarray, fmt: str) -> int:
    """Write a bit array in the chosen format; returns raw pad bit count."""
    if fmt == "ascii-bits":
        with open(path, "wb") as fh:
            fh.write((bits + ord("0")).astype(np.uint8).tobytes())
            fh.write(b"\n")
        return 0
    payload, pad = pack_bytes(bits)
    with open(path, "wb") as fh:
        fh.write(payload)
    return pad


def cmd_generate(args) -> int:
    key = make_key(args.mu, args.x0)
    bits, degenerate = _stream_bits(key, args.bits, args.burn_in)
    if degenerate:
        _warn_degenerate()
    pad = _write_bits(args.output, bits, args.format)
    if args.meta:
        meta = {
            "command": "generate",
            **_key_meta(key),
            "bits": args.bits,
            "burn_in": args.burn_in,
            "format": args.format,
            "pad_bits": pad,
        }
        _write_json(args.output + ".meta.json", meta)
    return 0


def cmd_export(args) -> int:
    key = make_key(args.mu, args.x0)
    bits, degenerate = _stream_bits(key, args.segments * args.bits, args.burn_in)
    if degenerate:
        _warn_degenerate()
    ext = "txt" if args.format == "ascii-bits" else "bin"
    files = []
    for i in range(args.segments):
        seg = bits[i * args.bits:(i + 1) * args.bits]
        path = f"{args.output}_{i:03d}.{ext}"
        pad = _write_bits(path, seg, args.format)
        files.append({"file": path, "segment": i, "bits": args.bits, "pad_bits": pad})
    manifest = {
        "command": "export",
        **_key_meta(key),
        "segments": args.segments,
        "bits_per_segment": args.bits,
        "burn_in": args.burn_in,
        "format": args.format,
        "files": files,
    }
    _write_json(f"{args.output}_manifest.json", manifest)
    return 0


def _dynamics_key(mu: float, x0: float) -> MapKey:
    return ctm_key(mu, x0) if 0.0 < mu <= 2.0 else make_key(mu, x0)


def _mu_grid(args) -> list[float]:
    if args.mu is not None:
        return [args.mu]
    return [float(v) for v in np.linspace(args.mu_min, args.mu_max, args.grid_points)]


def cmd_analyze_dynamics(args) -> int:
    if args.what == "bifurcation":
        result = dynamics.bifurcation_sample(_mu_grid(args), args.x0,
                                             settle=args.settle, keep=args.keep)
        if result.skipped_mu:
            print(f"skipped unsupported mu values: {result.skipped_mu}", file=sys.stderr)
        if args.format == "csv":
            _write_csv(args.output, ["mu", "x"],
                       ((repr(p.mu), repr(p.x)) for p in result.points))
        else:
            _write_json(args.output, {
                "what": "bifurcation", "x0": args.x0,
                "settle": result.settle, "keep": result.keep,
                "skipped_mu": result.skipped_mu,
                "points": [[p.mu, p.x] for p in result.points],
            })
    elif args.what == "lyapunov":
        estimates = dynamics.lyapunov_grid(_mu_grid(args), args.x0,
                                           n=args.iterations, burn_in=args.burn_in)
        if args.format == "csv":
            _write_csv(args.output, ["mu", "lambda"],
                       ((repr(e.mu), repr(e.exponent)) for e in estimates))
        else:
            _write_json(args.output, {
                "what": "lyapunov", "x0": args.x0, "iterations": args.iterations,
                "burn_in": args.burn_in,
                "estimates": [{"mu": e.mu, "lambda": e.exponent,
                               "n_samples": e.n_samples} for e in estimates],
            })
    else:
        rows = []
        for mu in _mu_grid(args):
            cov = dynamics.phase_coverage(_dynamics_key(mu, args.x0),
                                          n=args.iterations, bins=args.bins)
            rows.append((mu, cov))
        if args.format == "csv":
            _write_csv(args.output, ["mu", "coverage"],
                       ((repr(mu), repr(cov)) for mu, cov in rows))
        else:
            _write_json(args.output, {
                "what": "coverage", "x0": args.x0, "iterations": args.iterations,
                "bins": args.bins,
                "points": [{"mu": mu, "coverage": cov} for mu, cov in rows],
            })
    return 0


def cmd_test_nist(args) -> int:
    from .prbg import segmented_streams
    key = make_key(args.mu, args.x0)
    streams = segmented_streams(key, args.streams, args.bits, burn_in=args.burn_in)
    report = nist.nist_battery(streams)
    payload = {
        "battery": report.battery,
        "alpha": report.alpha,
        "stream_meta": {**report.stream_meta, "burn_in": args.burn_in},
        "entries": [asdict(e) for e in report.entries],
        "passed": report.passed,
    }
    _write_json(args.output, payload)
    if not report.passed:
        print("nist battery below minimum pass proportion", file=sys.stderr)
        return 2
    return 0


def _ent_checks(report) -> dict[str, bool]:
    lo, hi = ENT_THRESHOLDS["chi_square_percentile_range"]
    return {
        "entropy": report.entropy_bits_per_byte >= ENT_THRESHOLDS["min_entropy"],
        "arithmetic_mean": abs(report.arithmetic_mean - 127.5) <= ENT_THRESHOLDS["mean_tolerance"],
        "serial_correlation": (math.isfinite(report.serial_correlation)
                               and abs(report.serial_correlation) <= ENT_THRESHOLDS["max_serial_correlation"]),
        "monte_carlo_pi": (math.isfinite(report.monte_carlo_pi_error_pct)
                           and report.monte_carlo_pi_error_pct <= ENT_THRESHOLDS["max_pi_error_pct"]),
        "chi_square": lo <= report.chi_square_percentile <= hi,
    }


def cmd_test_ent(args) -> int:
    key = make_key(args.mu, args.x0)
    chunks = []
    tail = np.empty(0)
    for block in orbit_chunks(key, args.bytes, args.burn_in):
        chunks.append(quantize_values(block))
        tail = np.concatenate([tail, block])[-DEGENERATE_TAIL:]
    if tail.size >= DEGENERATE_TAIL and bool(np.all(tail == tail[0])):
        _warn_degenerate()
    report = ent_battery(np.concatenate(chunks))
    checks = _ent_checks(report)
    payload = {
        "battery": "ent",
        "stream_meta": {**_key_meta(key), "bytes": args.bytes, "burn_in": args.burn_in},
        "report": asdict(report),
        "thresholds": _jsonable(ENT_THRESHOLDS),
        "checks": checks,
        "passed": all(checks.values()),
    }
    _write_json(args.output, payload)
    if not payload["passed"]:
        failing = [k for k, ok in checks.items() if not ok]
        print(f"ent battery outside thresholds: {', '.join(failing)}", file=sys.stderr)
        return 2
    return 0


def _sweep_payload(result: analysis.SweepResult) -> dict:
    return {
        "base_key": _key_meta(result.base_key),
        "vary": result.vary,
        "delta": result.delta,
        "delta_hex": float(result.delta).hex(),
        "pairs": result.pairs,
        "length": result.length,
        "burn_in": result.burn_in,
        "skipped_offsets": list(result.skipped_offsets),
        "aggregates": result.aggregates(),
    }


def cmd_sweep(args) -> int:
    key = make_key(args.mu, args.x0)
    if args.kind in ("correlation", "differential"):
        result = analysis.correlation_sweep(key, delta=args.delta, pairs=args.pairs,
                                            length=args.length, vary=args.vary,
                                            burn_in=args.burn_in)
        payload = {"kind": args.kind, **_sweep_payload(result)}
        if args.pairs_csv:
            _write_csv(args.pairs_csv, ["pair", "correlation", "uaci_pct", "npcr_pct"],
                       ((i + 1, repr(float(result.correlations[i])),
                         repr(float(result.uaci_pct[i])), repr(float(result.npcr_pct[i])))
                        for i in range(result.pairs)))
    elif args.kind == "sensitivity":
        result = analysis.key_sensitivity_run(args.case, key, delta=args.delta,
                                              sequences=args.sequences,
                                              length=args.length)
        payload = {
            "kind": "sensitivity",
            "case": result.case,
            "base_key": _key_meta(key),
            "delta": result.delta,
            "delta_hex": float(result.delta).hex(),
            "sequences": args.sequences,
            "length": args.length,
            "offsets": list(result.offsets),
            "skipped_offsets": list(result.skipped_offsets),
            "pairwise_correlations": result.pairwise_correlations,
            "max_abs_off_diagonal": result.max_off_diagonal(),
            "preview": result.preview,
        }
    else:
        result = analysis.entropy_sweep(key, sequences=args.sequences,
                                        length=args.length,
                                        seed_increment=args.seed_increment)
        payload = {
            "kind": "entropy",
            "base_key": _key_meta(key),
            "sequences": result.sequences,
            "length": result.length,
            "seed_increment": result.seed_increment,
            "mean_entropy": result.mean_entropy,
            "entropies": result.entropies,
        }
    _write_json(args.output, payload)
    return 0


def cmd_keyspace(args) -> int:
    report = analysis.keyspace_report(args.precision_exponent)
    _write_json(args.output, {
        "precision_exponent": report.precision_exponent,
        "component_counts": report.component_counts,
        "total_bits": report.total_bits,
        "weak_key_adjusted_bits": report.weak_key_adjusted_bits,
    })
    return 0


def _add_key_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mu", type=_parse_float, required=True,
                   help="control parameter (decimal or hex float literal)")
    p.add_argument("--x0", type=_parse_float, required=True,
                   help="initial condition in (0, 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rctm",
        description="Robust chaotic tent map bit generator and analysis toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a thresholded bitstream")
    _add_key_args(p)
    p.add_argument("--bits", type=int, required=True)
    p.add_argument("--burn-in", type=int, default=0)
    p.add_argument("--format", choices=("raw", "ascii-bits"), default="raw")
    p.add_argument("--meta", action="store_true", help="write a sidecar .meta.json")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("export", help="write disjoint stream segments plus a manifest")
    _add_key_args(p)
    p.add_argument("--bits", type=int, required=True, help="bits per segment")
    p.add_argument("--segments", type=int, default=1)
    p.add_argument("--burn-in", type=int, default=0)
    p.add_argument("--format", choices=("raw", "ascii-bits"), default="raw")
    p.add_argument("-o", "--output", required=True, help="output path prefix")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("analyze-dynamics", help="bifurcation, Lyapunov or coverage datasets")
    p.add_argument("--what", choices=("bifurcation", "lyapunov", "coverage"), required=True)
    p.add_argument("--mu", type=_parse_float, help="single mu (alternative to a grid)")
    p.add_argument("--mu-min", type=_parse_float, default=2.001)
    p.add_argument("--mu-max", type=_parse_float, default=99.999)
    p.add_argument("--grid-points", type=int, default=200)
    p.add_argument("--x0", type=_parse_float, default=0.23)
    p.add_argument("--settle", type=int, default=dynamics.DEFAULT_SETTLE)
    p.add_argument("--keep", type=int, default=dynamics.DEFAULT_KEEP)
    p.add_argument("--iterations", type=int, default=100_000)
    p.add_argument("--burn-in", type=int, default=100)
    p.add_argument("--bins", type=int, default=1000)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_analyze_dynamics)

    p = sub.add_parser("test-nist", help="run the in-house NIST SP 800-22 subset")
    _add_key_args(p)
    p.add_argument("--streams", type=int, default=20)
    p.add_argument("--bits", type=int, default=1_000_000, help="bits per stream")
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--format", choices=("json",), default="json")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_test_nist)

    p = sub.add_parser("test-ent", help="run the ENT-style byte battery")
    _add_key_args(p)
    p.add_argument("--bytes", type=int, default=1_000_000)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--format", choices=("json",), default="json")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_test_ent)

    p = sub.add_parser("sweep", help="perturbation and entropy sweeps")
    p.add_argument("--kind", choices=("correlation", "differential", "sensitivity", "entropy"),
                   required=True)
    _add_key_args(p)
    p.add_argument("--delta", type=_parse_float, default=analysis.DEFAULT_DELTA,
                   help="perturbation step (decimal or hex float, e.g. 0x1p-48)")
    p.add_argument("--vary", choices=("mu", "x0"), default="mu")
    p.add_argument("--case", choices=("vary_mu", "vary_x0"), default="vary_mu")
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--sequences", type=int, default=5)
    p.add_argument("--length", type=int, default=1000)
    p.add_argument("--burn-in", type=int, default=100)
    p.add_argument("--seed-increment", type=_parse_float, default=2.0 ** -20)
    p.add_argument("--pairs-csv", help="also write per-pair metrics as CSV")
    p.add_argument("--format", choices=("json",), default="json")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("keyspace", help="key-space accounting report")
    p.add_argument("--precision-exponent", type=int, default=-16)
    p.add_argument("--format", choices=("json",), default="json")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_keyspace)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidKeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
