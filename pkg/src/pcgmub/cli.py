"""Command line interface: ``pcgmub <command> [options]``.

Every command prints a short human summary followed by a machine-readable
result (JSON by default, CSV with ``--format csv``).  With ``--out`` the
machine-readable part goes to that file instead; ``kl-histogram`` treats
``--out`` as a directory and writes one histogram CSV per dimension there.

Angles on the command line are in degrees.  Periods are dimensionless.

Exit codes: 0 success, 2 usage error, 3 numerical acceptance failure.

A ``--config`` file holds ``key = value`` lines using the long option names
(``grid-n = 4096``); options given on the command line take precedence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import scenarios
from .exceptions import PcgError
from .mub import check_pair, is_valid_m, search_quadruples, triple_periods
from .optics import (
    BenchSpec,
    Lens,
    Reflection,
    compose_stages,
    frft_lens_distance,
    lens_angle,
    period_table,
    period_table_csv,
    physical_periods,
    scaling_factor,
)
from .stats import histogram_csv, kl_histogram

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- output


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(args, summary: list[str], payload: dict, csv_text: str, out=None) -> None:
    out = out or sys.stdout
    for line in summary:
        print(line, file=out)
    if args.format == "json":
        text = json.dumps(_jsonable(payload), indent=2) + "\n"
    else:
        text = csv_text
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}", file=out)
    else:
        out.write(text)


def _fmt(x: float) -> str:
    return f"{x:.6g}"


# ---------------------------------------------------------------- commands


def _bench(args) -> BenchSpec:
    if args.pixel is not None and not args.pixel > 0:
        raise UsageError("--pixel must be > 0")
    if not 0 < args.bench_angle < 180:
        raise UsageError("--bench-angle must lie in (0, 180) degrees")
    return BenchSpec(
        wavelength=args.wavelength * 1e-9,
        focal_length=args.focal * 1e-3,
        angle=math.radians(args.bench_angle),
        pixel_length=args.pixel * 1e-6,
    )


def cmd_replay_periods(args) -> int:
    bench = _bench(args)
    rows = period_table(bench, range(2, 11))
    checks = dict(scenarios.check_period_table(rows))
    ok = all(checks.values())
    summary = [f"delta = {bench.scale * 1e6:.3f} um"]
    summary += [
        f"d={r.d:2d}  T={r.period_um:7.1f} um  T/l={r.period_over_pixel:6.1f}  "
        f"T_exp={round(r.quantized_um):5d} um  {'ok' if checks[r.d] else 'MISMATCH'}"
        for r in rows
    ]
    summary.append("all rows match the reference table" if ok else "reference mismatch")
    payload = {
        "delta_um": bench.scale * 1e6,
        "rows": [
            {
                "d": r.d,
                "T_um": round(r.period_um, 1),
                "T_over_l": round(r.period_over_pixel, 1),
                "T_exp_um": round(r.quantized_um),
                "matches_reference": checks[r.d],
            }
            for r in rows
        ],
        "ok": ok,
    }
    _emit(args, summary, payload, period_table_csv(rows))
    return EXIT_OK if ok else EXIT_FAIL


def _grid_kwargs(args):
    if args.grid_n < 16:
        raise UsageError("--grid-n must be >= 16")
    if args.extent is not None and not args.extent > 0:
        raise UsageError("--extent must be > 0")
    return {"n_points": args.grid_n, "extent": args.extent}


def _simulate_pair(args) -> int:
    if args.d < 2:
        raise UsageError("--d must be >= 2")
    if not is_valid_m(args.m, args.d):
        raise UsageError(f"m={args.m} is excluded for d={args.d}")
    if args.k0 is not None and not 0 <= args.k0 < args.d:
        raise UsageError("--k0 must lie in [0, d)")
    res = scenarios.simulate_pair(
        args.d, math.radians(args.theta), math.radians(args.theta_prime), args.m,
        k0=args.k0, **_grid_kwargs(args),
    )
    bins = range(args.d) if args.k0 is None else [args.k0]
    ok = res.max_deviation <= args.tol and res.periods_covered >= 8
    summary = [
        f"pair d={args.d} theta'={args.theta_prime} deg -> theta={args.theta} deg, "
        f"m={args.m}, T={_fmt(res.period)}, grid spans {res.periods_covered:.1f} periods",
        f"max |p - 1/d| = {res.max_deviation:.3e} (tol {args.tol:g}), "
        f"max KL = {res.kl.max():.3e} bits: {'PASS' if ok else 'FAIL'}",
    ]
    records = [
        {"k0": k, "p": p, "max_deviation": dv, "kl_bits": kl}
        for k, p, dv, kl in zip(bins, res.probabilities, res.deviations, res.kl)
    ]
    payload = {
        "scenario": "pair", "d": args.d, "theta_deg": args.theta,
        "theta_prime_deg": args.theta_prime, "m": args.m, "period": res.period,
        "grid_n": res.grid.n_points, "half_extent": res.grid.half_extent,
        "results": records, "max_deviation": res.max_deviation, "ok": ok,
    }
    header = ["k0"] + [f"p_{i}" for i in range(args.d)] + ["max_deviation", "kl_bits"]
    rows = [[r["k0"], *map(_fmt, r["p"]), _fmt(r["max_deviation"]), _fmt(r["kl_bits"])]
            for r in records]
    _emit(args, summary, payload, _csv(header, rows))
    return EXIT_OK if ok else EXIT_FAIL


def _simulate_triple(args) -> int:
    k0 = 0 if args.k0 is None else args.k0
    if not 0 <= k0 < args.d:
        raise UsageError("--k0 must lie in [0, d)")
    res = scenarios.simulate_triple(args.d, k0, **_grid_kwargs(args))
    ok = res.cross_max <= args.tol and res.control_max <= 1e-3
    deg = [round(math.degrees(t)) for t in res.directions]
    summary = [
        f"triple d={args.d} k0={k0} directions {deg} deg, T={_fmt(res.period)}",
        f"cross-direction max |p - 1/d| = {res.cross_max:.3e} (tol {args.tol:g}); "
        f"same-direction 1 - p_k0 = {res.control_max:.3e}: {'PASS' if ok else 'FAIL'}",
    ]
    records, rows = [], []
    for i in range(3):
        for j in range(3):
            p = res.probabilities[i, j]
            records.append({"prep_deg": deg[i], "meas_deg": deg[j], "p": p,
                            "deviation": res.deviation[i, j], "control": i == j})
            rows.append([deg[i], deg[j], *map(_fmt, p), _fmt(res.deviation[i, j])])
    payload = {"scenario": "triple", "d": args.d, "k0": k0, "period": res.period,
               "results": records, "cross_max": res.cross_max,
               "control_max": res.control_max, "ok": ok}
    header = ["prep_deg", "meas_deg"] + [f"p_{i}" for i in range(args.d)] + ["deviation"]
    _emit(args, summary, payload, _csv(header, rows))
    return EXIT_OK if ok else EXIT_FAIL


def _simulate_alpha23(args) -> int:
    points = scenarios.alpha23_sweep(args.d, n_points=args.grid_n)
    ok = all(p.max_kl < 0.05 for p in points if p.reliable)
    summary = [f"~23 deg sweep d={args.d}: preparation bin widths in pixels"]
    summary += [
        f"  width={p.width_pixels:3d}px  KL={p.max_kl:.3e} bits"
        + ("" if p.reliable else "  (unreliable: grid too coarse or too short)")
        for p in points
    ]
    summary.append("reliable widths below 0.05 bits: " + ("PASS" if ok else "FAIL"))
    payload = {"scenario": "alpha23", "d": args.d,
               "results": [p.__dict__ for p in points], "ok": ok}
    rows = [[p.d, p.width_pixels, _fmt(p.period_prime), _fmt(p.period), _fmt(p.max_kl),
             _fmt(p.max_deviation), int(p.reliable)] for p in points]
    header = ["d", "width_pixels", "T_prep", "T_meas", "max_kl", "max_deviation", "reliable"]
    _emit(args, summary, payload, _csv(header, rows))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_simulate_mub(args) -> int:
    return {
        "pair": _simulate_pair,
        "triple": _simulate_triple,
        "alpha23": _simulate_alpha23,
    }[args.scenario](args)


def _parse_dims(text: str) -> list[int]:
    dims = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            dims.extend(range(int(lo), int(hi) + 1))
        elif part:
            dims.append(int(part))
    if not dims or min(dims) < 2:
        raise UsageError("dimensions must be integers >= 2")
    return dims


def cmd_kl_histogram(args) -> int:
    if args.samples < 1000:
        raise UsageError("--samples must be >= 1000")
    dims = _parse_dims(args.dims)
    results = [scenarios.kl_analysis(d, args.samples, args.seed, args.grid_n) for d in dims]
    hist = {}
    for r in results:
        edges, prob = kl_histogram(r.random_kl, r.d)
        hist[r.d] = (edges, prob)
    ok = all(r.meets_reference and r.max_simulated < 0.01 for r in results)
    summary = [f"KL baseline: {args.samples} flat-Dirichlet samples per d, seed {args.seed}"]
    for r in results:
        ref = "n/a" if r.reference is None else f"{r.reference:.4f}"
        summary.append(
            f"d={r.d:2d} max simulated KL={r.max_simulated:.3e} bits  "
            f"exceedance={r.exceedance:.5f} (reference {ref})"
        )
    summary.append("PASS" if ok else "FAIL")
    payload = {
        "samples": args.samples, "seed": args.seed, "ok": ok,
        "results": [
            {
                "d": r.d, "max_simulated_kl": r.max_simulated,
                "simulated_kl": r.simulated_kl, "exceedance": r.exceedance,
                "reference": r.reference,
                "histogram": {"bin_edges": hist[r.d][0], "probability": hist[r.d][1]},
            }
            for r in results
        ],
    }
    rows = [[r.d, _fmt(r.max_simulated), f"{r.exceedance:.6f}",
             "" if r.reference is None else r.reference, int(r.meets_reference)]
            for r in results]
    summary_csv = _csv(["d", "max_simulated_kl", "exceedance", "reference", "ok"], rows)
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        for d, (edges, prob) in hist.items():
            (out_dir / f"kl_hist_d{d}.csv").write_text(histogram_csv(edges, prob))
        name = "summary.json" if args.format == "json" else "summary.csv"
        text = json.dumps(_jsonable(payload), indent=2) + "\n" if args.format == "json" else summary_csv
        (out_dir / name).write_text(text)
        summary.append(f"wrote {len(hist)} histograms and {name} to {out_dir}")
        print("\n".join(summary))
    else:
        _emit(args, summary, payload, summary_csv)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_check_pair(args) -> int:
    if args.period is None or args.period_prime is None:
        raise UsageError("--T and --T-prime are required")
    delta = math.radians(args.theta - args.theta_prime)
    m_star = 2 * math.pi * args.d * abs(math.sin(delta)) / (args.period * args.period_prime)
    m = check_pair(args.period, args.period_prime, delta, args.d, args.tol)
    ok = m is not None
    summary = [
        f"d={args.d}, delta theta={args.theta - args.theta_prime} deg, "
        f"T={_fmt(args.period)}, T'={_fmt(args.period_prime)}: m* = {m_star:.9g}",
        f"unbiased with m={m}" if ok else "not unbiased (m* not a valid integer)",
    ]
    payload = {"d": args.d, "T": args.period, "T_prime": args.period_prime,
               "delta_theta_deg": args.theta - args.theta_prime,
               "m_star": m_star, "m": m, "ok": ok}
    csv_text = _csv(list(payload), [[_jsonable(v) if v is not None else "" for v in payload.values()]])
    _emit(args, summary, payload, csv_text)
    return EXIT_OK if ok else EXIT_FAIL


def _parse_m(text: str) -> tuple[int, int, int]:
    try:
        vals = tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError("--m takes one integer or three comma-separated integers") from exc
    if len(vals) == 1:
        vals = vals * 3
    if len(vals) != 3:
        raise UsageError("--m takes one integer or three comma-separated integers")
    return vals


def cmd_triple(args) -> int:
    m = _parse_m(args.m)
    for v in m:
        if not is_valid_m(v, args.d):
            raise UsageError(f"m={v} is excluded for d={args.d}")
    periods = triple_periods(*m, args.d)
    bench = _bench(args)
    phys = physical_periods(args.d, bench, m)
    thetas = scenarios.TRIPLE_DIRECTIONS
    pairs = [(0, 1, m[0]), (0, 2, m[1]), (1, 2, m[2])]
    found = [check_pair(periods[i], periods[j], thetas[i] - thetas[j], args.d) for i, j, _ in pairs]
    ok = all(f == want for f, (_, _, want) in zip(found, pairs))
    summary = [
        f"triple d={args.d} m={m}: T_x={_fmt(periods[0])}, T_r={_fmt(periods[1])}, "
        f"T_s={_fmt(periods[2])}",
        "physical periods (um): " + ", ".join(f"{t * 1e6:.1f}" for t in phys),
        "pairwise checks: " + ", ".join(f"{'xrs'[i]}{'xrs'[j]}->{f}" for (i, j, _), f in zip(pairs, found)),
        "PASS" if ok else "FAIL",
    ]
    payload = {"d": args.d, "m": m, "periods": periods,
               "physical_periods_um": [t * 1e6 for t in phys],
               "pair_m": found, "ok": ok}
    rows = [[name, _fmt(t), f"{p * 1e6:.1f}"] for name, t, p in zip(("x", "r", "s"), periods, phys)]
    _emit(args, summary, payload, _csv(["direction", "T", "T_um"], rows))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_search_quadruples(args) -> int:
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    try:
        res = search_quadruples(args.samples, args.seed)
    except RuntimeError as exc:
        print(f"FAIL: {exc}")
        return EXIT_FAIL
    ok = res.min_residual > 1e-3
    deg = [math.degrees(t) for t in res.argmin]
    summary = [
        f"{res.trials} random direction triples (theta1 = 0), seed {args.seed}",
        f"min non-degenerate residual = {res.min_residual:.4e} at "
        f"({', '.join(f'{t:.3f}' for t in deg)}) deg; "
        f"{res.n_degenerate} degenerate, {res.n_excluded} excluded",
        "PASS (no fourth direction)" if ok else "FAIL",
    ]
    payload = {"trials": res.trials, "seed": args.seed, "min_residual": res.min_residual,
               "argmin_deg": deg, "n_degenerate": res.n_degenerate,
               "n_excluded": res.n_excluded, "ok": ok}
    rows = [[res.trials, args.seed, f"{res.min_residual:.6e}", *(f"{t:.6f}" for t in deg),
             res.n_degenerate, res.n_excluded]]
    header = ["trials", "seed", "min_residual", "theta2_deg", "theta3_deg", "theta4_deg",
              "n_degenerate", "n_excluded"]
    _emit(args, summary, payload, _csv(header, rows))
    return EXIT_OK if ok else EXIT_FAIL


def _parse_stages(text: str):
    stages = []
    for token in text.split(","):
        token = token.strip().lower()
        if token in ("reflect", "reflection", "r"):
            stages.append(Reflection())
            continue
        parts = token.split(":")
        if len(parts) != 3 or parts[0] != "lens":
            raise UsageError(f"bad stage {token!r}; use lens:F_MM:Z_MM or reflect")
        stages.append(Lens(float(parts[1]) * 1e-3, float(parts[2]) * 1e-3))
    return stages


def cmd_optics(args) -> int:
    f = args.focal * 1e-3
    lam = args.wavelength * 1e-9
    quantities: dict[str, float | bool | str] = {"focal_mm": args.focal,
                                                   "wavelength_nm": args.wavelength}
    if args.distance is not None:
        theta = lens_angle(f, args.distance * 1e-3)
        quantities["distance_mm"] = args.distance
    else:
        theta = math.radians(args.theta)
        quantities["distance_mm"] = frft_lens_distance(f, theta) * 1e3
    quantities["theta_deg"] = math.degrees(theta)
    if abs(math.sin(theta)) > 1e-9:
        quantities["delta_um"] = scaling_factor(lam, f, theta) * 1e6
    if args.stages:
        net = compose_stages(_parse_stages(args.stages))
        quantities["net_angle_deg"] = math.degrees(net.angle)
        quantities["signed_angle_deg"] = math.degrees(net.signed_angle)
        quantities["effective_angle_deg"] = math.degrees(net.effective_angle)
        quantities["axis_flipped"] = net.axis_flipped
    summary = [f"{k} = {_fmt(v) if isinstance(v, float) else v}" for k, v in quantities.items()]
    rows = [[k, _jsonable(v)] for k, v in quantities.items()]
    _emit(args, summary, quantities, _csv(["quantity", "value"], rows))
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="write the machine-readable result here")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="key = value file of option defaults")


def _add_grid(p):
    p.add_argument("--grid-n", type=int, default=scenarios.DEFAULT_N)
    p.add_argument("--extent", type=float, default=None,
                   help="approximate grid half width (default: balanced grid)")


def _add_bench(p):
    p.add_argument("--wavelength", type=float, default=635.0, help="nm")
    p.add_argument("--focal", type=float, default=400.0, help="mm")
    p.add_argument("--bench-angle", type=float, default=60.0, help="degrees")
    p.add_argument("--pixel", type=float, default=8.0, help="SLM pixel length in um")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pcgmub",
        description="Periodic coarse-grained measurements and mutual unbiasedness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("replay-periods", help="optical-bench mask period table")
    _add_common(p)
    _add_bench(p)
    p.set_defaults(func=cmd_replay_periods)

    p = sub.add_parser("simulate-mub", help="prepare and measure PCG eigenstates")
    _add_common(p)
    _add_grid(p)
    p.add_argument("scenario", nargs="?", choices=("pair", "triple", "alpha23"), default="pair")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--theta", type=float, default=120.0, help="measurement direction, deg")
    p.add_argument("--theta-prime", type=float, default=0.0, help="preparation direction, deg")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--k0", type=int, default=None, help="preparation bin (default: all)")
    p.add_argument("--tol", type=float, default=1e-2)
    p.set_defaults(func=cmd_simulate_mub)

    p = sub.add_parser("kl-histogram", help="random-baseline KL histograms and exceedance")
    _add_common(p)
    _add_grid(p)
    p.add_argument("--d", dest="dims", default="2-10", help="e.g. 5, 2-10 or 2,3,7")
    p.add_argument("--samples", type=int, default=100_000)
    p.set_defaults(func=cmd_kl_histogram)

    p = sub.add_parser("check-pair", help="test the unbiasedness condition for two periods")
    _add_common(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--T", dest="period", type=float)
    p.add_argument("--T-prime", dest="period_prime", type=float)
    p.add_argument("--theta", type=float, default=90.0)
    p.add_argument("--theta-prime", type=float, default=0.0)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_check_pair)

    p = sub.add_parser("triple", help="periods of the symmetric triple")
    _add_common(p)
    _add_bench(p)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--m", default="1", help="m, or m1,m2,m3")
    p.set_defaults(func=cmd_triple)

    p = sub.add_parser("search-quadruples", help="random search for a fourth direction")
    _add_common(p)
    p.add_argument("--samples", type=int, default=100_000)
    p.set_defaults(func=cmd_search_quadruples)

    p = sub.add_parser("optics", help="lens geometry, scaling factor and stage composition")
    _add_common(p)
    p.add_argument("--focal", type=float, default=400.0, help="mm")
    p.add_argument("--wavelength", type=float, default=635.0, help="nm")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--distance", type=float, help="lens distance z in mm")
    g.add_argument("--theta", type=float, default=60.0, help="rotation angle, deg")
    p.add_argument("--stages", help="comma list of lens:F_MM:Z_MM and reflect")
    p.set_defaults(func=cmd_optics)
    return parser


def _config_tokens(path: str) -> list[str]:
    tokens = []
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        tokens += [f"--{key.replace('_', '-')}", value]
    return tokens


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            # config values go first so explicit flags win
            tokens = _config_tokens(args.config)
            cmd_at = argv.index(args.command)
            args = parser.parse_args(argv[: cmd_at + 1] + tokens + argv[cmd_at + 1 :])
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (UsageError, PcgError) as exc:
        print(f"pcgmub: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
