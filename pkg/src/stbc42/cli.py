"""Command-line frontend.

Subcommands::

    verify       structural checks + decoder oracle-equivalence batch
    mindet       exhaustive minimum-determinant scan for one rotation
    sweep-angle  minimum determinant across a rotation-angle grid (CSV)
    ber          Monte Carlo BER sweep (CSV per the documented schema)
    bench        decoder complexity counters vs. the 4*M^-3.5 prediction

Exit codes: 0 success, 1 check/acceptance failure, 2 usage or config error.
Angles always carry an explicit unit (``deg``/``rad`` suffix or the
``--rho-deg``/``--rho-rad`` flag pair); SNR grids use ``start:step:stop``.
"""

import argparse
import sys
import time

import numpy as np

from . import analysis, kernels, sim
from .channel import RngStream, draw_channel, equivalent_channel, noise_variance, transmit
from .codes import CODE_NAMES, get_code
from .constellation import bits_to_indices, make_qam
from .decoder import DECODERS, ml_exhaustive, ml_fast, ml_sphere, prepare
from .errors import Stbc42Error

USAGE_ERROR = 2
DEFAULT_BENCH_BUDGET = 1 << 24


def _snr_grid(spec: str) -> list:
    """Parse ``start:step:stop`` (inclusive) or a comma list of dB values."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"SNR grid must be start:step:stop, got {spec!r}")
        start, step, stop = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("SNR grid step must be positive")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [start + k * step for k in range(n)]
    return [float(p) for p in spec.split(",")]


def _angle_value(token: str) -> float:
    token = token.strip().lower()
    if token.endswith("deg"):
        return float(np.radians(float(token[:-3])))
    if token.endswith("rad"):
        return float(token[:-3])
    raise ValueError(f"angle {token!r} needs an explicit deg/rad suffix")


def _angle_list(spec: str) -> list:
    """Comma list or start:step:stop grid; every token carries its unit."""
    spec = spec.strip().lower()
    if ":" in spec:
        unit = "deg" if spec.endswith("deg") else "rad" if spec.endswith("rad") else None
        if unit is None:
            raise ValueError(f"angle grid {spec!r} needs a deg/rad suffix")
        start, step, stop = (float(p) for p in spec[:-3].split(":"))
        if step <= 0:
            raise ValueError("angle grid step must be positive")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        vals = [start + k * step for k in range(n)]
        return [_angle_value(f"{v}{unit}") for v in vals]
    return [_angle_value(tok) for tok in spec.split(",")]


def _resolve_rho(args) -> float | None:
    if getattr(args, "rho_deg", None) is not None:
        return float(np.radians(args.rho_deg))
    if getattr(args, "rho_rad", None) is not None:
        return float(args.rho_rad)
    return None


def _read_config(path: str) -> dict:
    """Flat key=value file mirroring flag names (- and _ both accepted)."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, val = line.split("=", 1)
            values[key.strip().replace("-", "_")] = val.strip()
    return values


def cmd_verify(args) -> int:
    if args.trials < 1 or args.lemma_trials < 1:
        print("error: --trials and --lemma-trials must be >= 1", file=sys.stderr)
        return USAGE_ERROR
    rng = RngStream(args.seed, (0,))
    t0 = time.perf_counter()
    lemma = analysis.check_lemma1(rng.substream(1), args.lemma_trials)
    report = analysis.verify_theorem1(args.code, rng.substream(2), args.trials)
    lines = [
        f"code={args.code}",
        f"pattern={args.pattern}",
        f"trials={args.trials}",
        f"lemma1_max_deviation={lemma:.3e}",
        f"eq13_anticommutation_max={report.anticommutation:.3e}",
        f"column_orthogonality_max={report.column_orthogonality:.3e}",
        f"leading_q_columns_max={report.leading_q_columns:.3e}",
        f"r1_pattern_max={report.r_pattern:.3e}",
    ]
    failures = []
    if lemma > 1e-12:
        failures.append(f"lemma1 closure {lemma:.3e} > 1e-12")
    if report.anticommutation > 1e-12:
        failures.append(f"anticommutation {report.anticommutation:.3e} > 1e-12")
    if report.column_orthogonality > 1e-10:
        failures.append(
            f"column orthogonality {report.column_orthogonality:.3e} > 1e-10")
    if report.r_pattern > 1e-10:
        failures.append(f"R_1 pattern {report.r_pattern:.3e} > 1e-10")

    agree = _decoder_agreement(args)
    lines.append(f"decoder_trials={args.decoder_trials}")
    lines.append(f"decoder_metric_spread_max={agree['spread']:.3e}")
    lines.append(f"decoder_decision_mismatches={agree['mismatches']}")
    if agree["spread"] > 1e-9:
        failures.append(f"decoder metric spread {agree['spread']:.3e} > 1e-9")
    if agree["mismatches"]:
        failures.append(f"{agree['mismatches']} decoder decision mismatches")

    lines.append(f"wall_seconds={time.perf_counter() - t0:.3f}")
    print("\n".join(lines))
    if failures:
        for f in failures:
            print(f"FAIL {f}")
        return 1
    print("verify: PASS")
    return 0


def _decoder_agreement(args) -> dict:
    """Metric spread + decision mismatches of the three decoders on one
    batch of random noisy instances (proposed code only for the fast path)."""
    code = get_code(args.code)
    cons = make_qam(args.qam, normalized=True)
    rng = RngStream(args.seed, (0, 3))
    g = rng.generator
    n0 = noise_variance(8.0)
    spread = 0.0
    mismatches = 0
    for _ in range(args.decoder_trials):
        idx = g.integers(0, cons.m, 8)
        s = cons.points[idx]
        ch = draw_channel(rng, 2, 4, n0=n0)
        y = transmit(code.codeword(s), ch, rng)
        ws = prepare(equivalent_channel(ch, code), y)
        results = [ml_exhaustive(ws, cons), ml_sphere(ws, cons)]
        if code.name == "proposed":
            results.append(ml_fast(ws, cons))
        metrics = [r.metric for r in results]
        spread = max(spread, max(metrics) - min(metrics))
        if any(not np.array_equal(r.indices, results[0].indices)
               for r in results[1:]):
            mismatches += 1
    return {"spread": spread, "mismatches": mismatches}


def cmd_mindet(args) -> int:
    cons = make_qam(args.qam, normalized=False)
    rho = _resolve_rho(args)
    code = get_code(args.code, rho)
    report = analysis.min_determinant(
        args.code, code.rho, cons, budget=args.budget, workers=args.workers)
    print("\n".join(report.kv_lines()))
    if args.csv:
        analysis.write_sweep_csv([report], args.csv)
        print(f"csv={args.csv}")
    return 0


def cmd_sweep_angle(args) -> int:
    cons = make_qam(args.qam, normalized=False)
    angles = _angle_list(args.angles)
    reports = analysis.angle_sweep(args.code, cons, angles,
                                   budget=args.budget, workers=args.workers)
    analysis.write_sweep_csv(reports, args.csv)
    best = max(reports, key=lambda r: r.min_det)
    for rep in reports:
        mark = "  <-- max" if rep is best else ""
        print(f"rho={rep.rho:.6f} rad ({np.degrees(rep.rho):8.4f} deg)  "
              f"min_det={rep.min_det:.6f}{mark}")
    print(f"csv={args.csv}")
    return 0


_BER_DEFAULTS = dict(code="proposed", decoder="fast", qam=4, snr="0:2:16",
                     seed=0, frames=1_000_000, min_errors=200, workers=1,
                     batch_frames=512, csv="ber.csv")


def cmd_ber(args) -> int:
    merged = dict(_BER_DEFAULTS)
    if args.config:
        file_vals = _read_config(args.config)
        unknown = set(file_vals) - set(_BER_DEFAULTS)
        if unknown:
            print(f"error: unknown config keys {sorted(unknown)}", file=sys.stderr)
            return USAGE_ERROR
        merged.update(file_vals)
    for key in _BER_DEFAULTS:
        cli_val = getattr(args, key)
        if cli_val is not None:
            merged[key] = cli_val
    try:
        cfg = sim.SimConfig(
            code=str(merged["code"]), decoder=str(merged["decoder"]),
            m=int(merged["qam"]), snr_points_db=_snr_grid(str(merged["snr"])),
            max_frames=int(merged["frames"]),
            min_bit_errors=int(merged["min_errors"]),
            seed=int(merged["seed"]), workers=int(merged["workers"]),
            batch_frames=int(merged["batch_frames"]))
        cfg.validate()
    except (ValueError, Stbc42Error) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    records = sim.run_sweep(cfg, csv_path=merged["csv"])
    print(f"{'snr_db':>7} {'frames':>9} {'bit_errors':>10} {'ber':>12} "
          f"{'leaf_visits':>12} {'seconds':>8}")
    for rec in records:
        print(f"{rec.snr_db:7.2f} {rec.frames:9d} {rec.bit_errors:10d} "
              f"{rec.ber:12.3e} {rec.mean_leaf_visits:12.1f} "
              f"{rec.wall_seconds:8.2f}")
    print(f"csv={merged['csv']}")
    return 0


def cmd_bench(args) -> int:
    cons = make_qam(args.qam, normalized=True)
    code = get_code("proposed")
    rng = RngStream(args.seed, (9,))
    g = rng.generator
    n0 = noise_variance(10.0)
    names = ["exhaustive", "sphere", "fast"]
    if cons.m ** 8 > args.budget:
        names = ["sphere", "fast"]
        print(f"# exhaustive skipped: {cons.m}^8 = {cons.m ** 8:.2e} "
              f"candidates exceeds budget {args.budget}")
    sums = {n: 0 for n in names}
    times = {n: 0.0 for n in names}
    warm = None
    for trial in range(args.trials):
        idx = g.integers(0, cons.m, 8)
        ch = draw_channel(rng, 2, 4, n0=n0)
        y = transmit(code.codeword(cons.points[idx]), ch, rng)
        ws = prepare(equivalent_channel(ch, code), y)
        if warm is None:
            warm = [DECODERS[n](ws, cons) for n in names]  # JIT warm-up
        for n in names:
            t0 = time.perf_counter()
            res = DECODERS[n](ws, cons)
            times[n] += time.perf_counter() - t0
            sums[n] += res.leaf_visits
    print(f"{'decoder':>12} {'mean_leaf_visits':>17} {'mean_ms':>9}")
    for n in names:
        print(f"{n:>12} {sums[n] / args.trials:17.1f} "
              f"{1e3 * times[n] / args.trials:9.3f}")
    if "exhaustive" in names:
        ratio = (sums["fast"] / args.trials) / (sums["exhaustive"] / args.trials)
        predicted = 4.0 * cons.m ** -3.5
        print(f"fast/exhaustive leaf ratio = {ratio:.6e} "
              f"(predicted 4*M^-3.5 = {predicted:.6e})")
    else:
        print(f"fast leaf visits per frame = {sums['fast'] / args.trials:.0f} "
              f"(= 4*M^4.5 = {4 * cons.m ** 4.5:.0f})")
    if args.compare_backends:
        _compare_backends(args, cons, code)
    return 0


def _compare_backends(args, cons, code) -> None:
    """Time the numba kernels against the pure-numpy fallback."""
    rng = RngStream(args.seed, (10,))
    g = rng.generator
    n = min(args.trials, 200)
    bits = g.integers(0, 2, (n, 8 * cons.bits_per_symbol))
    sidx = bits_to_indices(bits.ravel(), cons).reshape(n, 8)
    h_re = g.standard_normal((n, 2, 4)) / np.sqrt(2.0)
    h_im = g.standard_normal((n, 2, 4)) / np.sqrt(2.0)
    wt = g.standard_normal((n, 16)) * np.sqrt(noise_variance(10.0) / 2.0)
    hc = np.empty((n, 4, 8))
    hc[:, 0::2, 0::2] = h_re
    hc[:, 0::2, 1::2] = -h_im
    hc[:, 1::2, 0::2] = h_im
    hc[:, 1::2, 1::2] = h_re
    gmat = np.ascontiguousarray(code.generator)
    print(f"{'backend':>8} {'frames/s (fast decoder)':>24}")
    for name in ("numba", "numpy"):
        try:
            backend = kernels.get_backend(name)
        except ImportError:
            print(f"{name:>8} {'unavailable':>24}")
            continue
        backend.ber_batch(hc[:2], wt[:2], sidx[:2], gmat,
                          cons.axis.levels, cons.labels, 2)  # warm up JIT
        t0 = time.perf_counter()
        backend.ber_batch(hc, wt, sidx, gmat, cons.axis.levels, cons.labels, 2)
        dt = time.perf_counter() - t0
        print(f"{name:>8} {n / dt:24.1f}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stbc42",
        description="4x2 fast-decodable STBC laboratory "
                    f"(kernel backend: {kernels.ACTIVE_BACKEND})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="structural + decoder-equivalence checks")
    p.add_argument("--code", choices=CODE_NAMES, default="proposed")
    p.add_argument("--pattern", choices=("proposed",), default="proposed",
                   help="R-structure pattern to check the code against")
    p.add_argument("--trials", type=int, default=1000,
                   help="random channel draws for the structure checks")
    p.add_argument("--lemma-trials", type=int, default=10_000)
    p.add_argument("--decoder-trials", type=int, default=100)
    p.add_argument("--qam", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mindet", help="exhaustive minimum-determinant scan")
    p.add_argument("--code", choices=CODE_NAMES, default="proposed")
    p.add_argument("--qam", type=int, default=4)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--rho-deg", type=float)
    group.add_argument("--rho-rad", type=float)
    p.add_argument("--budget", type=float, default=analysis.DEFAULT_MINDET_BUDGET)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_mindet)

    p = sub.add_parser("sweep-angle", help="min determinant across angles")
    p.add_argument("--code", choices=CODE_NAMES, default="proposed")
    p.add_argument("--qam", type=int, default=4)
    p.add_argument("--angles", required=True,
                   help="comma list or start:step:stop, with deg/rad suffix")
    p.add_argument("--budget", type=float, default=analysis.DEFAULT_MINDET_BUDGET)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--csv", default="sweep_angle.csv")
    p.set_defaults(func=cmd_sweep_angle)

    p = sub.add_parser("ber", help="Monte Carlo BER sweep")
    p.add_argument("--config", default=None,
                   help="key=value file; explicit flags override it")
    p.add_argument("--code", choices=CODE_NAMES, default=None)
    p.add_argument("--decoder",
                   choices=("exhaustive", "sphere", "fast", "fast_any"),
                   default=None)
    p.add_argument("--qam", type=int, default=None)
    p.add_argument("--snr", default=None, help="start:step:stop in dB")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--frames", type=int, default=None, help="max frames/point")
    p.add_argument("--min-errors", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--batch-frames", type=int, default=None)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_ber)

    p = sub.add_parser("bench", help="decoder complexity counters")
    p.add_argument("--qam", type=int, default=4)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=DEFAULT_BENCH_BUDGET)
    p.add_argument("--compare-backends", action="store_true")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Stbc42Error as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
