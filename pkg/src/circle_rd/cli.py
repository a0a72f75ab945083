"""Command-line experiment runner.

Exit codes: 0 success, 1 a verification check failed, 2 usage or I/O
error. The default seed can be overridden with ``CIRCLE_RD_SEED``.
"""

import argparse
import math
import os
import sys
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from . import analytics, codec as cd, verification as vf
from .errors import CircleRDError
from .tables import FORMATS, dumps_json, format_rd_table

SEED_ENV = "CIRCLE_RD_SEED"
SUITES = ("closed-form", "theorems", "perceptual", "all")
LAMBDAS = (0.0, 0.5, 1.0, 4.0)
PERCEPTUAL_RATES = (1, 2, 4)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    rate_bits: int = 1
    seed: int = 0
    samples: int = 10**6
    output_path: Optional[str] = None
    format: str = "json"
    alpha: float = 0.01
    grid: int = 4096
    codec: Optional[str] = None
    suite: Optional[str] = None
    lam: Optional[float] = None
    bins: int = 64
    expect_fail: bool = False
    workers: int = 1

    def echo(self):
        return asdict(self)


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    detail: str
    value: Optional[float] = None
    expected: Optional[float] = None


# ---------------------------------------------------------------------------
# helpers


def _default_seed():
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}")


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)


def _finite(x):
    return None if x is None or not math.isfinite(x) else float(x)


# ---------------------------------------------------------------------------
# commands


def cmd_rd_curve(cfg):
    points = analytics.rate_sweep(cfg.rate_bits)
    _write(cfg.output_path, format_rd_table(points, cfg.format, cfg.echo()))
    return EXIT_OK


def _closed_form_checks(cfg):
    r, n, seed = cfg.rate_bits, cfg.samples, cfg.seed
    out = []
    expected = {
        cd.UQ: analytics.d_uq_closed(r),
        cd.VQ_STOCHASTIC: analytics.d_vq_closed(r),
        # condmean: E||X - c_k||^2 = 1 - rho^2, half of it as distortion
        cd.VQ_CONDMEAN: 0.5 * analytics.d_vq_closed(r),
    }
    for codec, value in expected.items():
        est = vf.mc_distortion(codec, r, None, n, seed, cfg.workers)
        out.append(Check(
            "closed-form", f"mc {codec} R={r}", est.agrees_with(value, 4.0),
            f"{est.mean:.7f} +/- {est.std_error:.1e} vs {value:.7f} (delta {est.mean - value:+.2e})",
            est.mean, value,
        ))
    if r == 1:
        rel = analytics.relative_improvement(1)
        out.append(Check("closed-form", "relative improvement R=1", abs(rel - 0.38899) <= 1e-3,
                         f"{rel:.5f}", rel, 0.38899))
    opt = analytics.optimize_partition(cfg.grid)
    target = 1.0 - 4.0 / math.pi**2
    out.append(Check(
        "closed-form", "partition optimum",
        abs(opt.t - math.pi) < 1e-6 and abs(opt.value - target) < 1e-9,
        f"t*={opt.t:.9f} value={opt.value:.10f}", opt.value, target,
    ))
    ts = np.linspace(0.05, 2 * math.pi - 0.05, 100)
    worst = max(abs(analytics.partition_avg_mse(t) - vf.integrate_partition_mse(t)) for t in ts)
    out.append(Check("closed-form", "partition vs quadrature", worst < 1e-9, f"max |diff| {worst:.1e}", worst, 0.0))
    sweep = analytics.rate_sweep(32)
    ordered = all(p.d_uq <= p.d_vq for p in sweep)
    out.append(Check("closed-form", "d_uq <= d_vq for R=0..32", ordered, "exhaustive"))
    gap16 = analytics.snr_gap_db(16)
    out.append(Check("closed-form", "snr gap at R=16", abs(gap16 - 10 * math.log10(2)) < 1e-3,
                     f"{gap16:.6f} dB", gap16, 10 * math.log10(2)))
    return out


def _theorem_checks(cfg):
    out = []
    rep = vf.doubling_check(cfg.rate_bits, cfg.samples, cfg.seed, cfg.workers)
    a, b, c = rep.cond_mean_mse.mean, rep.independent_mse.mean, rep.shared_mse.mean
    triple = f"({a:.4f}, {b:.4f}, {c:.4f})"
    out.append(Check("theorems", "doubling bound respected", rep.bound_respected,
                     f"independent {b:.6f} vs 2x cond-mean {rep.bound:.6f}; triple {triple}", b, rep.bound))
    out.append(Check("theorems", "doubling bound tight", rep.bound_tight, f"|diff| {abs(b - rep.bound):.1e}"))
    out.append(Check("theorems", "shared randomness escapes bound", rep.shared_escapes,
                     f"shared {c:.6f} is {rep.shared_margin_se:.1f} se below {rep.bound:.6f}", c, rep.bound))
    n_derand = max(vf.MIN_SAMPLES, cfg.samples // 10)
    for codec in cd.CODECS:
        for lam in LAMBDAS:
            res = vf.derandomize(codec, cfg.rate_bits, vf.TradeoffProblem(lam), 64, n_derand, cfg.seed, cfg.workers)
            out.append(Check(
                "theorems", f"derandomize {codec} lambda={lam:g}", res.holds,
                f"u*={res.u_star:.4f} risk(u*)={res.risk_at_u_star:.6f} mean={res.mean_risk:.6f} margin={res.margin:.2e}",
                res.risk_at_u_star, res.mean_risk,
            ))
    return out


def _perceptual_checks(cfg):
    out = []
    if cfg.codec is not None:
        plan = [(cfg.codec, cfg.rate_bits, True)]
    else:
        plan = [(c, r, True) for c in (cd.UQ, cd.VQ_STOCHASTIC) for r in PERCEPTUAL_RATES]
        plan.append((cd.VQ_CONDMEAN, 1, False))
    for codec, r, should_pass in plan:
        v = vf.uniformity_test(codec, r, None, cfg.samples, cfg.bins, cfg.alpha, cfg.seed, cfg.workers)
        detail = f"chi2={v.statistic:.2f} bins={v.bins} p={v.p_value:.3g}"
        if should_pass:
            out.append(Check("perceptual", f"uniform {codec} R={r}", v.passed, detail, v.p_value, cfg.alpha))
        else:
            out.append(Check("perceptual", f"non-uniform {codec} R={r}", v.p_value < 1e-6, detail, v.p_value, 1e-6))
    return out


def cmd_verify(cfg):
    suites = ("closed-form", "theorems", "perceptual") if cfg.suite == "all" else (cfg.suite,)
    runners = {"closed-form": _closed_form_checks, "theorems": _theorem_checks, "perceptual": _perceptual_checks}
    checks = []
    for s in suites:
        checks.extend(runners[s](cfg))
    if cfg.expect_fail:
        for ch in checks:
            ch.passed = not ch.passed
            ch.detail += " (failure expected)"
    ok = all(ch.passed for ch in checks)
    for ch in checks:
        print(f"{'PASS' if ch.passed else 'FAIL'} [{ch.suite}] {ch.name}: {ch.detail}")
    failed = [ch.name for ch in checks if not ch.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    if failed:
        print("failed: " + "; ".join(failed), file=sys.stderr)
    if cfg.output_path:
        report = {
            "config": cfg.echo(),
            "passed": ok,
            "checks": [
                {**asdict(ch), "value": _finite(ch.value), "expected": _finite(ch.expected)} for ch in checks
            ],
        }
        _write(cfg.output_path, dumps_json(report))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_derandomize(cfg):
    res = vf.derandomize(cfg.codec, cfg.rate_bits, vf.TradeoffProblem(cfg.lam), cfg.grid, cfg.samples,
                         cfg.seed, cfg.workers)
    spread = float(np.ptp(res.risks))
    print(f"codec {cfg.codec}, R={cfg.rate_bits}, lambda={cfg.lam:g}, grid={cfg.grid}")
    print(f"u* = {res.u_star:.6f}")
    print(f"risk at u* = {res.risk_at_u_star:.7f}")
    print(f"mean risk = {res.mean_risk:.7f} (paired se {res.std_error:.2e})")
    print(f"risk spread over grid = {spread:.2e}")
    print(f"inequality margin = {res.margin:.3e} ({'holds' if res.holds else 'VIOLATED'})")
    if cfg.output_path:
        _write(cfg.output_path, dumps_json({
            "config": cfg.echo(),
            "u_star": res.u_star,
            "risk_at_u_star": res.risk_at_u_star,
            "mean_risk": res.mean_risk,
            "std_error": res.std_error,
            "margin": res.margin,
            "holds": res.holds,
            "u_grid": res.u_grid.tolist(),
            "risks": res.risks.tolist(),
        }))
    return EXIT_OK if res.holds else EXIT_FAIL


def cmd_partition(cfg):
    opt = analytics.optimize_partition(cfg.grid)
    target = analytics.d_vq_closed(1)
    print(f"grid = {cfg.grid}")
    print(f"t* = {opt.t:.9f} (pi = {math.pi:.9f}, |t* - pi| = {abs(opt.t - math.pi):.1e})")
    print(f"minimum = {opt.value:.7f}")
    print(f"1 - 4/pi^2 = {target:.7f} (|diff| = {abs(opt.value - target):.1e})")
    if cfg.output_path:
        _write(cfg.output_path, dumps_json({
            "config": cfg.echo(), "t_star": opt.t, "value": opt.value, "reference": target,
        }))
    return EXIT_OK


COMMANDS = {
    "rd-curve": cmd_rd_curve,
    "verify": cmd_verify,
    "derandomize": cmd_derandomize,
    "partition": cmd_partition,
}


# ---------------------------------------------------------------------------
# argument parsing


def build_parser():
    p = argparse.ArgumentParser(prog="circle-rd", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, samples=10**6):
        sp.add_argument("--seed", type=int, default=None, help=f"default 0, or ${SEED_ENV}")
        sp.add_argument("--samples", type=int, default=samples)
        sp.add_argument("--output", "-o", dest="output_path", default=None)
        sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("rd-curve", help="closed-form distortion and SNR against rate")
    sp.add_argument("--max-rate", "--rate", dest="rate_bits", type=int, default=32)
    sp.add_argument("--format", choices=FORMATS, default="dat")
    common(sp)

    sp = sub.add_parser("verify", help="run verification suites")
    sp.add_argument("--suite", choices=SUITES, default="all")
    sp.add_argument("--codec", choices=cd.CODECS, default=None)
    sp.add_argument("--rate", dest="rate_bits", type=int, default=1)
    sp.add_argument("--alpha", type=float, default=0.01)
    sp.add_argument("--bins", type=int, default=64)
    sp.add_argument("--grid", type=int, default=4096)
    sp.add_argument("--expect-fail", action="store_true", help="succeed only if every check fails")
    common(sp)

    sp = sub.add_parser("derandomize", help="best fixed dither for a stochastic codec")
    sp.add_argument("--codec", choices=cd.CODECS, required=True)
    sp.add_argument("--rate", dest="rate_bits", type=int, default=1)
    sp.add_argument("--lambda", dest="lam", type=float, default=1.0)
    sp.add_argument("--grid", type=int, default=64)
    common(sp, samples=10**5)

    sp = sub.add_parser("partition", help="optimal two-arc partition of the circle")
    sp.add_argument("--grid", type=int, default=4096)
    sp.add_argument("--output", "-o", dest="output_path", default=None)
    return p


def config_from_args(args):
    fields = vars(args).copy()
    if fields.get("seed") is None and "seed" in RunConfig.__dataclass_fields__:
        fields["seed"] = _default_seed()
    known = {k: v for k, v in fields.items() if k in RunConfig.__dataclass_fields__}
    return RunConfig(**known)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except (UsageError, CircleRDError) as exc:
        print(f"circle-rd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"circle-rd: I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
