"""Exit criteria. Each check prints one PASS/FAIL line in the terminal summary."""

import math
import time

import mpmath
import numpy as np

from circle_rd import analytics as an
from circle_rd import geometry as g
from circle_rd import verification as vf
from circle_rd.codec import RandomnessModel as RM

PI = math.pi
N_MC = 10**6


def test_c1_vq_closed_form_and_monte_carlo(criterion):
    start = time.perf_counter()
    d = an.d_vq_closed(1)
    est = vf.mc_distortion("vq-stochastic", 1, RM.INDEPENDENT, n=N_MC, seed=0)
    elapsed = time.perf_counter() - start
    criterion.check("C1 closed form 1-4/pi^2", abs(d - 0.5947152) <= 1e-6 and abs(d - (1 - 4 / PI**2)) < 1e-15,
                    f"d_vq(1)={d:.10f}")
    criterion.check("C1 Monte-Carlo within 4 se", est.agrees_with(d, 4.0),
                    f"{est.mean:.7f} +/- {est.std_error:.1e}, |delta|/se={abs(est.mean - d) / est.std_error:.2f}")
    criterion.check("C1 runtime < 5 s", elapsed < 5.0, f"{elapsed:.2f} s")


def test_c2_uq_closed_form_and_monte_carlo(criterion):
    start = time.perf_counter()
    d = an.d_uq_closed(1)
    est = vf.mc_distortion("uq", 1, RM.SHARED, n=N_MC, seed=0)
    elapsed = time.perf_counter() - start
    criterion.check("C2 closed form 1-2/pi", abs(d - 0.3633802) <= 1e-6 and abs(d - (1 - 2 / PI)) < 1e-15,
                    f"d_uq(1)={d:.10f}")
    criterion.check("C2 Monte-Carlo within 4 se", est.agrees_with(d, 4.0),
                    f"{est.mean:.7f} +/- {est.std_error:.1e}, |delta|/se={abs(est.mean - d) / est.std_error:.2f}")
    criterion.check("C2 runtime < 5 s", elapsed < 5.0, f"{elapsed:.2f} s")


def test_c3_relative_improvement(criterion):
    rel = (an.d_vq_closed(1) - an.d_uq_closed(1)) / an.d_vq_closed(1)
    criterion.check("C3 relative improvement 0.38899 +/- 0.001", abs(rel - 0.38899) <= 1e-3, f"{rel:.6f}")


def test_c4_partition(criterion):
    opt = an.optimize_partition(4096)
    target = 1 - 4 / PI**2
    criterion.check("C4 t* = pi within 1e-6", abs(opt.t - PI) < 1e-6, f"|t*-pi|={abs(opt.t - PI):.1e}")
    criterion.check("C4 minimum within 1e-9", abs(opt.value - target) < 1e-9, f"|diff|={abs(opt.value - target):.1e}")
    ts = np.linspace(0.05, 2 * PI - 0.05, 100)
    worst = max(abs(an.partition_avg_mse(t) - vf.integrate_partition_mse(t)) for t in ts)
    criterion.check("C4 closed form vs quadrature (100 t) within 1e-9", worst < 1e-9, f"max |diff|={worst:.1e}")
    uncorrected = an.partition_avg_mse_uncorrected(PI)
    criterion.check("C4 regression: +2 numerator gives 1 at t=pi, not the minimum",
                    abs(uncorrected - 1.0) < 1e-15 and abs(uncorrected - target) > 0.4, f"{uncorrected:.6f}")


def test_c5_doubling_bound(criterion):
    rep = vf.doubling_check(1, n=N_MC, seed=0)
    b, c = rep.independent_mse, rep.shared_mse
    criterion.check("C5 independent MSE = 1.1894305 within 4 se",
                    b.agrees_with(1.1894305, 4.0) and abs(2 * (1 - 4 / PI**2) - 1.1894305) < 1e-7,
                    f"{b.mean:.7f} +/- {b.std_error:.1e}")
    criterion.check("C5 bound met with equality", rep.bound_respected and rep.bound_tight,
                    f"independent {b.mean:.6f} vs 2x cond-mean {rep.bound:.6f}")
    criterion.check("C5 shared MSE = 0.7267605 within 4 se", c.agrees_with(0.7267605, 4.0),
                    f"{c.mean:.7f} +/- {c.std_error:.1e}")
    criterion.check("C5 shared below bound by > 10 se", rep.shared_escapes and c.mean < 2 * (1 - 4 / PI**2),
                    f"margin {rep.shared_margin_se:.1f} se")


def test_c6_derandomization(criterion):
    for codec in ("uq", "vq-stochastic", "vq-condmean"):
        for lam in (0.0, 0.5, 1.0, 4.0):
            res = vf.derandomize(codec, 1, vf.TradeoffProblem(lam), u_grid=64, n=10**5, seed=0)
            criterion.check(f"C6 derandomize {codec} lambda={lam:g}", res.holds,
                            f"u*={res.u_star:.4f} risk(u*)={res.risk_at_u_star:.6f} "
                            f"mean={res.mean_risk:.6f} 3se={3 * res.std_error:.1e}")


def test_c7_rate_sweep(criterion):
    rows = an.rate_sweep(32)
    criterion.check("C7 d_uq <= d_vq for R=0..32", all(r.d_uq <= r.d_vq for r in rows), f"{len(rows)} rates")
    gaps = [an.snr_gap_db(r) for r in range(33)]
    deficits = [an.snr_gap_deficit_db(r) for r in range(33)]
    monotone = all(b >= a for a, b in zip(gaps, gaps[1:])) and all(b < a for a, b in zip(deficits, deficits[1:]))
    criterion.check("C7 SNR gap monotone increasing", monotone, f"gap(0)={gaps[0]:.4f} gap(32)={gaps[-1]:.6f} dB")
    limit = 10 * math.log10(2)
    criterion.check("C7 gap(16) = 10log10(2) within 1e-3 dB", abs(gaps[16] - limit) < 1e-3,
                    f"{gaps[16]:.7f} vs {limit:.7f}")
    with mpmath.workdps(60):
        x = mpmath.pi / mpmath.mpf(2) ** 32
        ref_uq = 1 - mpmath.sin(x) / x
        ref_vq = ref_uq * (2 - ref_uq)
    rel_uq = abs(an.d_uq_closed(32) / float(ref_uq) - 1)
    rel_vq = abs(an.d_vq_closed(32) / float(ref_vq) - 1)
    criterion.check("C7 R=32 vs extended precision to 6 digits", rel_uq < 1e-6 and rel_vq < 1e-6,
                    f"rel err uq {rel_uq:.1e}, vq {rel_vq:.1e}")


def test_c8_perceptual_constraint(criterion):
    for codec, model in (("uq", RM.SHARED), ("vq-stochastic", RM.INDEPENDENT)):
        for bits in (1, 2, 4):
            v = vf.uniformity_test(codec, bits, model, n=N_MC, bins=64, alpha=0.01, seed=0)
            criterion.check(f"C8 uniform {codec} R={bits}", v.passed, f"chi2={v.statistic:.1f} p={v.p_value:.3f}")
    v = vf.uniformity_test("vq-condmean", 1, RM.NONE, n=N_MC, bins=64, alpha=0.01, seed=0)
    criterion.check("C8 vq-condmean rejected with p < 1e-6", (not v.passed) and v.p_value < 1e-6,
                    f"chi2={v.statistic:.3g} p={v.p_value:.1e}")


def test_c9_property_suites(criterion):
    rng = np.random.default_rng(2024)
    a, b = rng.uniform(0, 2 * PI, (2, 10**4))
    worst = float(np.max(np.abs(g.distortion(a, b) - g.distortion_mse_equiv(a, b))))
    criterion.check("C9 dual-form distortion within 1e-12", worst < 1e-12, f"max |diff|={worst:.1e}")

    for theta in (0.0, 1.0, PI, 5.0):
        err = vf.roundtrip_errors("uq", 1, theta, n=200_000, seed=3)
        v = vf.chi_square_uniformity(err, -PI / 2, PI / 2, bins=64, alpha=0.01)
        inside = err.min() >= -PI / 2 - 1e-12 and err.max() <= PI / 2 + 1e-12
        criterion.check(f"C9 uq wrapped error uniform, theta={theta:g}", v.passed and inside, f"p={v.p_value:.3f}")

    target = an.d_uq_closed(1)
    ests = [vf.mc_conditional_distortion("uq", 1, th, n=200_000, seed=i)
            for i, th in enumerate(np.linspace(0, 2 * PI, 16, endpoint=False))]
    worst_z = max(abs(e.mean - target) / e.std_error for e in ests)
    criterion.check("C9 uq conditional distortion theta-independent (4 se)", worst_z <= 4.0,
                    f"worst |z|={worst_z:.2f} over 16 angles")

    r1 = vf.mc_distortion("vq-stochastic", 3, None, n=250_000, seed=77)
    r2 = vf.mc_distortion("vq-stochastic", 3, None, n=250_000, seed=77)
    r3 = vf.mc_distortion("vq-stochastic", 3, None, n=250_000, seed=77, workers=4)
    d1 = vf.doubling_check(1, n=100_000, seed=5)
    d2 = vf.doubling_check(1, n=100_000, seed=5, workers=3)
    criterion.check("C9 identical seeds give bit-identical reports", r1 == r2 == r3 and d1 == d2,
                    f"mean={r1.mean!r}")
