"""Seeded Monte-Carlo estimates, uniformity tests and theorem checks.

Samples are produced in blocks of ``rng.BLOCK_SIZE`` positions. Each
block's draws depend only on ``(seed, stream, block)``, per-block partial
statistics are merged in block order, and so every estimate is
bit-identical whatever the number of worker threads.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import stats

from . import codec as cd
from . import geometry
from .codec import RandomnessModel, as_rate
from .errors import ConfigurationError, InvalidInputError
from .geometry import TWO_PI
from .rng import BLOCK_SIZE, Stream, check_seed, uniforms

MIN_SAMPLES = 1000


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n_samples: int
    seed: int

    def scaled(self, factor):
        return McEstimate(self.mean * factor, self.std_error * abs(factor), self.n_samples, self.seed)

    def agrees_with(self, value, n_se=4.0, atol=0.0):
        return abs(self.mean - value) <= n_se * self.std_error + atol


@dataclass(frozen=True)
class UniformityVerdict:
    statistic: float
    bins: int
    p_value: float
    alpha: float
    n_samples: int

    @property
    def passed(self):
        return self.p_value >= self.alpha


# ---------------------------------------------------------------------------
# block machinery


def _blocks(n):
    return [(s, min(s + BLOCK_SIZE, n)) for s in range(0, n, BLOCK_SIZE)]


def _map_blocks(fn, n, workers=1):
    """Apply ``fn(start, stop)`` to every block; results come back in block order."""
    spans = _blocks(n)
    if workers is None or workers <= 1 or len(spans) == 1:
        return [fn(a, b) for a, b in spans]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(lambda ab: fn(*ab), spans))


def _moments(x):
    x = np.asarray(x, dtype=float)
    m = float(x.mean())
    return x.size, m, float(((x - m) ** 2).sum())


def _merge(parts):
    """Chan et al. pairwise update, applied left to right."""
    n, mean, m2 = 0, 0.0, 0.0
    for nb, mb, m2b in parts:
        tot = n + nb
        delta = mb - mean
        mean += delta * nb / tot
        m2 += m2b + delta * delta * n * nb / tot
        n = tot
    return n, mean, m2


def _estimate(parts, seed):
    n, mean, m2 = _merge(parts)
    var = m2 / (n - 1) if n > 1 else 0.0
    return McEstimate(mean, math.sqrt(var / n), n, seed)


def _check_n(n, minimum=MIN_SAMPLES):
    n = int(n)
    if n < minimum:
        raise ConfigurationError(f"need at least {minimum} samples, got {n}")
    return n


def source_angles(seed, start, stop):
    return TWO_PI * uniforms(seed, Stream.SOURCE, start, stop)


def _simulate(codec, rate, model, seed, start, stop, theta=None):
    if theta is None:
        theta = source_angles(seed, start, stop)
    else:
        theta = np.full(stop - start, float(theta))
    u1, u2 = cd.draw_dithers(model, seed, start, stop)
    rt = cd.roundtrip(codec, theta, rate, model, u1, u2 if model is RandomnessModel.INDEPENDENT else None)
    return theta, rt


# ---------------------------------------------------------------------------
# distortion estimates


def mc_distortion(codec, rate, model=None, n=10**6, seed=0, workers=1):
    """Monte-Carlo estimate of the expected distortion over a uniform source.

    The distortion of each sample is ``||x_hat - x||^2 / 2``, which is the
    cosine distance for on-circle reconstructions and stays meaningful for
    the conditional-mean decoder.
    """
    model = cd.check_codec(codec, model)
    rate = as_rate(rate)
    n = _check_n(n)
    seed = check_seed(seed)

    def block(a, b):
        theta, rt = _simulate(codec, rate, model, seed, a, b)
        return _moments(cd.reconstruction_distortion(theta, rt))

    return _estimate(_map_blocks(block, n, workers), seed)


def mc_mse(codec, rate, model=None, n=10**6, seed=0, workers=1):
    """Squared-error estimate ``E||X - X_hat||^2``; twice the distortion."""
    return mc_distortion(codec, rate, model, n, seed, workers).scaled(2.0)


def mc_conditional_distortion(codec, rate, theta, model=None, n=10**5, seed=0, workers=1):
    """Monte-Carlo ``E[d | theta]`` for a fixed source angle."""
    model = cd.check_codec(codec, model)
    rate = as_rate(rate)
    n = _check_n(n)
    seed = check_seed(seed)
    theta = float(geometry.canonicalize(theta))

    def block(a, b):
        th, rt = _simulate(codec, rate, model, seed, a, b, theta=theta)
        return _moments(cd.reconstruction_distortion(th, rt))

    return _estimate(_map_blocks(block, n, workers), seed)


def roundtrip_errors(codec, rate, theta, model=None, n=10**5, seed=0):
    """Wrapped reconstruction errors ``theta_hat - theta`` in ``[-pi, pi)``."""
    model = cd.check_codec(codec, model)
    th, rt = _simulate(codec, as_rate(rate), model, check_seed(seed), 0, int(n), theta=theta)
    return np.asarray(geometry.circular_difference(th, rt.angle))


# ---------------------------------------------------------------------------
# perceptual constraint


def chi_square_uniformity(samples, low, high, bins=64, alpha=0.01):
    """Pearson chi-square test of `samples` against Uniform[low, high)."""
    samples = np.asarray(samples, dtype=float)
    if samples.size < 5 * bins:
        raise ConfigurationError("too few samples for the requested bins")
    counts, _ = np.histogram(samples, bins=bins, range=(low, high))
    return _verdict(counts, alpha)


def _verdict(counts, alpha):
    counts = np.asarray(counts)
    res = stats.chisquare(counts)
    p = float(res.pvalue)
    return UniformityVerdict(float(res.statistic), int(counts.size), p, float(alpha), int(counts.sum()))


def uniformity_test(codec, rate, model=None, n=10**6, bins=64, alpha=0.01, seed=0, workers=1):
    """Goodness-of-fit of reconstruction angles to Uniform[0, 2*pi).

    Uses the reconstruction angle only; the conditional-mean decoder's
    off-circle radius is a second reason it fails the perceptual
    constraint, but the angle alone already gives it away.
    """
    model = cd.check_codec(codec, model)
    rate = as_rate(rate)
    bins = int(bins)
    n = int(n)
    if bins < 2:
        raise ConfigurationError("need at least 2 bins")
    if n < 100 * bins:
        raise ConfigurationError(f"need at least {100 * bins} samples for {bins} bins, got {n}")
    if not 0.0 < alpha < 1.0:
        raise ConfigurationError("alpha must lie in (0, 1)")
    seed = check_seed(seed)

    def block(a, b):
        _, rt = _simulate(codec, rate, model, seed, a, b)
        counts, _ = np.histogram(rt.angle, bins=bins, range=(0.0, TWO_PI))
        return counts

    counts = np.sum(_map_blocks(block, n, workers), axis=0)
    return _verdict(counts, alpha)


# ---------------------------------------------------------------------------
# derandomization


@dataclass(frozen=True)
class TradeoffProblem:
    """Lagrangian ``rate_fn(k, u) + lam * distortion``.

    `rate_fn` takes arrays of codes and dithers and returns the coding cost
    of each; ``None`` means a constant cost equal to the rate in bits.
    """

    lam: float
    rate_fn: Optional[Callable] = None

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam >= 0.0):
            raise InvalidInputError("trade-off weight must be finite and non-negative")

    def cost(self, k, u, rate):
        if self.rate_fn is None:
            return np.full(np.shape(k), float(as_rate(rate).bits))
        c = np.broadcast_to(np.asarray(self.rate_fn(k, u), dtype=float), np.shape(k))
        if not np.all(np.isfinite(c) & (c >= 0.0)):
            raise InvalidInputError("coding cost must be finite and non-negative")
        return c

    def loss(self, theta, rt, u, rate):
        return self.cost(rt.code, u, rate) + self.lam * np.asarray(cd.reconstruction_distortion(theta, rt))


@dataclass(frozen=True)
class Derandomization:
    u_star: float
    risk_at_u_star: float
    mean_risk: float
    std_error: float
    u_grid: np.ndarray = field(repr=False)
    risks: np.ndarray = field(repr=False)

    @property
    def margin(self):
        """Slack in ``risk(u*) <= mean_risk + 3 se``; non-negative when it holds."""
        return self.mean_risk + 3.0 * self.std_error - self.risk_at_u_star

    @property
    def holds(self):
        return self.margin >= 0.0


def _fixed_u_roundtrip(codec, theta, rate, u):
    uu = np.full(theta.shape, u)
    model = cd.PRESCRIBED_MODEL[codec]
    if model is RandomnessModel.INDEPENDENT:
        return cd.roundtrip(codec, theta, rate, model, uu, uu)
    return cd.roundtrip(codec, theta, rate, model, uu)


def derandomize(codec, rate, problem, u_grid=64, n=10**5, seed=0, workers=1):
    """Freeze the codec's randomness at the best grid value ``u_j = j / u_grid``.

    Every grid point is scored on the same source samples. The stochastic
    codec's own expected trade-off (``mean_risk``) is estimated on those
    samples too, with dithers drawn under its prescribed model, and
    ``std_error`` is the standard error of the paired per-sample
    differences ``loss(x_i, u*) - loss(x_i, U_i)``.
    """
    model = cd.check_codec(codec, None)
    rate = as_rate(rate)
    u_grid = int(u_grid)
    if u_grid < 2:
        raise ConfigurationError("need at least 2 grid values for the dither")
    n = _check_n(n)
    seed = check_seed(seed)
    grid = np.arange(u_grid) / u_grid

    def scan(a, b):
        theta = source_angles(seed, a, b)
        return np.array([
            problem.loss(theta, _fixed_u_roundtrip(codec, theta, rate, u), u, rate).sum() for u in grid
        ])

    sums = np.zeros(u_grid)
    for part in _map_blocks(scan, n, workers):
        sums += part
    risks = sums / n
    j = int(np.argmin(risks))
    u_star = float(grid[j])

    def paired(a, b):
        theta = source_angles(seed, a, b)
        fixed = problem.loss(theta, _fixed_u_roundtrip(codec, theta, rate, u_star), u_star, rate)
        u1, u2 = cd.draw_dithers(model, seed, a, b)
        rt = cd.roundtrip(codec, theta, rate, model, u1, u2 if model is RandomnessModel.INDEPENDENT else None)
        u_cost = u1 if u1 is not None else np.zeros_like(theta)
        random = problem.loss(theta, rt, u_cost, rate)
        return _moments(fixed), _moments(random), _moments(fixed - random)

    parts = _map_blocks(paired, n, workers)
    fixed_risk = _estimate([p[0] for p in parts], seed).mean
    mean_risk = _estimate([p[1] for p in parts], seed).mean
    diff = _estimate([p[2] for p in parts], seed)
    return Derandomization(u_star, fixed_risk, mean_risk, diff.std_error, grid, risks)


# ---------------------------------------------------------------------------
# doubling bound


@dataclass(frozen=True)
class DoublingReport:
    rate_bits: int
    cond_mean_mse: McEstimate
    independent_mse: McEstimate
    shared_mse: McEstimate

    @property
    def bound(self):
        return 2.0 * self.cond_mean_mse.mean

    @property
    def bound_se(self):
        return 2.0 * self.cond_mean_mse.std_error

    def _combined(self, est):
        return math.hypot(est.std_error, self.bound_se)

    @property
    def certified(self):
        return self.rate_bits == 1

    @property
    def bound_respected(self):
        """Independent randomness does not beat twice the conditional-mean error."""
        return self.independent_mse.mean >= self.bound - 4.0 * self._combined(self.independent_mse)

    @property
    def bound_tight(self):
        return abs(self.independent_mse.mean - self.bound) <= 4.0 * self._combined(self.independent_mse)

    @property
    def shared_margin_se(self):
        """How many combined standard errors the shared codec sits below the bound."""
        return (self.bound - self.shared_mse.mean) / self._combined(self.shared_mse)

    @property
    def shared_escapes(self):
        return self.shared_margin_se > 10.0


def doubling_check(rate=1, n=10**6, seed=0, workers=1):
    """Squared errors of the three codecs, all on the same source samples.

    Only the one-bit case is backed by the analytic minimum over
    deterministic encoders; other rates are informational.
    """
    rate = as_rate(rate)
    return DoublingReport(
        int(rate.bits),
        mc_mse(cd.VQ_CONDMEAN, rate, RandomnessModel.NONE, n, seed, workers),
        mc_mse(cd.VQ_STOCHASTIC, rate, RandomnessModel.INDEPENDENT, n, seed, workers),
        mc_mse(cd.UQ, rate, RandomnessModel.SHARED, n, seed, workers),
    )


# ---------------------------------------------------------------------------
# deterministic quadrature oracles

_GL_ORDER = 8


def gauss_legendre(f, a, b, panels):
    """Composite Gauss-Legendre rule for a vectorized ``f`` on ``[a, b]``."""
    x, w = np.polynomial.legendre.leggauss(_GL_ORDER)
    edges = np.linspace(a, b, int(panels) + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = mid[:, None] + half[:, None] * x[None, :]
    return float(np.sum(half[:, None] * w[None, :] * f(nodes)))


def integrate_conditional_distortion(codec, rate, theta, panels=4096):
    """``E[d | theta]`` by integrating the codec over its dither.

    The integrand runs the actual encoder and decoder at each quadrature
    node. For ``uq`` the dither interval is split where the encoder output
    jumps, so each piece is smooth.
    """
    if int(panels) < 64:
        raise ConfigurationError("need at least 64 panels")
    model = cd.check_codec(codec, None)
    rate = as_rate(rate)
    theta = float(geometry.canonicalize(theta))

    if codec == cd.VQ_CONDMEAN:
        return float(cd.reconstruction_distortion(theta, cd.roundtrip(codec, theta, rate, model)))

    if codec == cd.VQ_STOCHASTIC:
        k = cd.vq_encode(theta, rate)

        def f(u):
            return geometry.distortion(theta, cd.vq_decode_stochastic(k, u, rate))

        return gauss_legendre(f, 0.0, 1.0, panels)

    def f(u):
        return geometry.distortion(theta, cd.uq_decode(cd.uq_encode(theta, u, rate), u, rate))

    y = rate.codewords * theta / TWO_PI
    brk = (0.5 - y) % 1.0
    if brk == 0.0:
        return gauss_legendre(f, 0.0, 1.0, panels)
    p1 = max(1, round(panels * brk))
    p2 = max(1, int(panels) - p1)
    return gauss_legendre(f, 0.0, brk, p1) + gauss_legendre(f, brk, 1.0, p2)


def integrate_partition_mse(t, panels=256):
    """Average squared error of the two-arc partition by direct quadrature.

    For each arc the mean point and the mean squared distance to it are
    both integrated numerically; no closed-form arc error is used.
    """
    t = float(t)
    if not 0.0 < t < TWO_PI:
        raise InvalidInputError("arc length must lie in (0, 2*pi)")
    total = 0.0
    for a, b in ((0.0, t), (t, TWO_PI)):
        length = b - a
        m1 = gauss_legendre(np.cos, a, b, panels) / length
        m2 = gauss_legendre(np.sin, a, b, panels) / length

        def sq(phi):
            return (np.cos(phi) - m1) ** 2 + (np.sin(phi) - m2) ** 2

        total += gauss_legendre(sq, a, b, panels) / TWO_PI
    return total
