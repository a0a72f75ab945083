"""Closed-form distortions, partition errors and SNR figures.

All rate-dependent quantities go through ``s = N*sin(pi/N)/pi``, i.e.
``sin(x)/x`` at ``x = pi/N``. ``1 - s`` is taken from the cancellation-free
``geometry.one_minus_sinc`` and ``1 - s**2`` as ``(1 - s)(1 + s)``, which
keeps every value accurate out to 32 bits, where ``x`` is about 7.3e-10.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import geometry
from .codec import MAX_BITS, as_rate
from .errors import DomainError
from .geometry import TWO_PI

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
DB_PER_NEPER = 10.0 / math.log(10.0)


def _gap(rate):
    """``1 - s`` for the rate; exactly 1 when there is a single codeword."""
    n = as_rate(rate).codewords
    if n == 1:
        return 1.0
    return float(geometry.one_minus_sinc(math.pi / n))


def d_uq_closed(rate):
    return _gap(rate)


def d_vq_closed(rate):
    g = _gap(rate)
    return g * (2.0 - g)


def relative_improvement(rate):
    """Fractional distortion reduction of UQ over VQ, ``(d_vq - d_uq) / d_vq``."""
    dv = d_vq_closed(rate)
    return (dv - d_uq_closed(rate)) / dv


def d_vq_conditional(theta, rate=1):
    """Expected distortion of ``vq-stochastic`` given the source angle.

    ``1 - (sin(pi/N)/(pi/N)) * cos(delta)`` with ``delta`` the offset from
    the nearest center; for one bit this is ``1 - (2/pi) cos(delta)``.
    """
    n = as_rate(rate).codewords
    theta = np.asarray(geometry.canonicalize(theta))
    y = n * theta / TWO_PI
    delta = TWO_PI * (y - np.round(y)) / n
    rho = geometry.arc_mean_radius(TWO_PI / n)
    return geometry._scalar_or_array(1.0 - rho * np.cos(delta))


def arc_mse(t):
    """Squared error about the mean for a uniform arc of length `t`.

    ``(t^2 + 2cos(t) - 2) / t^2``, computed as ``1 - sinc(t/2)^2``.
    """
    t = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t) | (t <= 0.0) | (t > TWO_PI)):
        raise DomainError("arc length must lie in (0, 2*pi]")
    g = np.asarray(geometry.one_minus_sinc(0.5 * t))
    return geometry._scalar_or_array(g * (2.0 - g))


def _check_partition(t):
    t = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t) | (t <= 0.0) | (t >= TWO_PI)):
        raise DomainError("partition arc length must lie in (0, 2*pi)")
    return t


def partition_avg_mse(t):
    """Average squared error of a two-arc partition with arcs ``t`` and ``2*pi - t``.

    ``(2*pi*t - t^2 + 2cos(t) - 2) / (2*pi*t - t^2)``, written as
    ``1 - 4 sin^2(t/2) / (t (2*pi - t))`` to avoid cancellation.
    """
    t = _check_partition(t)
    return geometry._scalar_or_array(1.0 - 4.0 * np.sin(0.5 * t) ** 2 / (t * (TWO_PI - t)))


def partition_avg_mse_weighted(t):
    """Same quantity as ``partition_avg_mse`` from the two arc errors."""
    t = _check_partition(t)
    s = TWO_PI - t
    return geometry._scalar_or_array(
        (t / TWO_PI) * np.asarray(arc_mse(t)) + (s / TWO_PI) * np.asarray(arc_mse(s))
    )


def partition_avg_mse_uncorrected(t):
    """Variant with ``+2`` in the numerator where ``-2`` belongs.

    Kept only for regression comparison: it evaluates to exactly 1 at
    ``t = pi`` and is never the average error of any partition.
    """
    t = _check_partition(t)
    return geometry._scalar_or_array((2.0 + TWO_PI * t - t * t + 2.0 * np.cos(t)) / (TWO_PI * t - t * t))


def golden_section(f, a, b, tol=1e-12, max_iter=500):
    """Minimize a unimodal scalar function on ``[a, b]``.

    Returns ``(x, f(x))`` for the midpoint of the final bracket.
    """
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
    x = 0.5 * (a + b)
    return x, f(x)


@dataclass(frozen=True)
class PartitionOptimum:
    t: float
    value: float
    grid_points: int


def optimize_partition(grid_points=4096):
    """Best two-arc split of the circle: grid scan, then golden-section refinement."""
    grid_points = int(grid_points)
    if grid_points < 16:
        raise DomainError("need at least 16 grid points")
    ts = TWO_PI * np.arange(1, grid_points) / grid_points
    vals = partition_avg_mse(ts)
    i = int(np.argmin(vals))
    lo = TWO_PI * i / grid_points
    hi = TWO_PI * (i + 2) / grid_points
    t, v = golden_section(lambda x: float(partition_avg_mse(x)), lo, hi)
    if v > vals[i]:
        t, v = float(ts[i]), float(vals[i])
    return PartitionOptimum(float(t), float(v), grid_points)


def snr_db(d):
    d = np.asarray(d, dtype=float)
    if np.any(~(d > 0.0)):
        raise DomainError("SNR needs a positive distortion")
    # + 0.0 turns -0.0 (at d == 1) into 0.0
    return geometry._scalar_or_array(-10.0 * np.log10(d) + 0.0)


def snr_gap_deficit_db(rate):
    """How far the UQ-over-VQ SNR gap is below its limit ``10*log10(2)``.

    ``-10*log10(1 - d_uq/2)``: positive and strictly decreasing in the
    rate, and representable long after the gap itself has rounded to its
    limit in double precision.
    """
    return -DB_PER_NEPER * math.log1p(-0.5 * d_uq_closed(rate))


def snr_gap_db(rate):
    """``snr(d_uq) - snr(d_vq) = 10*log10(1 + s)``."""
    return 10.0 * math.log10(2.0) - snr_gap_deficit_db(rate)


@dataclass(frozen=True)
class RdPoint:
    rate_bits: int
    n_codewords: int
    d_vq: float
    d_uq: float
    snr_vq_db: float
    snr_uq_db: float

    def as_dict(self):
        return asdict(self)


def rd_point(rate):
    rate = as_rate(rate)
    dv, du = d_vq_closed(rate), d_uq_closed(rate)
    return RdPoint(int(rate.bits), rate.codewords, dv, du, float(snr_db(dv)), float(snr_db(du)))


def rate_sweep(max_bits=MAX_BITS):
    """Closed-form rate-distortion points for rates ``0, ..., max_bits``."""
    max_bits = as_rate(max_bits).bits
    return [rd_point(r) for r in range(max_bits + 1)]
