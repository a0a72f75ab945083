"""Fixed-rate encoders and decoders for the circular uniform source.

Three codecs share one rate-R codebook of ``N = 2**R`` equally spaced
centers ``2*pi*k/N``:

``vq-stochastic``
    nearest-center encoder, decoder samples uniformly from the Voronoi arc
    of the received center.
``vq-condmean``
    nearest-center encoder, decoder outputs the arc's conditional mean
    (strictly inside the circle).
``uq``
    universal (dithered) quantization of ``N*theta/(2*pi)`` with a dither
    that encoder and decoder share.
"""

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import geometry
from .errors import InvalidCodeError, InvalidInputError, ModelMismatchError
from .geometry import TWO_PI
from .rng import Stream, check_seed, uniforms

MAX_BITS = 32


@dataclass(frozen=True)
class Rate:
    """Fixed rate of ``bits`` per sample, ``codewords = 2**bits``."""

    bits: int

    def __post_init__(self):
        if isinstance(self.bits, bool) or not isinstance(self.bits, (int, np.integer)):
            raise InvalidInputError(f"rate must be an integer number of bits, got {self.bits!r}")
        if not 0 <= self.bits <= MAX_BITS:
            raise InvalidInputError(f"rate must be in [0, {MAX_BITS}] bits, got {self.bits}")

    @property
    def codewords(self):
        return 1 << int(self.bits)


def as_rate(rate):
    return rate if isinstance(rate, Rate) else Rate(rate)


class RandomnessModel(enum.Enum):
    NONE = "none"
    INDEPENDENT = "independent"
    SHARED = "shared"


VQ_STOCHASTIC = "vq-stochastic"
VQ_CONDMEAN = "vq-condmean"
UQ = "uq"
CODECS = (VQ_STOCHASTIC, VQ_CONDMEAN, UQ)

ACCEPTED_MODELS = {
    VQ_STOCHASTIC: {RandomnessModel.INDEPENDENT, RandomnessModel.SHARED},
    VQ_CONDMEAN: set(RandomnessModel),
    UQ: {RandomnessModel.SHARED},
}

# the topology each codec is evaluated under by default
PRESCRIBED_MODEL = {
    VQ_STOCHASTIC: RandomnessModel.INDEPENDENT,
    VQ_CONDMEAN: RandomnessModel.NONE,
    UQ: RandomnessModel.SHARED,
}


def check_codec(codec, model=None):
    """Validate a codec id and resolve its randomness model."""
    if codec not in CODECS:
        raise ModelMismatchError(f"unknown codec {codec!r}; expected one of {', '.join(CODECS)}")
    model = PRESCRIBED_MODEL[codec] if model is None else RandomnessModel(model)
    if model not in ACCEPTED_MODELS[codec]:
        if codec == UQ:
            raise ModelMismatchError("uq needs a dither shared by encoder and decoder")
        raise ModelMismatchError(f"{codec} cannot run under the {model.value} randomness model")
    return model


def _check_code(k, n_codewords):
    k = np.asarray(k)
    if not np.issubdtype(k.dtype, np.integer):
        if not np.all(np.floor(k) == k):
            raise InvalidCodeError("code index must be an integer")
        k = k.astype(np.int64)
    if np.any((k < 0) | (k >= n_codewords)):
        raise InvalidCodeError(f"code index outside [0, {n_codewords - 1}]")
    return k


def _check_dither(u):
    u = np.asarray(u, dtype=float)
    if not np.all((u >= 0.0) & (u < 1.0)):
        raise InvalidInputError("dither must lie in [0, 1)")
    return u


def _code_out(k):
    k = np.asarray(k, dtype=np.int64)
    return int(k) if k.ndim == 0 else k


def codebook(rate):
    """Center angles ``2*pi*k/N``; materializes all ``N`` entries."""
    n = as_rate(rate).codewords
    return TWO_PI * np.arange(n) / n


def center(k, rate):
    n = as_rate(rate).codewords
    k = _check_code(k, n)
    return geometry.canonicalize(TWO_PI * k / n)


def vq_encode(theta, rate, u=None):
    """Index of the nearest codebook center.

    `u` is accepted and ignored so the encoder has the same call shape as
    a stochastic one. Exact ties between two centers go to the lower index.
    """
    n = as_rate(rate).codewords
    y = n * np.asarray(geometry.canonicalize(theta)) / TWO_PI
    lo = np.floor(y)
    frac = y - lo
    lo = lo.astype(np.int64)
    k = np.where(frac > 0.5, lo + 1, lo) % n
    tie = frac == 0.5
    if np.any(tie):
        k = np.where(tie, np.minimum(lo % n, (lo + 1) % n), k)
    return _code_out(k)


def vq_decode_stochastic(k, u, rate):
    """Uniform sample from the Voronoi arc of center `k`, driven by `u`."""
    n = as_rate(rate).codewords
    k = _check_code(k, n)
    u = _check_dither(u)
    return geometry.canonicalize(TWO_PI * (k + (u - 0.5)) / n)


def vq_decode_condmean(k, rate):
    """Mean of the uniform distribution on the arc of center `k`.

    The result lies at the center's angle with radius ``sin(pi/N)/(pi/N)``,
    inside the unit circle, so it is returned as a plain ``Point``.
    """
    n = as_rate(rate).codewords
    k = _check_code(k, n)
    rho = geometry.arc_mean_radius(TWO_PI / n)
    phi = TWO_PI * k / n
    return geometry.Point(
        geometry._scalar_or_array(rho * np.cos(phi)),
        geometry._scalar_or_array(rho * np.sin(phi)),
    )


def uq_encode(theta, u, rate):
    """``round(N*theta/(2*pi) + u) mod N`` with halves rounded away from zero."""
    n = as_rate(rate).codewords
    u = _check_dither(u)
    y = n * np.asarray(geometry.canonicalize(theta)) / TWO_PI + u
    # y >= 0, so floor(y + 1/2) rounds halves away from zero
    return _code_out(np.floor(y + 0.5).astype(np.int64) % n)


def uq_decode(k, u, rate):
    """``2*pi*(k - u)/N``, canonicalized; `u` must be the encoder's dither."""
    n = as_rate(rate).codewords
    k = _check_code(k, n)
    u = _check_dither(u)
    return geometry.canonicalize(TWO_PI * (k - u) / n)


class RoundTrip(NamedTuple):
    code: object
    angle: object
    radius: object

    @property
    def point(self):
        return geometry.Point(
            geometry._scalar_or_array(self.radius * np.cos(self.angle)),
            geometry._scalar_or_array(self.radius * np.sin(self.angle)),
        )


def roundtrip(codec, theta, rate, model=None, u_enc=None, u_dec=None):
    """Encode then decode `theta`.

    Parameters
    ----------
    codec : str
        One of ``CODECS``.
    theta : float or ndarray
        Source angles.
    rate : Rate or int
    model : RandomnessModel, optional
        Defaults to the codec's prescribed topology.
    u_enc, u_dec : float or ndarray, optional
        Encoder and decoder dithers. Under ``SHARED`` only `u_enc` is
        needed (a `u_dec` is allowed if bitwise identical); under
        ``INDEPENDENT`` both are required; under ``NONE`` neither is used.

    Returns
    -------
    RoundTrip
        Code index, reconstruction angle and reconstruction radius
        (1 except for ``vq-condmean``).
    """
    model = check_codec(codec, model)
    rate = as_rate(rate)
    if model is RandomnessModel.SHARED:
        if u_enc is None:
            raise ModelMismatchError("shared model needs a dither")
        if u_dec is not None and not np.array_equal(np.asarray(u_dec), np.asarray(u_enc)):
            raise ModelMismatchError("shared model: encoder and decoder dithers differ")
        u_dec = u_enc
    elif model is RandomnessModel.INDEPENDENT:
        if u_enc is None or u_dec is None:
            raise ModelMismatchError("independent model needs separate encoder and decoder dithers")

    if codec == UQ:
        k = uq_encode(theta, u_enc, rate)
        angle = uq_decode(k, u_dec, rate)
        radius = np.ones_like(np.asarray(angle, dtype=float))
    elif codec == VQ_STOCHASTIC:
        k = vq_encode(theta, rate, u_enc)
        angle = vq_decode_stochastic(k, u_dec, rate)
        radius = np.ones_like(np.asarray(angle, dtype=float))
    else:
        k = vq_encode(theta, rate)
        angle = center(k, rate)
        radius = np.full_like(np.asarray(angle, dtype=float), geometry.arc_mean_radius(TWO_PI / rate.codewords))
    return RoundTrip(k, angle, geometry._scalar_or_array(radius))


def draw_dithers(model, seed, start, stop):
    """Encoder/decoder dithers for sample positions ``[start, stop)``.

    Shared returns the same array twice; independent reads two separate
    streams; none returns ``(None, None)``.
    """
    model = RandomnessModel(model)
    seed = check_seed(seed)
    if model is RandomnessModel.NONE:
        return None, None
    u1 = uniforms(seed, Stream.ENCODER, start, stop)
    if model is RandomnessModel.SHARED:
        return u1, u1
    return u1, uniforms(seed, Stream.DECODER, start, stop)


def reconstruction_distortion(theta, rt):
    """Half squared error of a round trip; equals the cosine distance on the circle."""
    return geometry._scalar_or_array(0.5 * np.asarray(geometry.squared_error(theta, rt.angle, rt.radius)))
