"""Circle arithmetic and the cosine distortion.

Every function accepts scalars or numpy arrays and broadcasts. Scalar
inputs give Python floats back.
"""

from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError

TWO_PI = 2.0 * np.pi

# values this close below 2*pi are folded onto 0
_WRAP_EPS = 1e-15
_ON_CIRCLE_TOL = 1e-9
# below this argument 1 - sin(x)/x is evaluated by its Taylor series
SERIES_CUTOFF = 1e-3


def _scalar_or_array(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


class Point(NamedTuple):
    """Cartesian point ``(x1, x2)``; components may be arrays."""

    x1: object
    x2: object

    @property
    def radius(self):
        return _scalar_or_array(np.hypot(self.x1, self.x2))

    @property
    def angle(self):
        return canonicalize(np.arctan2(self.x2, self.x1))


def canonicalize(a):
    """Map angles to their representative in ``[0, 2*pi)``.

    Raises
    ------
    InvalidInputError
        If any element of `a` is NaN or infinite.
    """
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("angle must be finite")
    r = a - TWO_PI * np.floor(a / TWO_PI)
    # r can land a hair below 0 or at 2*pi through rounding
    r = np.where((r >= TWO_PI - _WRAP_EPS) | (r < 0.0), 0.0, r)
    return _scalar_or_array(r)


def wrap(a):
    """Signed representative of `a` in ``[-pi, pi)``."""
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("angle must be finite")
    r = a - TWO_PI * np.floor((a + np.pi) / TWO_PI)
    # a + pi can round across a multiple of 2*pi
    r = np.where(r >= np.pi, r - TWO_PI, np.where(r < -np.pi, r + TWO_PI, r))
    return _scalar_or_array(r)


def circular_difference(theta, theta_hat):
    """``theta_hat - theta`` reduced to ``[-pi, pi)``."""
    return wrap(np.asarray(theta_hat, dtype=float) - np.asarray(theta, dtype=float))


def to_cartesian(theta):
    theta = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(theta)):
        raise InvalidInputError("angle must be finite")
    return Point(_scalar_or_array(np.cos(theta)), _scalar_or_array(np.sin(theta)))


def from_cartesian(x1, x2):
    """Angle of a point on the unit circle.

    The point must lie within 1e-9 of the unit circle; anything else is
    rejected rather than silently projected.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    r = np.hypot(x1, x2)
    if not np.all(np.abs(r - 1.0) <= _ON_CIRCLE_TOL):
        raise InvalidInputError("point is not on the unit circle")
    return canonicalize(np.arctan2(x2, x1))


def distortion(theta, theta_hat):
    """Cosine distance ``1 - cos(theta_hat - theta)``, in ``[0, 2]``."""
    delta = np.asarray(theta_hat, dtype=float) - np.asarray(theta, dtype=float)
    return _scalar_or_array(1.0 - np.cos(delta))


def distortion_mse_equiv(theta, theta_hat):
    """Half the squared Euclidean distance between the two circle points."""
    p = to_cartesian(theta)
    q = to_cartesian(theta_hat)
    return _scalar_or_array(0.5 * ((np.asarray(q.x1) - p.x1) ** 2 + (np.asarray(q.x2) - p.x2) ** 2))


def squared_error(theta, angle_hat, radius_hat=1.0):
    """``||x_hat - x||^2`` for ``x`` on the circle and ``x_hat`` in polar form.

    `radius_hat` may be below one (conditional-mean reconstructions).
    """
    theta = np.asarray(theta, dtype=float)
    angle_hat = np.asarray(angle_hat, dtype=float)
    radius_hat = np.asarray(radius_hat, dtype=float)
    dx = radius_hat * np.cos(angle_hat) - np.cos(theta)
    dy = radius_hat * np.sin(angle_hat) - np.sin(theta)
    return _scalar_or_array(dx * dx + dy * dy)


def one_minus_sinc(x):
    """``1 - sin(x)/x`` without cancellation for small ``|x|``.

    Uses ``x^2/6 - x^4/120 + x^6/5040`` below ``SERIES_CUTOFF``; the
    truncation error there is under ``x^8/362880``, far below double
    precision relative to the leading term.
    """
    x = np.abs(np.asarray(x, dtype=float))
    x2 = x * x
    series = x2 * (1.0 / 6.0 - x2 * (1.0 / 120.0 - x2 / 5040.0))
    with np.errstate(invalid="ignore", divide="ignore"):
        direct = 1.0 - np.sin(x) / x
    return _scalar_or_array(np.where(x < SERIES_CUTOFF, series, direct))


def arc_mean_radius(width):
    """Distance from the origin of the mean of a uniform arc of `width` radians.

    Equals ``sin(width/2) / (width/2)``; a full circle (``width = 2*pi``)
    gives exactly 0.
    """
    width = np.asarray(width, dtype=float)
    r = 1.0 - np.asarray(one_minus_sinc(0.5 * width))
    r = np.where(width >= TWO_PI, 0.0, r)
    return _scalar_or_array(r)
