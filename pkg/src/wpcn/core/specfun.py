#  WPCN-Alloc
#   Copyright (C) 2023 The WPCN-Alloc authors
#
#   This program is free software; you can redistribute it and/or modify
#   it under the terms of the GNU General Public License as published by
#   the Free Software Foundation; either version 2 of the License, or
#   (at your option) any later version.
#
#   This program is distributed in the hope that it will be useful,
#   but WITHOUT ANY WARRANTY; without even the implied warranty of
#   MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
#   GNU General Public License for more details.
#
#   You should have received a copy of the GNU General Public License along
#   with this program; if not, write to the Free Software Foundation, Inc.,
#   51 Franklin Street, Fifth Floor, Boston, MA 02110-1301 USA.

"""Scalar special functions behind the energy harvesting law.

The Bessel and Lambert-W kernels come from scipy.special.  What this
module adds is the log-domain plumbing: I0(t) grows like e^t, so with
realistic circuit constants the Lambert-W argument of the harvesting
law is around e^44 and would overflow long before the inputs are
physically unreasonable.
"""

import math
from dataclasses import dataclass
from typing import Union

from scipy import special

from .exceptions import DomainError

INV_E = math.exp(-1.0)
BRANCH_TOLERANCE = 1.0e-12
# Below this log I0 is computed from the power series of I0 - 1
SERIES_LIMIT = 2.0
_MAX_HALLEY_STEPS = 50


@dataclass(frozen=True)
class LogDomainValue:
    """A strictly positive real held as its natural logarithm."""

    log_magnitude: float

    def __post_init__(self):
        if not math.isfinite(self.log_magnitude):
            raise DomainError(f"log magnitude must be finite ({self.log_magnitude})")

    def times(self, other: "LogDomainValue") -> "LogDomainValue":
        """The product of two log-domain values"""
        return LogDomainValue(self.log_magnitude + other.log_magnitude)

    def scaled(self, factor: float) -> "LogDomainValue":
        """Multiply by a positive real"""
        if factor <= 0.0:
            raise DomainError(f"scale factor must be positive ({factor})")
        return LogDomainValue(self.log_magnitude + math.log(factor))

    def to_float(self) -> float:
        """Explicit conversion - raises OverflowError when not representable"""
        return math.exp(self.log_magnitude)


def lambert_w0(x: float) -> float:
    """Principal branch of the Lambert-W function, w*exp(w) = x"""
    if x < -INV_E - BRANCH_TOLERANCE:
        raise DomainError(f"lambert_w0 is undefined below -1/e ({x})")
    if x <= -INV_E:
        return -1.0
    if x == 0.0:
        return 0.0
    return float(special.lambertw(x, 0).real)


def _halley(func, start: float, floor: float = 0.0) -> float:
    """Halley iteration; func returns (g, g', g'').  Iterates stay above floor."""
    root = start
    for _ in range(_MAX_HALLEY_STEPS):
        value, slope, curvature = func(root)
        if value == 0.0:
            return root
        step = 2.0 * value * slope / (2.0 * slope * slope - value * curvature)
        candidate = root - step
        if candidate <= floor:
            candidate = 0.5 * (root + floor)
        if abs(candidate - root) <= 4.0e-16 * abs(candidate):
            return candidate
        root = candidate
    return root


def lambert_w0_of_exp(l: Union[float, LogDomainValue]) -> float:
    """W0(exp(l)) without forming exp(l) when l > 1"""
    if isinstance(l, LogDomainValue):
        l = l.log_magnitude
    if not math.isfinite(l):
        raise DomainError(f"lambert_w0_of_exp needs a finite argument ({l})")
    if l <= 1.0:
        return lambert_w0(math.exp(l))

    def residual(w):
        return w + math.log(w) - l, 1.0 + 1.0 / w, -1.0 / (w * w)

    log_l = math.log(l)
    return _halley(residual, l - log_l + log_l / l)


def lambert_w0_shift(mu: float, log_ratio: float) -> float:
    """
    Return W0(mu*e^mu*e^L) - mu for L = log_ratio >= 0.

    With d = W0(...) - mu the defining equation becomes
    d + log1p(d/mu) = L, which keeps full relative precision in d
    when L is small and W0 sits right next to mu.
    """
    if mu <= 0.0:
        raise DomainError(f"mu must be positive ({mu})")
    if log_ratio < 0.0:
        raise DomainError(f"log ratio must be non-negative ({log_ratio})")
    if log_ratio == 0.0:
        return 0.0
    if log_ratio > 1.0:
        return lambert_w0_of_exp(math.log(mu) + mu + log_ratio) - mu

    def residual(delta):
        return (
            delta + math.log1p(delta / mu) - log_ratio,
            1.0 + 1.0 / (mu + delta),
            -1.0 / ((mu + delta) ** 2),
        )

    return _halley(residual, log_ratio * mu / (1.0 + mu))


def _bessel_i0_minus_one(t: float) -> float:
    """Power series of I0(t) - 1, for small t only"""
    quarter = 0.25 * t * t
    term = 1.0
    total = 0.0
    for m in range(1, 40):
        term *= quarter / (m * m)
        total += term
        if term <= 1.0e-17 * total:
            break
    return total


def bessel_i0(t: float) -> float:
    """Modified Bessel function of the first kind, order zero"""
    if t < 0.0:
        raise DomainError(f"bessel_i0 needs t >= 0 ({t})")
    return float(special.i0(t))


def log_bessel_i0(t: float) -> LogDomainValue:
    """log I0(t), valid for every t >= 0"""
    if t < 0.0:
        raise DomainError(f"log_bessel_i0 needs t >= 0 ({t})")
    if t <= SERIES_LIMIT:
        return LogDomainValue(math.log1p(_bessel_i0_minus_one(t)))
    return LogDomainValue(math.log(float(special.i0e(t))) + t)


def bessel_i1_over_i0(t: float) -> float:
    """I1(t)/I0(t), in [0, 1)"""
    if t < 0.0:
        raise DomainError(f"bessel_i1_over_i0 needs t >= 0 ({t})")
    if t == 0.0:
        return 0.0
    return float(special.i1e(t) / special.i0e(t))
