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

"""The circuit based energy harvesting law and its surrogates.

The harvested DC power for a received RF power x is

    phi~(x) = lambda * (W0(mu * e^mu * I0(nu * sqrt(2x))) / mu - 1)^2
    phi(x)  = min(phi~(x), phi~(A_s^2))

phi~ is convex on [0, A_s^2] and phi(0) = 0.  Since W0(mu*e^mu) = mu
the bracket is evaluated as the offset d = W0(...) - mu directly (see
specfun.lambert_w0_shift), which keeps the small-signal regime,
phi ~ x^2, exact to the last digit.

The sigmoidal and linear laws are least-squares surrogates of phi used
by the baseline schemes.
"""

import functools
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .common import Globals
from .exceptions import DomainError, RangeError
from .specfun import bessel_i1_over_i0, lambert_w0_shift, log_bessel_i0


@dataclass(frozen=True)
class EhCircuitParams:
    """Circuit constants; lam is lambda (W), nu is 1/sqrt(W), a_s_sq is W"""

    lam: float
    mu: float
    nu: float
    a_s_sq: float

    def __post_init__(self):
        for name in ("lam", "mu", "nu", "a_s_sq"):
            value = getattr(self, name)
            if not value > 0.0 or not math.isfinite(value):
                raise DomainError(f"EH circuit parameter {name} must be positive ({value})")

    @staticmethod
    def defaults() -> "EhCircuitParams":
        """The reference circuit"""
        return EhCircuitParams(
            lam=Globals.get("eh.lambda"),
            mu=Globals.get("eh.mu"),
            nu=Globals.get("eh.nu"),
            a_s_sq=Globals.get("eh.a_s_sq"),
        )


@dataclass(frozen=True)
class SigmoidEhParams:
    """psi(x) = [M/(1+e^(-a(x-b))) - M*Omega]/(1-Omega), Omega = 1/(1+e^(ab))"""

    m_sat: float
    a: float
    b: float

    def __post_init__(self):
        if not (self.m_sat > 0.0 and self.a > 0.0 and self.b > 0.0):
            raise DomainError(f"sigmoid parameters must be positive ({self})")


@dataclass(frozen=True)
class LinearEhParams:
    """Constant conversion efficiency"""

    eta: float

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise DomainError(f"efficiency must lie in (0, 1] ({self.eta})")


@dataclass(frozen=True)
class SurrogateFit:
    """Fitted surrogate laws plus their RMS residuals against phi"""

    sigmoid: SigmoidEhParams
    linear: LinearEhParams
    sigmoid_rms: float
    linear_rms: float
    grid_size: int


def _offset(x: float, p: EhCircuitParams):
    """Return (t, d) with t = nu*sqrt(2x) and d = W0(mu*e^mu*I0(t)) - mu"""
    t = p.nu * math.sqrt(2.0 * x)
    return t, lambert_w0_shift(p.mu, log_bessel_i0(t).log_magnitude)


def phi_tilde(x: float, p: EhCircuitParams) -> float:
    """The harvesting law without the saturation clamp"""
    if x < 0.0:
        raise DomainError(f"received power must be non-negative ({x})")
    if x == 0.0:
        return 0.0
    _, offset = _offset(x, p)
    return p.lam * (offset / p.mu) ** 2


@functools.lru_cache(maxsize=64)
def saturation_power(p: EhCircuitParams) -> float:
    """phi(A_s^2), the largest harvestable power"""
    return phi_tilde(p.a_s_sq, p)


def phi(x: float, p: EhCircuitParams) -> float:
    """Harvested power (W) for received power x (W)"""
    if x < 0.0:
        raise DomainError(f"received power must be non-negative ({x})")
    if x >= p.a_s_sq:
        return saturation_power(p)
    return min(phi_tilde(x, p), saturation_power(p))


def phi_vector(xs, p: EhCircuitParams) -> np.ndarray:
    """phi over an array of received powers"""
    return np.array([phi(float(x), p) for x in np.ravel(xs)]).reshape(np.shape(xs))


def phi_prime(x: float, p: EhCircuitParams) -> float:
    """d phi~/dx for 0 < x < A_s^2"""
    if not 0.0 < x < p.a_s_sq:
        raise DomainError(
            f"phi_prime is only defined strictly inside (0, {p.a_s_sq}) ({x})"
        )
    t, offset = _offset(x, p)
    big_w = p.mu + offset
    return (
        2.0
        * p.lam
        * (offset / p.mu)
        / p.mu
        * big_w
        / (1.0 + big_w)
        * bessel_i1_over_i0(t)
        * p.nu
        / math.sqrt(2.0 * x)
    )


def phi_inverse(rho: float, p: EhCircuitParams) -> float:
    """The received power in [0, A_s^2] that harvests rho"""
    if rho < 0.0:
        raise DomainError(f"harvested power must be non-negative ({rho})")
    ceiling = saturation_power(p)
    if rho > ceiling * (1.0 + 1.0e-12):
        raise RangeError(
            f"demanded power {rho:.6e} W exceeds the saturation ceiling {ceiling:.6e} W"
        )
    if rho >= ceiling:
        return p.a_s_sq
    if rho == 0.0:
        return 0.0
    return optimize.brentq(
        lambda x: phi_tilde(x, p) - rho, 0.0, p.a_s_sq, xtol=1.0e-300, rtol=1.0e-13
    )


def sigmoid(x, s: SigmoidEhParams):
    """Evaluate the normalized sigmoid law (scalar or array)"""
    omega = special.expit(-s.a * s.b)
    raw = s.m_sat * special.expit(s.a * (np.asarray(x, dtype=float) - s.b))
    value = (raw - s.m_sat * omega) / (1.0 - omega)
    return float(value) if np.ndim(value) == 0 else value


def linear(x, l: LinearEhParams):
    """Evaluate the linear law (scalar or array)"""
    value = l.eta * np.asarray(x, dtype=float)
    return float(value) if np.ndim(value) == 0 else value


def sigmoid_inverse(rho: float, s: SigmoidEhParams) -> float:
    """Closed form inverse of the sigmoid law"""
    if rho < 0.0:
        raise DomainError(f"harvested power must be non-negative ({rho})")
    if rho >= s.m_sat:
        raise RangeError(
            f"demanded power {rho:.6e} W is not below the sigmoid maximum {s.m_sat:.6e} W"
        )
    if rho == 0.0:
        return 0.0
    omega = float(special.expit(-s.a * s.b))
    level = rho * (1.0 - omega) + s.m_sat * omega
    return s.b - math.log((s.m_sat - level) / level) / s.a


def _normalized_sigmoid(u, alpha, beta):
    omega = special.expit(-alpha * beta)
    return (special.expit(alpha * (u - beta)) - omega) / (1.0 - omega)


def _scaled_sigmoid(u, scale, alpha, beta):
    return scale * _normalized_sigmoid(u, alpha, beta)


def _rms(values, reference) -> float:
    return float(np.sqrt(np.mean((values - reference) ** 2)))


# Starting points (slope, inflection) in units of A_s^2
_SIGMOID_STARTS = ((2.0, 0.5), (5.0, 0.8), (10.0, 1.0), (4.0, 1.5), (1.0, 3.0))
# Starting points (scale, slope, inflection) with the ceiling as the unit of scale
_SCALED_STARTS = ((1.8, 2.0, 0.7), (1.2, 4.0, 0.5), (3.0, 1.0, 1.5))
_MAX_SCALE = 1.0e3


def _linear_seeded_start(slope: float, alpha: float, beta: float = 1.0):
    """A gentle sigmoid whose initial slope matches the linear fit"""
    omega = float(special.expit(-alpha * beta))
    # g'(0) = alpha * Omega for the normalized sigmoid
    return (min(max(slope / (alpha * omega), 1.0), _MAX_SCALE), alpha, beta)


def _best_fit(func, u_grid, y_grid, starts, bounds):
    best = None
    for start in starts:
        try:
            fitted, _ = optimize.curve_fit(
                func, u_grid, y_grid, p0=start, bounds=bounds, maxfev=20000
            )
        except (RuntimeError, ValueError) as err:
            logging.debug("sigmoid fit from %s failed: %s", start, err)
            fitted = np.asarray(start)
        residual = _rms(func(u_grid, *fitted), y_grid)
        if best is None or residual < best[0]:
            best = (residual, fitted)
    return best


@functools.lru_cache(maxsize=16)
def fit_surrogates(p: EhCircuitParams, grid_size: int = 256) -> SurrogateFit:
    """
    Least-squares fits of the sigmoid and linear laws to phi on [0, A_s^2].

    The sigmoid maximum is first pinned to the ceiling phi(A_s^2).  When
    that fit is worse than the linear one the maximum is freed, bounded
    below by the ceiling, so every demand the exact law can meet stays
    invertible and the sigmoid never fits worse than the linear law.
    """
    if grid_size < 16:
        raise DomainError(f"surrogate fit needs at least 16 grid points ({grid_size})")
    ceiling = saturation_power(p)
    grid = np.linspace(0.0, p.a_s_sq, grid_size)
    target = phi_vector(grid, p)
    u_grid = grid / p.a_s_sq
    y_grid = target / ceiling

    eta = float(np.dot(grid, target) / np.dot(grid, grid))
    linear_params = LinearEhParams(eta=min(max(eta, 1.0e-12), 1.0))
    linear_rms = _rms(linear(grid, linear_params), target)

    residual, (alpha, beta) = _best_fit(
        _normalized_sigmoid,
        u_grid,
        y_grid,
        _SIGMOID_STARTS,
        ([1.0e-3, 1.0e-3], [1.0e3, 10.0]),
    )
    scale = 1.0
    if residual * ceiling > linear_rms:
        slope = float(np.dot(u_grid, y_grid) / np.dot(u_grid, u_grid))
        free = _best_fit(
            _scaled_sigmoid,
            u_grid,
            y_grid,
            _SCALED_STARTS + tuple(_linear_seeded_start(slope, gentle) for gentle in (0.5, 0.02)),
            ([1.0, 1.0e-3, 1.0e-3], [_MAX_SCALE, 1.0e3, 10.0]),
        )
        logging.debug(
            "pinned sigmoid rms %.3e above linear rms %.3e, freed maximum gives %.3e",
            residual * ceiling,
            linear_rms,
            free[0] * ceiling,
        )
        if free[0] < residual:
            scale, alpha, beta = (float(value) for value in free[1])
    sigmoid_params = SigmoidEhParams(
        m_sat=scale * ceiling, a=float(alpha) / p.a_s_sq, b=float(beta) * p.a_s_sq
    )
    sigmoid_rms = _rms(sigmoid(grid, sigmoid_params), target)
    if sigmoid_rms > linear_rms:
        logging.warning(
            "sigmoid surrogate rms %.3e exceeds the linear rms %.3e", sigmoid_rms, linear_rms
        )
    logging.debug(
        "surrogates: m=%.4e a=%.4e b=%.4e (rms %.3e), eta=%.4f (rms %.3e)",
        sigmoid_params.m_sat,
        sigmoid_params.a,
        sigmoid_params.b,
        sigmoid_rms,
        linear_params.eta,
        linear_rms,
    )
    return SurrogateFit(
        sigmoid=sigmoid_params,
        linear=linear_params,
        sigmoid_rms=sigmoid_rms,
        linear_rms=linear_rms,
        grid_size=grid_size,
    )
