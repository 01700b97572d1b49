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

"""Demand curves, feasibility and the downlink fraction search interval.

User k needs an average harvested power during the downlink of

    f_k(tau) = ((1 - tau)/tau) (2^(R_k/(1 - tau)) - 1) sigma~_k^2 - q_k/(T_f tau)

to send R_k bits/s/Hz in the remaining 1 - tau of the frame.  Since
the harvested power never exceeds phi(A_s^2) the problem is feasible
exactly when some tau has f_k(tau) <= phi(A_s^2) for both users.  f_k
is convex, so each user's admissible set is an interval and all the
work below is bisection.
"""

import enum
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy import optimize

from .eh_model import saturation_power
from .exceptions import BracketingError, DomainError
from .system import N_USERS, ChannelRealization, SystemConfig

LN2 = math.log(2.0)
TAU_TOLERANCE = 1.0e-13
_TAU_EDGE = 1.0e-12
_MAX_ITERATIONS = 400
_NUDGE_STEPS = 64


class FeasibilityStatus(enum.Enum):
    """Outcome of the feasibility check"""

    INFEASIBLE = "infeasible"
    TRIVIAL = "trivial"
    NON_TRIVIAL = "non_trivial"


@dataclass(frozen=True)
class TauInterval:
    """
    The search interval [tau_min, tau_max] of the downlink fraction.
    tau_hi is the upper end of the set where every demand is below
    the saturation ceiling; tau_max never exceeds it.
    """

    tau_min: float
    tau_max: float
    tau_min_k: Tuple[float, float]
    tau_max_k: Tuple[float, float]
    tau_hi: float


@dataclass(frozen=True)
class FeasibilityVerdict:
    """Feasibility status with the interval or the trivial uplink powers"""

    status: FeasibilityStatus
    interval: Optional[TauInterval] = None
    trivial_powers: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if (self.interval is not None) != (self.status is FeasibilityStatus.NON_TRIVIAL):
            raise DomainError("an interval accompanies exactly the non-trivial verdict")
        if (self.trivial_powers is not None) != (self.status is FeasibilityStatus.TRIVIAL):
            raise DomainError("uplink powers accompany exactly the trivial verdict")


@dataclass(frozen=True)
class _UserWindow:
    lower: float
    upper: float
    stationary: float
    minimum: float


def _demand(tau, rate, eff_noise, q_init, t_frame):
    """f_k for scalar or array tau; overflows to +inf near tau = 1"""
    tau = np.asarray(tau, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        growth = np.expm1(LN2 * rate / (1.0 - tau))
        value = (1.0 - tau) / tau * growth * eff_noise - q_init / (t_frame * tau)
    return float(value) if np.ndim(value) == 0 else value


def _demand_slope(tau, rate, eff_noise, q_init, t_frame):
    """f_k'(tau) in closed form"""
    with np.errstate(over="ignore", invalid="ignore"):
        power = np.exp2(rate / (1.0 - tau))
        numerator = (
            power * (LN2 * rate * tau / (1.0 - tau) - 1.0) * eff_noise
            + eff_noise
            + q_init / t_frame
        )
    return float(numerator / (tau * tau))


def _user_terms(cfg: SystemConfig, ch: ChannelRealization, user: int):
    return (
        cfg.r_req[user],
        float(ch.eff_noise_w[user]),
        cfg.q_init_j[user],
        cfg.t_frame_s,
    )


def demand_f(tau_bar: float, user: int, cfg: SystemConfig, eff_noise: float) -> float:
    """Minimum average harvested power (W) user needs at downlink fraction tau_bar"""
    if not 0.0 < tau_bar < 1.0:
        raise DomainError(f"the demand curve is defined on (0, 1) only ({tau_bar})")
    return _demand(tau_bar, cfg.r_req[user], eff_noise, cfg.q_init_j[user], cfg.t_frame_s)


def demand_curve(taus, user: int, cfg: SystemConfig, eff_noise: float) -> np.ndarray:
    """demand_f over an array of downlink fractions"""
    taus = np.asarray(taus, dtype=float)
    if np.any(taus <= 0.0) or np.any(taus >= 1.0):
        raise DomainError("the demand curve is defined on (0, 1) only")
    return np.asarray(
        _demand(taus, cfg.r_req[user], eff_noise, cfg.q_init_j[user], cfg.t_frame_s)
    )


def _root(func, low: float, high: float) -> float:
    """Root of func on [low, high] where func(low) <= 0 < func(high)"""
    if func(low) > 0.0:
        return low
    try:
        return optimize.brentq(func, low, high, xtol=TAU_TOLERANCE, maxiter=_MAX_ITERATIONS)
    except (ValueError, RuntimeError) as err:
        raise BracketingError(f"no root on [{low:.6e}, {high:.6e}]: {err}") from err


def _inside(excess, tau: float, toward: float) -> float:
    """Step tau toward the window until the demand no longer exceeds the ceiling"""
    step = math.copysign(TAU_TOLERANCE, toward - tau)
    for _ in range(_NUDGE_STEPS):
        if excess(tau) <= 0.0:
            break
        tau += step
    return tau


def _needs_no_transfer(rate, eff_noise, q_init, t_frame) -> bool:
    """Condition under which f_k increases monotonically from -inf (or is flat)"""
    return rate == 0.0 or math.expm1(LN2 * rate) * eff_noise <= q_init / t_frame


def _user_window(terms, ceiling: float) -> Optional[_UserWindow]:
    """The interval where f_k <= ceiling, or None when it is empty"""
    rate = terms[0]

    def excess(tau):
        return _demand(tau, *terms) - ceiling

    if _needs_no_transfer(*terms):
        if rate == 0.0 or excess(1.0 - _TAU_EDGE) <= 0.0:
            return _UserWindow(0.0, 1.0, 0.0, -math.inf)
        if excess(_TAU_EDGE) > 0.0:
            return _UserWindow(0.0, _TAU_EDGE, 0.0, -math.inf)
        upper = _inside(excess, _root(excess, _TAU_EDGE, 1.0 - _TAU_EDGE), 0.0)
        return _UserWindow(0.0, upper, 0.0, -math.inf)

    # f_k' < 0 near zero and > 0 near one
    high = 0.5
    while _demand_slope(high, *terms) <= 0.0:
        high = 0.5 * (high + 1.0)
        if 1.0 - high < _TAU_EDGE:
            raise BracketingError("demand slope never turns positive")
    stationary = _root(lambda tau: _demand_slope(tau, *terms), _TAU_EDGE, high)
    minimum = _demand(stationary, *terms)
    if minimum > ceiling:
        return None

    low = stationary
    while excess(low) <= 0.0:
        low *= 0.5
        if low < 1.0e-300:
            raise BracketingError("demand never rises above the ceiling near zero")
    lower = _inside(excess, _root(lambda tau: -excess(tau), low, stationary), stationary)

    high = stationary
    while excess(high) <= 0.0:
        high = 0.5 * (high + 1.0)
        if 1.0 - high < _TAU_EDGE:
            high = 1.0 - _TAU_EDGE
            break
    upper = high
    if excess(high) > 0.0:
        upper = _inside(excess, _root(excess, stationary, high), stationary)
    return _UserWindow(min(lower, stationary), max(upper, stationary), stationary, minimum)


def _windows(cfg: SystemConfig, ch: ChannelRealization) -> List[Optional[_UserWindow]]:
    ceiling = saturation_power(cfg.eh)
    return [_user_window(_user_terms(cfg, ch, k), ceiling) for k in range(N_USERS)]


def _is_trivial(cfg: SystemConfig, ch: ChannelRealization) -> bool:
    for k in range(N_USERS):
        rate, eff_noise, q_init, t_frame = _user_terms(cfg, ch, k)
        if rate > 0.0 and not math.expm1(LN2 * rate) * eff_noise < q_init / t_frame:
            return False
    return True


def trivial_powers(cfg: SystemConfig, ch: ChannelRealization) -> Tuple[float, float]:
    """Minimum uplink powers (2^R_k - 1) sigma~_k^2"""
    powers = [
        math.expm1(LN2 * cfg.r_req[k]) * float(ch.eff_noise_w[k]) for k in range(N_USERS)
    ]
    return (powers[0], powers[1])


def compute_interval(cfg: SystemConfig, ch: ChannelRealization) -> TauInterval:
    """[tau_min, tau_max] for a feasible non-trivial problem"""
    windows = _windows(cfg, ch)
    if any(window is None for window in windows):
        raise BracketingError("a demand curve stays above the saturation ceiling")
    lower = max(window.lower for window in windows)
    upper = min(window.upper for window in windows)
    if lower > upper:
        raise BracketingError(
            f"the per-user windows do not overlap ({lower:.12f} > {upper:.12f})"
        )
    stationary = max(window.stationary for window in windows)
    return TauInterval(
        tau_min=lower,
        tau_max=min(max(stationary, lower), upper),
        tau_min_k=(windows[0].lower, windows[1].lower),
        tau_max_k=(windows[0].stationary, windows[1].stationary),
        tau_hi=upper,
    )


def check_feasibility(cfg: SystemConfig, ch: ChannelRealization) -> FeasibilityVerdict:
    """Infeasible, trivial (no power transfer needed) or non-trivial with its interval"""
    if _is_trivial(cfg, ch):
        return FeasibilityVerdict(
            FeasibilityStatus.TRIVIAL, trivial_powers=trivial_powers(cfg, ch)
        )
    windows = _windows(cfg, ch)
    if any(window is None for window in windows):
        logging.debug("infeasible: a demand minimum exceeds the saturation ceiling")
        return FeasibilityVerdict(FeasibilityStatus.INFEASIBLE)
    if max(window.lower for window in windows) > min(window.upper for window in windows):
        logging.debug("infeasible: the per-user windows do not overlap")
        return FeasibilityVerdict(FeasibilityStatus.INFEASIBLE)
    return FeasibilityVerdict(
        FeasibilityStatus.NON_TRIVIAL, interval=compute_interval(cfg, ch)
    )


def max_feasible_sum_rate(
    cfg: SystemConfig, ch: ChannelRealization, tolerance: float = 1.0e-6
) -> float:
    """Largest equally split sum rate for which the problem stays feasible"""

    def feasible(r_sum):
        verdict = check_feasibility(cfg.with_sum_rate(r_sum), ch)
        return verdict.status is not FeasibilityStatus.INFEASIBLE

    low, high = 0.0, 1.0
    while feasible(high):
        low, high = high, 2.0 * high
        if high > 4096.0:
            raise BracketingError("no finite sum rate bound found")
    while high - low > tolerance:
        middle = 0.5 * (low + high)
        if feasible(middle):
            low = middle
        else:
            high = middle
    return low
