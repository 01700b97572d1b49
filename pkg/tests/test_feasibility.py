#!/usr/bin/env python

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

"""Demand curves, the feasibility verdict and the tau_bar interval"""

import numpy as np
import pytest

from wpcn.core.eh_model import saturation_power
from wpcn.core.exceptions import DomainError
from wpcn.core.feasibility import (
    FeasibilityStatus,
    FeasibilityVerdict,
    check_feasibility,
    demand_curve,
    demand_f,
    max_feasible_sum_rate,
    trivial_powers,
)


def test_demand_closed_form(cfg, channel):
    """f(1/2) = (2^(2R) - 1) sigma~^2 - 2 q/T_f"""
    eff_noise = float(channel.eff_noise_w[0])
    loaded = cfg.replace(q_init_j=(1.0e-12, 0.0))
    expected = 3.0 * eff_noise - 2.0e-12
    assert demand_f(0.5, 0, loaded, eff_noise) == pytest.approx(expected, rel=1e-12)
    taus = np.array([0.1, 0.5, 0.9])
    curve = demand_curve(taus, 0, loaded, eff_noise)
    assert curve[1] == pytest.approx(expected, rel=1e-12)
    with pytest.raises(DomainError):
        demand_f(0.0, 0, cfg, eff_noise)
    with pytest.raises(DomainError):
        demand_curve([0.5, 1.0], 0, cfg, eff_noise)


def test_trivial(cfg, channel):
    """Enough stored energy makes power transfer unnecessary"""
    loaded = cfg.replace(q_init_j=(1.0, 1.0))
    verdict = check_feasibility(loaded, channel)
    assert verdict.status is FeasibilityStatus.TRIVIAL
    assert verdict.interval is None
    powers = trivial_powers(loaded, channel)
    assert verdict.trivial_powers == powers
    assert powers[0] == pytest.approx(float(channel.eff_noise_w[0]), rel=1e-12)


def test_infeasible(cfg, channel):
    """A rate no harvester can pay for"""
    verdict = check_feasibility(cfg.with_sum_rate(120.0), channel)
    assert verdict.status is FeasibilityStatus.INFEASIBLE
    assert verdict.interval is None


def test_verdict_consistency():
    """An interval comes with the non-trivial verdict only"""
    with pytest.raises(DomainError):
        FeasibilityVerdict(FeasibilityStatus.NON_TRIVIAL)
    with pytest.raises(DomainError):
        FeasibilityVerdict(FeasibilityStatus.INFEASIBLE, trivial_powers=(1.0, 1.0))


@pytest.mark.parametrize("rates", [(1.0, 1.0), (4.0, 9.0), (8.0, 8.0)])
def test_interval(cfg, channel, rates):
    """Both demands fit below the ceiling over [tau_min, tau_max]"""
    cfg = cfg.replace(r_req=rates)
    ceiling = saturation_power(cfg.eh)
    verdict = check_feasibility(cfg, channel)
    assert verdict.status is FeasibilityStatus.NON_TRIVIAL
    interval = verdict.interval
    assert 0.0 < interval.tau_min <= interval.tau_max <= interval.tau_hi < 1.0
    assert interval.tau_min == max(interval.tau_min_k)
    for k in range(2):
        eff_noise = float(channel.eff_noise_w[k])
        for tau in np.linspace(interval.tau_min, interval.tau_max, 25):
            assert demand_f(tau, k, cfg, eff_noise) <= ceiling * (1.0 + 1e-9)
        # the stationary point is the minimum of the demand
        stationary = interval.tau_max_k[k]
        low = demand_f(stationary * (1.0 - 1e-4), k, cfg, eff_noise)
        high = demand_f(stationary * (1.0 + 1e-4), k, cfg, eff_noise)
        assert demand_f(stationary, k, cfg, eff_noise) <= min(low, high)
    binding = int(np.argmax(interval.tau_min_k))
    below = interval.tau_min * (1.0 - 1e-6)
    assert demand_f(below, binding, cfg, float(channel.eff_noise_w[binding])) > ceiling


def test_interval_against_scan(cfg, channel):
    """No feasible tau_bar is missed to the left of tau_min"""
    cfg = cfg.replace(r_req=(6.0, 9.0))
    ceiling = saturation_power(cfg.eh)
    verdict = check_feasibility(cfg, channel)
    assert verdict.status is FeasibilityStatus.NON_TRIVIAL
    taus = np.linspace(1.0e-5, 1.0 - 1.0e-5, 100001)
    feasible = np.ones(taus.size, dtype=bool)
    for k in range(2):
        feasible &= demand_curve(taus, k, cfg, float(channel.eff_noise_w[k])) <= ceiling
    # only points clearly away from the ceiling count
    clear = np.ones(taus.size, dtype=bool)
    for k in range(2):
        clear &= demand_curve(taus, k, cfg, float(channel.eff_noise_w[k])) <= 0.99 * ceiling
    assert np.any(clear)
    assert taus[clear].min() >= verdict.interval.tau_min
    assert taus[feasible].max() <= verdict.interval.tau_hi + 1.0e-5


def test_max_feasible_sum_rate(cfg, channel):
    """Feasible just below the bound, infeasible just above"""
    bound = max_feasible_sum_rate(cfg, channel)
    assert 2.0 < bound < 120.0
    below = check_feasibility(cfg.with_sum_rate(bound - 1.0e-3), channel)
    above = check_feasibility(cfg.with_sum_rate(bound + 1.0e-3), channel)
    assert below.status is FeasibilityStatus.NON_TRIVIAL
    assert above.status is FeasibilityStatus.INFEASIBLE
