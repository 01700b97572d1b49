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

"""Surrogate law baselines"""

import numpy as np
import pytest

from wpcn.core.allocator import allocate, validate_allocation
from wpcn.core.baselines import (
    EhModelKind,
    baseline_allocate,
    baseline_design,
    eigen_beams,
    evaluate_under_true_model,
)
from wpcn.core.eh_model import phi
from wpcn.core.exceptions import DomainError
from wpcn.core.feasibility import FeasibilityStatus, demand_f
from wpcn.core.system import ChannelRealization, sample_channel


def test_eigen_beams():
    """Equal time over the eigen-beams reproduces the covariance"""
    rng = np.random.default_rng(10)
    root = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    x_tilde = root @ root.conj().T
    betas, beams = eigen_beams(x_tilde)
    assert len(beams) == 2
    assert betas == pytest.approx((0.5, 0.5))
    rebuilt = sum(beta * np.outer(beam, beam.conj()) for beta, beam in zip(betas, beams))
    assert np.allclose(rebuilt, x_tilde, atol=1e-10 * np.linalg.norm(x_tilde))
    assert eigen_beams(np.zeros((3, 3))) == ((), ())


def test_single_demand_is_matched_filter(cfg, channel):
    """With one user asking for nothing the design beams at the other"""
    cfg = cfg.replace(r_req=(1.0, 0.0))
    design = baseline_design(channel, cfg, EhModelKind.LINEAR, 0.3)
    assert design.rank == 1
    direction = design.beams[0] / np.linalg.norm(design.beams[0])
    alignment = abs(np.vdot(direction, channel.user(0))) / np.linalg.norm(channel.user(0))
    assert alignment == pytest.approx(1.0, abs=1e-6)


def test_symmetric_orthogonal_design(cfg, orthogonal):
    """Equal rates on orthogonal equal gain users receive equal power"""
    design = baseline_design(orthogonal, cfg, EhModelKind.SIGMOID, 0.3)
    received = [
        float(np.real(orthogonal.user(k).conj() @ design.x_tilde @ orthogonal.user(k)))
        for k in range(2)
    ]
    assert received[0] == pytest.approx(received[1], rel=1e-6)


def test_linear_design_scales_with_demand(cfg):
    """Doubling the noise doubles every linear demand and so the transmit power"""
    rng = np.random.default_rng(12)
    h = 3.0e-3 * (rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2)))
    quiet = ChannelRealization(h, cfg.noise_w)
    loud = ChannelRealization(h, 2.0 * cfg.noise_w)
    first = baseline_design(quiet, cfg, EhModelKind.LINEAR, 0.3)
    second = baseline_design(loud, cfg.replace(noise_w=2.0 * cfg.noise_w), EhModelKind.LINEAR, 0.3)
    assert np.trace(second.x_tilde).real == pytest.approx(
        2.0 * np.trace(first.x_tilde).real, rel=1e-6
    )


def test_design_validation(cfg, channel):
    """tau_bar lies strictly inside (0, 1)"""
    with pytest.raises(DomainError):
        baseline_design(channel, cfg, EhModelKind.LINEAR, 0.0)


@pytest.mark.parametrize("model", [EhModelKind.LINEAR, EhModelKind.SIGMOID])
def test_true_model_evaluation(cfg, channel, model):
    """The scaled design meets every demand under the exact law"""
    tau_bar = 0.2
    design = baseline_design(channel, cfg, model, tau_bar)
    evaluation = evaluate_under_true_model(design, channel, cfg)
    assert evaluation.kappa >= 1.0
    alloc = evaluation.allocation
    validate_allocation(alloc, channel, cfg, max_slots=None)
    surplus = [evaluation.achieved_rates[k] - cfg.r_req[k] for k in range(2)]
    assert min(surplus) >= -1e-6
    if evaluation.kappa > 1.0:
        # the binding user is exactly at its rate
        assert min(surplus) <= 1e-6
    for k in range(2):
        harvested = sum(
            slot.beta * phi(float(slot.received_powers[k]), cfg.eh) for slot in alloc.slots
        )
        assert harvested >= demand_f(tau_bar, k, cfg, float(channel.eff_noise_w[k])) * (1 - 1e-6)
    assert evaluation.p_dl_actual == pytest.approx(
        evaluation.kappa * tau_bar * np.trace(design.x_tilde).real, rel=1e-6
    )


def test_baseline_allocate(cfg):
    """Baselines are feasible, and the proposed scheme never needs more power"""
    for seed in (31, 32, 33):
        ch = sample_channel(cfg, seed)
        proposed = allocate(ch, cfg, eps_tau=0.1)
        for model in EhModelKind:
            outcome = baseline_allocate(ch, cfg, model, eps_tau=0.1)
            assert outcome.status is FeasibilityStatus.NON_TRIVIAL
            validate_allocation(outcome.allocation, ch, cfg, max_slots=None)
            assert proposed.allocation.p_dl <= outcome.allocation.p_dl * (1.0 + 1e-4)


def test_baseline_trivial_and_infeasible(cfg, channel):
    """Same short cuts as the proposed scheme"""
    outcome = baseline_allocate(channel, cfg.replace(q_init_j=(1.0, 1.0)), EhModelKind.LINEAR)
    assert outcome.status is FeasibilityStatus.TRIVIAL
    assert outcome.allocation.p_dl == 0.0
    outcome = baseline_allocate(channel, cfg.with_sum_rate(120.0), EhModelKind.SIGMOID)
    assert outcome.status is FeasibilityStatus.INFEASIBLE
    assert outcome.allocation is None


@pytest.mark.parametrize(
    "seed, n_antennas, r_sum",
    [(106, 2, 6.0), (122, 4, 6.0), (122, 4, 10.0)],
)
def test_proposed_matches_or_beats_linear(cfg, seed, n_antennas, r_sum):
    """Wherever the linear baseline allocates, the proposed scheme does too with less power"""
    cfg = cfg.replace(n_antennas=n_antennas).with_sum_rate(r_sum)
    ch = sample_channel(cfg, seed)
    linear = baseline_allocate(ch, cfg, EhModelKind.LINEAR)
    proposed = allocate(ch, cfg)
    assert proposed.status is linear.verdict.status
    if linear.allocation is None:
        return
    assert proposed.allocation is not None
    validate_allocation(proposed.allocation, ch, cfg)
    assert proposed.allocation.p_dl <= linear.allocation.p_dl * (1.0 + 1e-4)
