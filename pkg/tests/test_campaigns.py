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

"""Seeded acceptance campaigns over many random instances; run with -m slow"""

import math

import numpy as np
import pytest

from wpcn.core import conic
from wpcn.core.allocator import allocate, solve_from_starts, validate_allocation
from wpcn.core.conic import AffineRow, SdpSubproblem, Sense, SolveStatus
from wpcn.core.eh_model import saturation_power
from wpcn.core.exceptions import SolverError
from wpcn.core.experiments import SCHEMES, SweepPlan, paired_differences, records_frame, run_sweep
from wpcn.core.feasibility import FeasibilityStatus, check_feasibility, demand_curve
from wpcn.core.system import SystemConfig, sample_channel

pytestmark = pytest.mark.slow

ANTENNAS = (2, 4, 8)


def _instance(rng, index):
    cfg = SystemConfig.defaults().replace(
        n_antennas=ANTENNAS[index % len(ANTENNAS)],
        r_req=(float(rng.uniform(0.25, 10.0)), float(rng.uniform(0.25, 10.0))),
    )
    if index % 10 == 9:
        cfg = cfg.replace(q_init_j=(float(rng.uniform(0.0, 1e-3)), float(rng.uniform(0.0, 1e-3))))
    return cfg, sample_channel(cfg, 1000 + index)


def test_feasibility_against_brute_force():
    """200 instances against a 1e5 point scan of max_k f_k"""
    rng = np.random.default_rng(2023)
    taus = np.linspace(1.0e-5, 1.0 - 1.0e-5, 100001)
    seen = {status: 0 for status in FeasibilityStatus}
    for index in range(200):
        cfg, ch = _instance(rng, index)
        ceiling = saturation_power(cfg.eh)
        verdict = check_feasibility(cfg, ch)
        seen[verdict.status] += 1
        if verdict.status is FeasibilityStatus.TRIVIAL:
            for k in range(2):
                expected = (2.0 ** cfg.r_req[k] - 1.0) * float(ch.eff_noise_w[k])
                assert verdict.trivial_powers[k] == pytest.approx(expected, rel=1e-12)
                assert expected < cfg.q_init_j[k] / cfg.t_frame_s
            continue
        worst = np.maximum(
            demand_curve(taus, 0, cfg, float(ch.eff_noise_w[0])),
            demand_curve(taus, 1, cfg, float(ch.eff_noise_w[1])),
        )
        if verdict.status is FeasibilityStatus.INFEASIBLE:
            assert np.min(worst) >= ceiling * (1.0 - 1e-6), f"instance {index}"
            continue
        interval = verdict.interval
        feasible = taus[worst <= ceiling]
        narrow = interval.tau_hi - interval.tau_min < 2.0e-5
        assert feasible.size > 0 or narrow, f"instance {index}"
        if feasible.size:
            assert feasible.min() >= interval.tau_min - 1.0e-5, f"instance {index}"
            assert feasible.max() <= interval.tau_hi + 1.0e-5, f"instance {index}"
    assert seen[FeasibilityStatus.NON_TRIVIAL] >= 50
    assert seen[FeasibilityStatus.INFEASIBLE] >= 1


def _random_subproblem(rng, magnitude):
    n_t = int(rng.integers(2, 7))
    users = [
        magnitude * (rng.standard_normal(n_t) + 1j * rng.standard_normal(n_t))
        for _ in range(int(rng.integers(1, 4)))
    ]
    targets = rng.uniform(0.5, 2.0, len(users))

    def build(scale):
        rows = [
            AffineRow({0: scale**2 * np.outer(h, h.conj())}, {}, Sense.GE, float(t), label=f"u{k}")
            for k, (h, t) in enumerate(zip(users, targets))
        ]
        return SdpSubproblem(
            psd_block_dims=[n_t],
            n_scalars=0,
            block_objective=[1.0],
            scalar_objective=np.zeros(0),
            constraints=rows,
            block_scales=[1.0 / (scale * magnitude) ** 2],
        )

    return build


def test_kkt_on_random_subproblems():
    """100 random problems meet the KKT conditions, and scaling the channels scales the optimum"""
    rng = np.random.default_rng(17)
    for index in range(100):
        magnitude = 10.0 ** rng.uniform(-3.0, 2.0)
        build = _random_subproblem(rng, magnitude)
        sol = conic.solve(build(1.0))
        assert sol.status is SolveStatus.OPTIMAL, f"problem {index}"
        report = conic.verify_kkt(build(1.0), sol)
        assert report.worst() <= 1e-6, f"problem {index}"
        assert report.gap <= 1e-6, f"problem {index}"

        scaled = conic.solve(build(10.0))
        assert scaled.status is SolveStatus.OPTIMAL, f"problem {index}"
        assert scaled.objective_value * 100.0 == pytest.approx(sol.objective_value, rel=1e-6)


def test_converged_slots_are_rank_one():
    """200 non-trivial instances over 2, 4 and 8 antennas"""
    rng = np.random.default_rng(5)
    used, clean, worst, reductions = 0, 0, 0.0, 0
    failures = []
    for index in range(200):
        cfg = SystemConfig.defaults().replace(n_antennas=ANTENNAS[index % len(ANTENNAS)])
        cfg = cfg.with_sum_rate(float(rng.choice([2.0, 6.0, 10.0])))
        ch = sample_channel(cfg, 2000 + index)
        verdict = check_feasibility(cfg, ch)
        if verdict.status is not FeasibilityStatus.NON_TRIVIAL:
            continue
        interval = verdict.interval
        tau_bar = interval.tau_min + rng.uniform(0.2, 0.8) * (interval.tau_max - interval.tau_min)
        try:
            alloc = solve_from_starts(tau_bar, ch, cfg)
        except SolverError as err:
            failures.append((index, str(err)))
            continue
        used += 1
        ratios = alloc.diagnostics.rank_ratios
        clean += all(ratio <= 1e-6 for ratio in ratios)
        worst = max(worst, alloc.diagnostics.max_rank_ratio)
        reductions += alloc.diagnostics.rank_reductions
    assert not failures
    assert used >= 150
    assert clean >= 0.99 * used
    assert worst <= 1e-4
    assert reductions == 0


def test_proposed_against_baselines_on_paired_cells():
    """Proposed <= each baseline on 95% of the cells, more antennas help, the bound is exact"""
    cfg = SystemConfig.defaults()
    plan = SweepPlan(
        n_antennas=(4, 8),
        r_sum_bits=(2.0, 6.0, 10.0, 40.0),
        schemes=SCHEMES,
        n_realizations=20,
        master_seed=11,
    )
    records = run_sweep(plan, cfg, jobs=4)
    assert not any(record.status == "solver_error" for record in records)

    for baseline in ("sigmoid", "linear"):
        paired = paired_differences(records, "proposed", baseline)
        assert len(paired) > 0
        wins = paired["difference_w"] <= 1e-4 * paired["p_dl_w_b"]
        assert wins.mean() >= 0.95, baseline

    frame = records_frame(records)
    proposed = frame[(frame["scheme"] == "proposed") & (frame["status"] == "ok")]
    by_antennas = proposed.pivot_table(
        index=["realization_id", "r_sum_bits"], columns="n_antennas", values="p_dl_w"
    ).dropna()
    assert len(by_antennas) > 0
    assert (by_antennas[8] <= by_antennas[4] * (1.0 + 1e-4)).mean() >= 0.9

    by_rate = proposed.pivot_table(
        index=["n_antennas", "realization_id"], columns="r_sum_bits", values="p_dl_w"
    )[[2.0, 6.0, 10.0]].dropna()
    assert len(by_rate) > 0
    means = [by_rate[rate].mean() for rate in (2.0, 6.0, 10.0)]
    assert means == sorted(means)

    for record in records:
        if record.scheme != "proposed" or record.r_sum_bound is None:
            continue
        if abs(record.r_sum_bits - record.r_sum_bound) < 1e-3:
            continue
        beyond = record.r_sum_bits > record.r_sum_bound
        assert (record.status == "infeasible") == beyond, record


def test_seeded_starts_agree():
    """Perturbed SCA starts end within 1% of the unperturbed allocation"""
    cfg = SystemConfig.defaults()
    for seed in (41, 42, 43):
        ch = sample_channel(cfg, seed)
        reference = allocate(ch, cfg, eps_tau=0.1).allocation
        validate_allocation(reference, ch, cfg)
        for init_seed in (1, 2, 3):
            other = allocate(ch, cfg, eps_tau=0.1, init_seed=init_seed).allocation
            assert other.p_dl == pytest.approx(reference.p_dl, rel=1e-2)
            assert math.isclose(other.tau_bar, reference.tau_bar, abs_tol=0.1 + 1e-9)
