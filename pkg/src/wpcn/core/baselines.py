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

"""Baseline schemes designed with the sigmoid or the linear harvesting law.

A baseline designs a single transmit covariance X at each tau_bar with
its surrogate law, splits the downlink equally over the eigen-beams of
X, and is then re-evaluated with the exact law.  Beams that fall short
of the demand are scaled up uniformly until they meet it.
"""

import enum
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import conic
from .allocator import (
    AllocationDiagnostics,
    AllocationOutcome,
    ResourceAllocation,
    Slot,
    grid_search,
    minimum_power_scale,
    trivial_allocation,
    validate_allocation,
)
from .common import Globals
from .conic import AffineRow, SdpSubproblem, Sense, SolveStatus
from .eh_model import fit_surrogates, phi, sigmoid_inverse
from .exceptions import AllGridPointsFailed, DomainError, SubproblemFailure
from .feasibility import FeasibilityStatus, check_feasibility, demand_f
from .system import N_USERS, ChannelRealization, SystemConfig, uplink_rate

# Eigenvalues below this fraction of the trace do not get a beam
RANK_THRESHOLD = 1.0e-8


class EhModelKind(enum.Enum):
    """Surrogate harvesting law of a baseline"""

    LINEAR = "linear"
    SIGMOID = "sigmoid"


@dataclass(frozen=True, eq=False)
class CovarianceDesign:
    """A surrogate design and its equal-time eigen-beams"""

    x_tilde: np.ndarray
    tau_bar: float
    model: EhModelKind
    betas: Tuple[float, ...]
    beams: Tuple[np.ndarray, ...]

    @property
    def rank(self) -> int:
        """The number of eigen-beams"""
        return len(self.beams)


@dataclass(frozen=True)
class TrueModelEvaluation:
    """A design re-evaluated with the exact harvesting law"""

    p_dl_actual: float
    kappa: float
    achieved_rates: Tuple[float, float]
    allocation: ResourceAllocation


def _targets(tau_bar, ch, cfg, model):
    """Received power each user needs under the surrogate law"""
    fit = fit_surrogates(cfg.eh, Globals.get("SURROGATE_GRID"))
    targets = []
    for k in range(N_USERS):
        demand = demand_f(tau_bar, k, cfg, float(ch.eff_noise_w[k]))
        if demand <= 0.0:
            targets.append(0.0)
        elif model is EhModelKind.LINEAR:
            targets.append(demand / fit.linear.eta)
        else:
            targets.append(sigmoid_inverse(demand, fit.sigmoid))
    return targets


def eigen_beams(x_tilde: np.ndarray):
    """(betas, beams) with beta = 1/N~ and w_n = sqrt(N~ lambda_n) u_n"""
    eigvals, eigvecs = np.linalg.eigh(x_tilde)
    trace = float(np.sum(np.maximum(eigvals, 0.0)))
    keep = [i for i in range(eigvals.size) if eigvals[i] > RANK_THRESHOLD * trace]
    count = len(keep)
    if count == 0:
        return (), ()
    keep.reverse()
    betas = tuple(1.0 / count for _ in keep)
    beams = tuple(np.sqrt(count * eigvals[i]) * eigvecs[:, i] for i in keep)
    return betas, beams


def baseline_design(
    ch: ChannelRealization, cfg: SystemConfig, model: EhModelKind, tau_bar: float
) -> CovarianceDesign:
    """minimize tau_bar Tr(X) subject to the surrogate harvest reaching every demand"""
    if not 0.0 < tau_bar < 1.0:
        raise DomainError(f"the downlink fraction must lie in (0, 1) ({tau_bar})")
    targets = _targets(tau_bar, ch, cfg, model)
    n_t = ch.n_antennas
    rows = [
        AffineRow(
            {0: np.outer(ch.user(k), ch.user(k).conj())},
            {},
            Sense.GE,
            target,
            label=f"harvest{k + 1}",
        )
        for k, target in enumerate(targets)
        if target > 0.0
    ]
    if not rows:
        x_tilde = np.zeros((n_t, n_t), dtype=complex)
    else:
        sp = SdpSubproblem(
            psd_block_dims=[n_t],
            n_scalars=0,
            block_objective=[tau_bar],
            scalar_objective=np.zeros(0),
            constraints=rows,
            block_scales=[max(targets) / float(np.mean(ch.gains()))],
        )
        sol = conic.solve(sp)
        if sol.status is not SolveStatus.OPTIMAL:
            raise SubproblemFailure(
                sol.status.value,
                f"{model.value} design at tau_bar={tau_bar:.6f} is {sol.status.value}",
            )
        x_tilde = sol.v_blocks[0]
    betas, beams = eigen_beams(x_tilde)
    return CovarianceDesign(
        x_tilde=x_tilde, tau_bar=tau_bar, model=model, betas=betas, beams=beams
    )


def evaluate_under_true_model(
    design: CovarianceDesign, ch: ChannelRealization, cfg: SystemConfig
) -> TrueModelEvaluation:
    """
    Scale the design's beams by the smallest kappa >= 1 meeting every
    demand under the exact law and give each user the largest uplink
    power its energy allows.  RangeError when saturation makes the
    demand unreachable.
    """
    tau_bar = design.tau_bar
    demands = [demand_f(tau_bar, k, cfg, float(ch.eff_noise_w[k])) for k in range(N_USERS)]
    received = np.array([ch.received_powers(beam) for beam in design.beams]).reshape(-1, N_USERS)
    kappa = minimum_power_scale(received, design.betas, demands, cfg.eh)

    slots = tuple(
        Slot(beta=beta, beam=np.sqrt(kappa) * beam, received_powers=kappa * x)
        for beta, beam, x in zip(design.betas, design.beams, received)
    )
    powers = []
    for k in range(N_USERS):
        harvested = sum(slot.beta * phi(float(slot.received_powers[k]), cfg.eh) for slot in slots)
        stored = cfg.q_init_j[k] + tau_bar * cfg.t_frame_s * harvested
        powers.append(stored / ((1.0 - tau_bar) * cfg.t_frame_s))
    rates = tuple(
        uplink_rate(powers[k], float(ch.eff_noise_w[k]), tau_bar) for k in range(N_USERS)
    )
    p_dl = tau_bar * sum(slot.beta * float(np.vdot(slot.beam, slot.beam).real) for slot in slots)
    alloc = ResourceAllocation(
        tau_bar=tau_bar,
        slots=slots,
        p_u=(powers[0], powers[1]),
        p_dl=p_dl,
        achieved_rates=(rates[0], rates[1]),
        diagnostics=AllocationDiagnostics(power_scale=kappa),
    )
    validate_allocation(alloc, ch, cfg, max_slots=None)
    return TrueModelEvaluation(
        p_dl_actual=p_dl, kappa=kappa, achieved_rates=alloc.achieved_rates, allocation=alloc
    )


def baseline_allocate(
    ch: ChannelRealization,
    cfg: SystemConfig,
    model: EhModelKind,
    eps_tau: Optional[float] = None,
) -> AllocationOutcome:
    """The baseline over the same tau_bar grid as the proposed scheme"""
    eps_tau = Globals.get("eps_tau") if eps_tau is None else eps_tau
    verdict = check_feasibility(cfg, ch)
    if verdict.status is FeasibilityStatus.TRIVIAL:
        return AllocationOutcome(verdict.status, trivial_allocation(ch, cfg), verdict)
    if verdict.status is FeasibilityStatus.INFEASIBLE:
        return AllocationOutcome(verdict.status, None, verdict)

    def solver(tau_bar):
        design = baseline_design(ch, cfg, model, tau_bar)
        return evaluate_under_true_model(design, ch, cfg).allocation

    try:
        best, curve = grid_search(solver, verdict.interval, eps_tau)
    except AllGridPointsFailed as err:
        logging.info("%s baseline infeasible at every grid point", model.value)
        curve = tuple((tau, None) for tau in err.failures)
        return AllocationOutcome(FeasibilityStatus.INFEASIBLE, None, verdict, curve)
    return AllocationOutcome(verdict.status, best, verdict, curve)
