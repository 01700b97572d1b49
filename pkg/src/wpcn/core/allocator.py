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

"""Downlink power minimization by successive convex approximation.

For a fixed downlink fraction tau_bar the downlink is split into three
slots with time fractions beta_n and beam covariances W_n.  With the
perspective variables V_n = beta_n W_n every constraint is convex
except the energy rows, whose harvested power beta_n phi(h^H W_n h) is
replaced by its tangent at the current point W_n^(t).  The tangent is
a minorant of the convex phi, so every subproblem solution is feasible
for the original problem and the objective never increases.

allocate() wraps this in a grid search over tau_bar; each grid point
starts once from a design that already meets the demands and once from
the matched-filter default.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import conic
from .common import Globals
from .conic import AffineRow, SdpSubproblem, Sense, SolveStatus
from .eh_model import EhCircuitParams, phi, phi_inverse, phi_prime, saturation_power
from .exceptions import (
    AllGridPointsFailed,
    DomainError,
    InvariantViolation,
    NoConvergence,
    RangeError,
    RankViolation,
    SolverError,
    SubproblemFailure,
)
from .feasibility import (
    LN2,
    FeasibilityStatus,
    FeasibilityVerdict,
    TauInterval,
    check_feasibility,
    demand_f,
    trivial_powers,
)
from .system import N_USERS, ChannelRealization, SystemConfig, uplink_rate

N_SLOTS = 3
MAX_SCA_ITERATIONS = 200
BETA_FLOOR = 1.0e-9
ACTIVE_BETA = 1.0e-6
RANK_TOLERANCE = 1.0e-4
INIT_MARGIN = 0.9
START_RETRIES = 3
RETRY_PERTURBATION = 0.5
# Linearization points are kept this far inside (0, A_s^2)
_LOWER_CLAMP = 1.0e-12
_UPPER_CLAMP = 1.0 - 1.0e-9
_SATURATION_SLACK = 1.0e-6
_IDLE_ENERGY = 1.0e-6
_IDLE_HARVEST = 1.0e-6

# Scalar layout of the subproblem
BETA_INDEX = (0, 1, 2)
POWER_INDEX = (3, 4)


@dataclass(frozen=True, eq=False)
class LinearizationPoint:
    """Normalized slot covariances W_n and time fractions beta_n"""

    w_blocks: Tuple[np.ndarray, ...]
    betas: np.ndarray

    def __post_init__(self):
        if len(self.w_blocks) != N_SLOTS or np.size(self.betas) != N_SLOTS:
            raise InvariantViolation(f"a linearization point has {N_SLOTS} slots")
        if np.min(self.betas) < BETA_FLOOR:
            raise InvariantViolation(f"slot fractions below the floor ({self.betas})")

    def received(self, ch: ChannelRealization) -> np.ndarray:
        """h_k^H W_n h_k as an (N_SLOTS, N_USERS) array"""
        return np.array(
            [
                [float(np.real(ch.user(k).conj() @ w_n @ ch.user(k))) for k in range(N_USERS)]
                for w_n in self.w_blocks
            ]
        )


@dataclass(frozen=True, eq=False)
class Slot:
    """One downlink slot: time fraction, beam and per-user received power"""

    beta: float
    beam: np.ndarray
    received_powers: np.ndarray


@dataclass(frozen=True)
class AllocationDiagnostics:
    """How an allocation was obtained"""

    sca_iterations: int = 0
    rank_ratios: Tuple[float, ...] = ()
    objective_history: Tuple[float, ...] = ()
    power_scale: float = 1.0
    # slots whose covariance was replaced by rank_one_beam
    rank_reductions: int = 0
    start: str = ""

    @property
    def max_rank_ratio(self) -> float:
        """The largest lambda_2/lambda_1 over the active slots, 0 without any"""
        return max(self.rank_ratios, default=0.0)


@dataclass(frozen=True, eq=False)
class ResourceAllocation:
    """A complete downlink/uplink resource allocation"""

    tau_bar: float
    slots: Tuple[Slot, ...]
    p_u: Tuple[float, float]
    p_dl: float
    achieved_rates: Tuple[float, float]
    diagnostics: AllocationDiagnostics = field(default_factory=AllocationDiagnostics)

    def beams(self) -> List[Tuple[float, np.ndarray]]:
        """(beta_n, w_n) pairs"""
        return [(slot.beta, slot.beam) for slot in self.slots]

    def to_dict(self) -> Dict:
        """Plain python structure, complex numbers as strings"""
        return {
            "tau_bar": self.tau_bar,
            "p_dl_w": self.p_dl,
            "p_u_w": list(self.p_u),
            "achieved_rates": list(self.achieved_rates),
            "slots": [
                {
                    "beta": slot.beta,
                    "beam": [f"{v.real:.12e}{v.imag:+.12e}j" for v in slot.beam],
                    "received_powers_w": [float(x) for x in slot.received_powers],
                }
                for slot in self.slots
            ],
            "sca_iterations": self.diagnostics.sca_iterations,
            "rank_ratios": list(self.diagnostics.rank_ratios),
            "rank_reductions": self.diagnostics.rank_reductions,
            "start": self.diagnostics.start,
            "power_scale": self.diagnostics.power_scale,
        }


@dataclass(frozen=True)
class AllocationOutcome:
    """Result of a grid search: the verdict, the best allocation and the P_DL curve"""

    status: FeasibilityStatus
    allocation: Optional[ResourceAllocation]
    verdict: FeasibilityVerdict
    curve: Tuple[Tuple[float, Optional[float]], ...] = ()


def rate_targets(tau_bar: float, ch: ChannelRealization, cfg: SystemConfig) -> np.ndarray:
    """rho_k = (2^(R_k/(1 - tau_bar)) - 1) sigma~_k^2"""
    return np.array(
        [
            math.expm1(LN2 * cfg.r_req[k] / (1.0 - tau_bar)) * float(ch.eff_noise_w[k])
            for k in range(N_USERS)
        ]
    )


def _check_tau(tau_bar: float):
    if not 0.0 < tau_bar < 1.0:
        raise DomainError(f"the downlink fraction must lie in (0, 1) ({tau_bar})")


def _tangents(lp: LinearizationPoint, ch: ChannelRealization, eh: EhCircuitParams):
    """Tangent slopes and intercepts phi(x) - phi'(x) x, each (N_SLOTS, N_USERS)"""
    received = lp.received(ch)
    if np.max(received) > eh.a_s_sq * (1.0 + _SATURATION_SLACK):
        raise InvariantViolation(
            f"linearization point drives a harvester into saturation ({np.max(received):.6e} W)"
        )
    points = np.clip(received, _LOWER_CLAMP * eh.a_s_sq, _UPPER_CLAMP * eh.a_s_sq)
    slopes = np.vectorize(lambda x: phi_prime(float(x), eh))(points)
    values = np.vectorize(lambda x: phi(float(x), eh))(points)
    return slopes, values - slopes * points


def linearized_harvest(
    ch: ChannelRealization,
    lp: LinearizationPoint,
    v_blocks: Sequence[np.ndarray],
    betas: Sequence[float],
    eh: EhCircuitParams,
) -> np.ndarray:
    """The tangent minorant of sum_n beta_n phi(h_k^H V_n h_k / beta_n) per user"""
    slopes, intercepts = _tangents(lp, ch, eh)
    total = np.zeros(N_USERS)
    for n, (v_n, beta) in enumerate(zip(v_blocks, betas)):
        for k in range(N_USERS):
            traced = float(np.real(ch.user(k).conj() @ v_n @ ch.user(k)))
            total[k] += slopes[n, k] * traced + beta * intercepts[n, k]
    return total


def build_subproblem(
    tau_bar: float, ch: ChannelRealization, cfg: SystemConfig, lp: LinearizationPoint
) -> SdpSubproblem:
    """The convex subproblem at a linearization point"""
    _check_tau(tau_bar)
    slopes, intercepts = _tangents(lp, ch, cfg.eh)
    rho = rate_targets(tau_bar, ch, cfg)
    ratio = tau_bar / (1.0 - tau_bar)
    gram = [np.outer(ch.user(k), ch.user(k).conj()) for k in range(N_USERS)]

    rows = []
    for k in range(N_USERS):
        rows.append(
            AffineRow({}, {POWER_INDEX[k]: 1.0}, Sense.GE, float(rho[k]), label=f"rate{k + 1}")
        )
    for k in range(N_USERS):
        scalars = {POWER_INDEX[k]: 1.0}
        for n in range(N_SLOTS):
            scalars[BETA_INDEX[n]] = -ratio * intercepts[n, k]
        rows.append(
            AffineRow(
                {n: -ratio * slopes[n, k] * gram[k] for n in range(N_SLOTS)},
                scalars,
                Sense.LE,
                cfg.q_init_j[k] / ((1.0 - tau_bar) * cfg.t_frame_s),
                label=f"energy{k + 1}",
            )
        )
    for k in range(N_USERS):
        for n in range(N_SLOTS):
            rows.append(
                AffineRow(
                    {n: gram[k]},
                    {BETA_INDEX[n]: -cfg.eh.a_s_sq},
                    Sense.LE,
                    0.0,
                    label=f"saturation{k + 1}.{n + 1}",
                )
            )
    rows.append(AffineRow({}, {n: 1.0 for n in BETA_INDEX}, Sense.EQ, 1.0, label="simplex"))

    block_scale = cfg.eh.a_s_sq / float(np.mean(ch.gains()))
    power_scale = max(float(np.max(rho)), float(np.max(ch.eff_noise_w)))
    return SdpSubproblem(
        psd_block_dims=[ch.n_antennas] * N_SLOTS,
        n_scalars=N_SLOTS + N_USERS,
        block_objective=[tau_bar] * N_SLOTS,
        scalar_objective=np.zeros(N_SLOTS + N_USERS),
        constraints=rows,
        block_scales=[block_scale] * N_SLOTS,
        scalar_scales=np.array([1.0] * N_SLOTS + [power_scale] * N_USERS),
    )


def _clamp_to_saturation(w_n: np.ndarray, ch: ChannelRealization, eh: EhCircuitParams):
    peak = float(np.max([np.real(ch.user(k).conj() @ w_n @ ch.user(k)) for k in range(N_USERS)]))
    if peak > eh.a_s_sq:
        return w_n * (eh.a_s_sq / peak)
    return w_n


def _next_point(
    lp: LinearizationPoint, sol: conic.SdpSolution, ch: ChannelRealization, eh: EhCircuitParams
) -> LinearizationPoint:
    betas = sol.scalars[list(BETA_INDEX)]
    blocks = []
    for n, w_prev in enumerate(lp.w_blocks):
        if betas[n] > BETA_FLOOR:
            w_n = sol.v_blocks[n] / betas[n]
            blocks.append(_clamp_to_saturation(0.5 * (w_n + w_n.conj().T), ch, eh))
        else:
            blocks.append(w_prev)
    return LinearizationPoint(tuple(blocks), np.maximum(betas, BETA_FLOOR))


def default_init(
    tau_bar: float,
    ch: ChannelRealization,
    cfg: SystemConfig,
    seed: Optional[int] = None,
    perturbation: float = 0.1,
) -> LinearizationPoint:
    """
    Equal time split over MRT beams toward each user and toward the sum
    direction, each scaled so its strongest user receives 0.9 A_s^2.
    A seed adds a complex Gaussian perturbation to the directions.
    """
    _check_tau(tau_bar)
    units = [ch.user(k) / np.linalg.norm(ch.user(k)) for k in range(N_USERS)]
    both = units[0] + units[1]
    if np.linalg.norm(both) < 1.0e-9:
        both = units[0] + 1j * units[1]
    directions = [units[0], units[1], both]
    if seed is not None:
        rng = np.random.default_rng(seed)
        n_t = ch.n_antennas
        directions = [
            d
            + perturbation
            * (rng.standard_normal(n_t) + 1j * rng.standard_normal(n_t))
            / math.sqrt(2.0 * n_t)
            for d in directions
        ]
    blocks = []
    for direction in directions:
        direction = direction / np.linalg.norm(direction)
        scale = INIT_MARGIN * cfg.eh.a_s_sq / float(np.max(ch.received_powers(direction)))
        blocks.append(scale * np.outer(direction, direction.conj()))
    return LinearizationPoint(tuple(blocks), np.full(N_SLOTS, 1.0 / N_SLOTS))


def feasible_init(
    tau_bar: float, ch: ChannelRealization, cfg: SystemConfig, margin: float = 1.0e-6
) -> LinearizationPoint:
    """
    A linearization point that already meets both demands under the exact
    law: the least-trace covariance X with h_k^H X h_k >= phi^-1(f_k) and
    no harvester beyond A_s^2, repeated over the three slots.  The tangent
    at X is exact there, so the first subproblem is feasible and SCA can
    only improve on it.  RangeError or SubproblemFailure when no such X
    exists.
    """
    _check_tau(tau_bar)
    ceiling = saturation_power(cfg.eh)
    gram = [np.outer(ch.user(k), ch.user(k).conj()) for k in range(N_USERS)]
    rows = []
    for k in range(N_USERS):
        demand = demand_f(tau_bar, k, cfg, float(ch.eff_noise_w[k]))
        if demand > 0.0:
            target = phi_inverse(min(demand * (1.0 + margin), ceiling), cfg.eh)
            rows.append(AffineRow({0: gram[k]}, {}, Sense.GE, target, label=f"harvest{k + 1}"))
        rows.append(
            AffineRow({0: gram[k]}, {}, Sense.LE, cfg.eh.a_s_sq, label=f"saturation{k + 1}")
        )
    sp = SdpSubproblem(
        psd_block_dims=[ch.n_antennas],
        n_scalars=0,
        block_objective=[1.0],
        scalar_objective=np.zeros(0),
        constraints=rows,
        block_scales=[cfg.eh.a_s_sq / float(np.mean(ch.gains()))],
    )
    sol = conic.solve(sp)
    if sol.status is not SolveStatus.OPTIMAL:
        raise SubproblemFailure(
            sol.status.value,
            f"feasible start at tau_bar={tau_bar:.6f} is {sol.status.value}",
        )
    x_block = 0.5 * (sol.v_blocks[0] + sol.v_blocks[0].conj().T)
    x_block = _clamp_to_saturation(x_block, ch, cfg.eh)
    return LinearizationPoint(
        tuple(x_block.copy() for _ in range(N_SLOTS)), np.full(N_SLOTS, 1.0 / N_SLOTS)
    )


def minimum_power_scale(
    received: np.ndarray,
    betas: Sequence[float],
    demands: Sequence[float],
    eh: EhCircuitParams,
    rtol: float = 1.0e-9,
) -> float:
    """
    Smallest kappa >= 1 with sum_n beta_n phi(kappa x_nk) >= demand_k for
    every user; received is (slots, users).  RangeError when the demand
    stays out of reach even with every harvester saturated.
    """
    received = np.asarray(received, dtype=float).reshape(-1, N_USERS)
    betas = np.asarray(betas, dtype=float)

    def enough(kappa):
        for k in range(N_USERS):
            if demands[k] <= 0.0:
                continue
            harvest = sum(b * phi(kappa * x, eh) for b, x in zip(betas, received[:, k]))
            if harvest < demands[k]:
                return False
        return True

    if enough(1.0):
        return 1.0
    positive = received[received > 0.0]
    if positive.size == 0:
        raise RangeError("no beam reaches the users")
    ceiling = max(1.0, eh.a_s_sq / float(np.min(positive)))
    if not enough(ceiling):
        raise RangeError("demand exceeds the harvest of the saturated beams")
    low, high = 1.0, ceiling
    while high - low > rtol * high:
        middle = 0.5 * (low + high)
        if enough(middle):
            high = middle
        else:
            low = middle
    return high


def validate_allocation(
    alloc: ResourceAllocation,
    ch: ChannelRealization,
    cfg: SystemConfig,
    max_slots: Optional[int] = N_SLOTS,
    rtol: float = 1.0e-6,
):
    """Check an allocation against the exact harvesting law; InvariantViolation on failure"""
    if max_slots is not None and len(alloc.slots) > max_slots:
        raise InvariantViolation(f"{len(alloc.slots)} active slots, at most {max_slots} allowed")
    if alloc.slots:
        total = sum(slot.beta for slot in alloc.slots)
        if abs(total - 1.0) > 1.0e-8:
            raise InvariantViolation(f"slot fractions sum to {total!r}")
    tau_bar = alloc.tau_bar
    received = [ch.received_powers(slot.beam) for slot in alloc.slots]
    for k in range(N_USERS):
        rate = uplink_rate(alloc.p_u[k], float(ch.eff_noise_w[k]), tau_bar)
        if rate < cfg.r_req[k] - rtol:
            raise InvariantViolation(f"user {k + 1} reaches {rate:.9f} of {cfg.r_req[k]} b/s/Hz")
        harvested = sum(
            slot.beta * phi(float(x[k]), cfg.eh) for slot, x in zip(alloc.slots, received)
        )
        spent = alloc.p_u[k] * (1.0 - tau_bar) * cfg.t_frame_s
        stored = cfg.q_init_j[k] + tau_bar * cfg.t_frame_s * harvested
        if spent > stored * (1.0 + rtol) + 1.0e-300:
            raise InvariantViolation(
                f"user {k + 1} spends {spent:.9e} J but only has {stored:.9e} J"
            )


def trivial_allocation(ch: ChannelRealization, cfg: SystemConfig) -> ResourceAllocation:
    """No downlink at all; stored energy covers the uplink"""
    powers = trivial_powers(cfg, ch)
    return ResourceAllocation(
        tau_bar=0.0,
        slots=(),
        p_u=powers,
        p_dl=0.0,
        achieved_rates=(
            uplink_rate(powers[0], float(ch.eff_noise_w[0]), 0.0),
            uplink_rate(powers[1], float(ch.eff_noise_w[1]), 0.0),
        ),
    )


def rank_one_beam(w_block: np.ndarray, ch: ChannelRealization) -> np.ndarray:
    """
    The least-norm beam w with |h_k^H w|^2 = h_k^H W h_k for both users.
    Its norm never exceeds Tr(W), so it replaces a covariance that is not
    rank one without losing harvested power.
    """
    targets = np.sqrt(
        np.maximum([np.real(ch.user(k).conj() @ w_block @ ch.user(k)) for k in range(N_USERS)], 0.0)
    )
    inverse_gram = np.linalg.inv(ch.h.conj().T @ ch.h)
    coupling = inverse_gram[0, 1]
    phase = -np.conj(coupling) / abs(coupling) if abs(coupling) > 0.0 else 1.0
    return ch.h @ inverse_gram @ np.array([targets[0], targets[1] * phase])


def _slot_harvest(v_block: np.ndarray, beta: float, ch: ChannelRealization, eh: EhCircuitParams):
    """beta phi(h_k^H V h_k / beta) per user"""
    if beta <= 0.0:
        return np.zeros(N_USERS)
    received = [float(np.real(ch.user(k).conj() @ v_block @ ch.user(k))) for k in range(N_USERS)]
    return np.array([beta * phi(max(x, 0.0) / beta, eh) for x in received])


def idle_slots(sol: conic.SdpSolution, ch: ChannelRealization, eh: EhCircuitParams) -> List[bool]:
    """
    Slots that carry no energy or harvest nothing worth keeping.  A slot
    linearized near zero has a vanishing tangent slope, so the solver
    leaves an isotropic residue of V there.
    """
    betas = sol.scalars[list(BETA_INDEX)]
    energies = [max(float(np.real(np.trace(v))), 0.0) for v in sol.v_blocks]
    total_energy = max(sum(energies), 1.0e-300)
    harvests = [_slot_harvest(v, float(b), ch, eh) for v, b in zip(sol.v_blocks, betas)]
    total_harvest = np.maximum(np.sum(harvests, axis=0), 1.0e-300)
    return [
        energies[n] <= _IDLE_ENERGY * total_energy
        or bool(np.all(harvests[n] <= _IDLE_HARVEST * total_harvest))
        for n in range(N_SLOTS)
    ]


def _extract(
    tau_bar: float,
    ch: ChannelRealization,
    cfg: SystemConfig,
    sol: conic.SdpSolution,
    iterations: int,
    history: List[float],
    rank_reduction: bool = True,
) -> ResourceAllocation:
    """Rank-one beams from the converged blocks, then an exact feasibility polish"""
    betas = sol.scalars[list(BETA_INDEX)]
    kept = []
    ratios = []
    reductions = 0
    for n, idle in enumerate(idle_slots(sol, ch, cfg.eh)):
        if idle:
            if betas[n] >= ACTIVE_BETA:
                kept.append((float(betas[n]), np.zeros(ch.n_antennas, dtype=complex)))
            continue
        w_block = sol.v_blocks[n] / betas[n]
        eigvals, eigvecs = np.linalg.eigh(w_block)
        top = float(eigvals[-1])
        ratio = max(float(eigvals[-2]), 0.0) / top if eigvals.size > 1 else 0.0
        ratios.append(ratio)
        if ratio <= RANK_TOLERANCE:
            kept.append((float(betas[n]), math.sqrt(top) * eigvecs[:, -1]))
        elif rank_reduction:
            # the optimal face is not a single point, e.g. for orthogonal channels
            logging.info(
                "tau_bar=%.6f slot %d has eigenvalue ratio %.3e, reduced to rank one",
                tau_bar,
                n + 1,
                ratio,
            )
            reductions += 1
            kept.append((float(betas[n]), rank_one_beam(w_block, ch)))
        else:
            raise RankViolation(f"slot {n + 1} has eigenvalue ratio {ratio:.3e}")
    if not kept:
        raise InvariantViolation(f"no active slot at tau_bar={tau_bar:.6f}")
    weight = sum(beta for beta, _ in kept)
    kept = [(beta / weight, beam) for beta, beam in kept]

    p_u = rate_targets(tau_bar, ch, cfg)
    demands = [demand_f(tau_bar, k, cfg, float(ch.eff_noise_w[k])) for k in range(N_USERS)]
    received = np.array([ch.received_powers(beam) for _, beam in kept])
    kappa = minimum_power_scale(received, [beta for beta, _ in kept], demands, cfg.eh)
    slots = tuple(
        Slot(beta=beta, beam=math.sqrt(kappa) * beam, received_powers=kappa * x)
        for (beta, beam), x in zip(kept, received)
    )
    p_dl = tau_bar * sum(slot.beta * float(np.vdot(slot.beam, slot.beam).real) for slot in slots)
    alloc = ResourceAllocation(
        tau_bar=tau_bar,
        slots=slots,
        p_u=(float(p_u[0]), float(p_u[1])),
        p_dl=p_dl,
        achieved_rates=(
            uplink_rate(float(p_u[0]), float(ch.eff_noise_w[0]), tau_bar),
            uplink_rate(float(p_u[1]), float(ch.eff_noise_w[1]), tau_bar),
        ),
        diagnostics=AllocationDiagnostics(
            sca_iterations=iterations,
            rank_ratios=tuple(ratios),
            objective_history=tuple(history),
            power_scale=kappa,
            rank_reductions=reductions,
        ),
    )
    validate_allocation(alloc, ch, cfg)
    return alloc


def solve_fixed_tau(
    tau_bar: float,
    ch: ChannelRealization,
    cfg: SystemConfig,
    init: LinearizationPoint,
    eps_sca: Optional[float] = None,
    backend: str = "ipm",
    rank_reduction: bool = True,
) -> ResourceAllocation:
    """
    Run the SCA loop at a fixed downlink fraction.  With rank_reduction
    off, a converged slot that is not numerically rank one raises
    RankViolation instead of being reduced.
    """
    _check_tau(tau_bar)
    eps_sca = Globals.get("eps_sca") if eps_sca is None else eps_sca
    point = init
    history: List[float] = []
    for iteration in range(1, MAX_SCA_ITERATIONS + 1):
        sol = conic.solve(build_subproblem(tau_bar, ch, cfg, point), backend=backend)
        if sol.status is not SolveStatus.OPTIMAL:
            raise SubproblemFailure(
                sol.status.value,
                f"SCA subproblem {iteration} at tau_bar={tau_bar:.6f} is {sol.status.value}",
            )
        history.append(sol.objective_value)
        logging.debug(
            "sca %3d at tau_bar=%.6f: P_DL=%.12e", iteration, tau_bar, sol.objective_value
        )
        point = _next_point(point, sol, ch, cfg.eh)
        if len(history) > 1 and abs(history[-2] - history[-1]) <= eps_sca * max(
            abs(history[-2]), 1.0e-300
        ):
            return _extract(tau_bar, ch, cfg, sol, iteration, history, rank_reduction)
    raise NoConvergence(f"SCA did not settle within {MAX_SCA_ITERATIONS} iterations")


def solve_from_starts(
    tau_bar: float,
    ch: ChannelRealization,
    cfg: SystemConfig,
    init_seed: Optional[int] = None,
    eps_sca: Optional[float] = None,
    backend: str = "ipm",
    rank_reduction: bool = True,
    retries: int = START_RETRIES,
) -> ResourceAllocation:
    """
    SCA from feasible_init and from default_init, keeping the lower
    downlink power.  When both fail, seeded default_init restarts with a
    wider perturbation are tried before giving up with the last error.
    """
    starts = [
        ("feasible", lambda: feasible_init(tau_bar, ch, cfg)),
        ("default", lambda: default_init(tau_bar, ch, cfg, seed=init_seed)),
    ]
    best = None
    last_error: Optional[Exception] = None
    for label, make_init in starts:
        try:
            alloc = solve_fixed_tau(tau_bar, ch, cfg, make_init(), eps_sca, backend, rank_reduction)
        except (SolverError, RangeError, InvariantViolation) as err:
            logging.debug("%s start at tau_bar=%.6f failed: %s", label, tau_bar, err)
            last_error = err
            continue
        if best is None or alloc.p_dl < best.p_dl:
            best = replace(alloc, diagnostics=replace(alloc.diagnostics, start=label))
    if best is not None:
        return best

    rng = np.random.default_rng(init_seed)
    for seed in rng.integers(0, 2**31 - 1, size=retries):
        try:
            init = default_init(tau_bar, ch, cfg, seed=int(seed), perturbation=RETRY_PERTURBATION)
            alloc = solve_fixed_tau(tau_bar, ch, cfg, init, eps_sca, backend, rank_reduction)
        except (SolverError, RangeError, InvariantViolation) as err:
            logging.debug("restart %d at tau_bar=%.6f failed: %s", seed, tau_bar, err)
            last_error = err
            continue
        logging.info("tau_bar=%.6f solved from restart seed %d", tau_bar, seed)
        return replace(alloc, diagnostics=replace(alloc.diagnostics, start=f"restart:{seed}"))
    assert last_error is not None
    raise last_error


def tau_grid(interval: TauInterval, eps_tau: float) -> List[float]:
    """tau_min + i eps_tau below tau_max, then tau_max itself"""
    if eps_tau <= 0.0:
        raise DomainError(f"grid step must be positive ({eps_tau})")
    grid = []
    tau = interval.tau_min
    step = 0
    while tau < interval.tau_max:
        grid.append(tau)
        step += 1
        tau = interval.tau_min + step * eps_tau
    if not grid or interval.tau_max - grid[-1] > 1.0e-12:
        grid.append(interval.tau_max)
    return [t for t in grid if 0.0 < t < 1.0]


def grid_search(solver, interval: TauInterval, eps_tau: float):
    """
    Evaluate solver(tau_bar) over the grid; returns the best allocation
    and the curve.  Raises AllGridPointsFailed when nothing succeeds.
    """
    best = None
    curve = []
    failures = {}
    for tau_bar in tau_grid(interval, eps_tau):
        try:
            alloc = solver(tau_bar)
        except (SolverError, RangeError, InvariantViolation) as err:
            logging.info("tau_bar=%.6f failed: %s", tau_bar, err)
            failures[tau_bar] = f"{type(err).__name__}: {err}"
            curve.append((tau_bar, None))
            continue
        curve.append((tau_bar, alloc.p_dl))
        if best is None or alloc.p_dl < best.p_dl:
            best = alloc
    if best is None:
        raise AllGridPointsFailed(failures)
    return best, tuple(curve)


def allocate(
    ch: ChannelRealization,
    cfg: SystemConfig,
    eps_tau: Optional[float] = None,
    eps_sca: Optional[float] = None,
    init_seed: Optional[int] = None,
    backend: str = "ipm",
    rank_reduction: bool = True,
) -> AllocationOutcome:
    """
    Feasibility check, then the grid search over the downlink fraction.
    With rank_reduction off a slot that is not rank one fails its grid
    point with RankViolation.
    """
    eps_tau = Globals.get("eps_tau") if eps_tau is None else eps_tau
    verdict = check_feasibility(cfg, ch)
    if verdict.status is FeasibilityStatus.TRIVIAL:
        return AllocationOutcome(verdict.status, trivial_allocation(ch, cfg), verdict)
    if verdict.status is FeasibilityStatus.INFEASIBLE:
        return AllocationOutcome(verdict.status, None, verdict)

    def solver(tau_bar):
        return solve_from_starts(
            tau_bar, ch, cfg, init_seed, eps_sca, backend, rank_reduction=rank_reduction
        )

    best, curve = grid_search(solver, verdict.interval, eps_tau)
    logging.info(
        "best tau_bar=%.6f with P_DL=%.6e W (%d grid points, %d rank reductions)",
        best.tau_bar,
        best.p_dl,
        len(curve),
        best.diagnostics.rank_reductions,
    )
    return AllocationOutcome(verdict.status, best, verdict, curve)
