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

"""Small dense semidefinite programs over Hermitian PSD blocks.

An SdpSubproblem is

    minimize    sum_n c_n Tr(V_n) + sum_j d_j s_j
    subject to  sum_n Tr(A_in V_n) + sum_j a_ij s_j  (<=, ==, >=)  b_i
                V_n Hermitian PSD, s_j >= 0

The default backend is a primal-dual interior point method working on
the real symmetric embedding [[Re A, -Im A], [Im A, Re A]] of every
Hermitian block, with the HKM search direction and Mehrotra's
predictor-corrector.  Inequality rows receive a non-negative slack.
Before solving, each variable is divided by its magnitude hint, rows
are equilibrated and the objective is normalized, so that watt-scale
data in the 1e-14..1e-4 range reaches the solver as O(1) numbers.

Dual variables are reported for the original rows in the sign
convention of the Lagrangian L = c.x - y.(Ax - b) - <Y, V> - z.s, so
y_i <= 0 on <= rows and y_i >= 0 on >= rows.
"""

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
from scipy import linalg

from .exceptions import DomainError, SolverError

HERMITIAN_TOLERANCE = 1.0e-12


class Sense(enum.Enum):
    """Direction of an affine row"""

    LE = "<="
    EQ = "=="
    GE = ">="


class SolveStatus(enum.Enum):
    """Solver verdict"""

    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    NUMERICAL_TROUBLE = "numerical_trouble"


@dataclass
class AffineRow:
    """One constraint: Hermitian coefficients per block, reals per scalar"""

    blocks: Dict[int, np.ndarray]
    scalars: Dict[int, float]
    sense: Sense
    rhs: float
    label: str = ""


@dataclass
class SdpSubproblem:
    """
    A conic subproblem.  block_scales and scalar_scales are optional
    magnitude hints for the solution (V_n ~ block_scales[n] in norm).
    """

    psd_block_dims: List[int]
    n_scalars: int
    block_objective: List[float]
    scalar_objective: np.ndarray
    constraints: List[AffineRow]
    block_scales: Optional[List[float]] = None
    scalar_scales: Optional[np.ndarray] = None

    def __post_init__(self):
        self.scalar_objective = np.asarray(self.scalar_objective, dtype=float).reshape(-1)
        if len(self.block_objective) != len(self.psd_block_dims):
            raise DomainError("one objective coefficient per PSD block is required")
        if self.scalar_objective.size != self.n_scalars:
            raise DomainError("one objective coefficient per scalar is required")
        for row in self.constraints:
            for index, coeff in row.blocks.items():
                dim = self.psd_block_dims[index]
                if coeff.shape != (dim, dim):
                    raise DomainError(f"row {row.label}: block {index} must be {dim}x{dim}")
                if np.max(np.abs(coeff - coeff.conj().T), initial=0.0) > HERMITIAN_TOLERANCE * max(
                    1.0, float(np.max(np.abs(coeff), initial=0.0))
                ):
                    raise DomainError(f"row {row.label}: block {index} is not Hermitian")
            for index in row.scalars:
                if not 0 <= index < self.n_scalars:
                    raise DomainError(f"row {row.label}: no scalar {index}")

    @property
    def n_blocks(self) -> int:
        """Number of PSD blocks"""
        return len(self.psd_block_dims)


@dataclass
class SolverResiduals:
    """Relative residuals of the (scaled) problem the solver saw"""

    primal: float
    dual: float
    gap: float


@dataclass
class SdpSolution:
    """Primal and dual solution in the units of the subproblem"""

    status: SolveStatus
    v_blocks: List[np.ndarray]
    scalars: np.ndarray
    objective_value: float
    dual_objective: float
    residuals: SolverResiduals
    iterations: int = 0
    row_duals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    block_duals: List[np.ndarray] = field(default_factory=list)
    scalar_duals: np.ndarray = field(default_factory=lambda: np.zeros(0))


@dataclass
class KktReport:
    """KKT residuals of a solution"""

    stationarity: List[float]
    scalar_stationarity: float
    complementarity: float
    row_complementarity: float
    dual_sign_violation: float
    gap: float

    def worst(self) -> float:
        """The largest residual"""
        return max(
            max(self.stationarity, default=0.0),
            self.scalar_stationarity,
            self.complementarity,
            self.row_complementarity,
            self.dual_sign_violation,
        )


@dataclass
class IpmSettings:
    """Interior point knobs"""

    max_iterations: int = 100
    tolerance: float = 1.0e-10
    gap_tolerance: float = 1.0e-9
    accept_residual: float = 1.0e-8
    accept_gap: float = 1.0e-7
    step_fraction: float = 0.98
    infeasibility_tolerance: float = 1.0e-8


def hermitian_to_real_embedding(a: np.ndarray) -> np.ndarray:
    """[[Re A, -Im A], [Im A, Re A]]"""
    a = np.asarray(a)
    if np.max(np.abs(a - a.conj().T), initial=0.0) > HERMITIAN_TOLERANCE * max(
        1.0, float(np.max(np.abs(a), initial=0.0))
    ):
        raise DomainError("matrix is not Hermitian")
    real, imag = a.real, a.imag
    return np.block([[real, -imag], [imag, real]])


def real_to_hermitian(x: np.ndarray) -> np.ndarray:
    """Inverse of the embedding; averages the redundant copies"""
    half = x.shape[0] // 2
    top, bottom = x[:half, :half], x[half:, half:]
    lower, upper = x[half:, :half], x[:half, half:]
    matrix = 0.5 * (top + bottom) + 0.5j * (lower - upper)
    return 0.5 * (matrix + matrix.conj().T)


# Standard form and scaling


@dataclass
class _StandardForm:
    a_blocks: List[np.ndarray]  # per block, (m, 2d, 2d)
    a_lin: np.ndarray  # (m, n_lin), scalars first then slacks
    b: np.ndarray
    c_blocks: List[np.ndarray]
    c_lin: np.ndarray
    rows: List[int]  # original index of each kept row
    row_scale: np.ndarray
    objective_scale: float
    block_scales: np.ndarray
    scalar_scales: np.ndarray


def _row_sign(row: AffineRow) -> int:
    """+1 if the row's left side is >= 0 on the cone, -1 if <= 0, else 0"""
    signs = set()
    for coeff in row.blocks.values():
        eig = np.linalg.eigvalsh(coeff)
        if eig[0] >= 0.0:
            signs.add(1)
        elif eig[-1] <= 0.0:
            signs.add(-1)
        else:
            return 0
    for coeff in row.scalars.values():
        if coeff > 0.0:
            signs.add(1)
        elif coeff < 0.0:
            signs.add(-1)
    if len(signs) == 1:
        return signs.pop()
    return 0


def _presolve_infeasible(sp: SdpSubproblem) -> Optional[str]:
    """A row whose sense contradicts the sign of its left side on the cone"""
    for row in sp.constraints:
        sign = _row_sign(row)
        nonzero = any(np.any(c != 0) for c in row.blocks.values()) or any(
            c != 0.0 for c in row.scalars.values()
        )
        if not nonzero:
            sign = 2  # both signs at once: the left side is zero
        lhs_nonneg = sign in (1, 2)
        lhs_nonpos = sign in (-1, 2)
        if lhs_nonneg and row.sense in (Sense.LE, Sense.EQ) and row.rhs < 0.0:
            return f"row {row.label or '?'}: non-negative left side cannot reach {row.rhs}"
        if lhs_nonpos and row.sense in (Sense.GE, Sense.EQ) and row.rhs > 0.0:
            return f"row {row.label or '?'}: non-positive left side cannot reach {row.rhs}"
    return None


def _standard_form(sp: SdpSubproblem) -> _StandardForm:
    block_scales = np.asarray(sp.block_scales or [1.0] * sp.n_blocks, dtype=float)
    scalar_scales = (
        np.ones(sp.n_scalars)
        if sp.scalar_scales is None
        else np.asarray(sp.scalar_scales, dtype=float)
    )
    kept, scales = [], []
    for index, row in enumerate(sp.constraints):
        magnitude = 0.0
        for n, coeff in row.blocks.items():
            magnitude = max(magnitude, float(np.linalg.norm(coeff)) * block_scales[n])
        for j, coeff in row.scalars.items():
            magnitude = max(magnitude, abs(coeff) * scalar_scales[j])
        if magnitude == 0.0:
            # consistent empty rows are dropped, presolve caught the rest
            continue
        kept.append(index)
        scales.append(1.0 / magnitude)
    n_rows = len(kept)
    n_slacks = sum(1 for i in kept if sp.constraints[i].sense is not Sense.EQ)
    n_lin = sp.n_scalars + n_slacks

    objective = [abs(c) * s for c, s in zip(sp.block_objective, block_scales)]
    objective += list(np.abs(sp.scalar_objective) * scalar_scales)
    objective_scale = max(objective, default=0.0) or 1.0

    a_blocks = [np.zeros((n_rows, 2 * d, 2 * d)) for d in sp.psd_block_dims]
    a_lin = np.zeros((n_rows, n_lin))
    b = np.zeros(n_rows)
    slack = sp.n_scalars
    for i, index in enumerate(kept):
        row = sp.constraints[index]
        r = scales[i]
        for n, coeff in row.blocks.items():
            a_blocks[n][i] = 0.5 * r * block_scales[n] * hermitian_to_real_embedding(coeff)
        for j, coeff in row.scalars.items():
            a_lin[i, j] = r * coeff * scalar_scales[j]
        if row.sense is Sense.LE:
            a_lin[i, slack] = 1.0
            slack += 1
        elif row.sense is Sense.GE:
            a_lin[i, slack] = -1.0
            slack += 1
        b[i] = r * row.rhs
    c_blocks = [
        0.5 * c * s / objective_scale * np.eye(2 * d)
        for c, s, d in zip(sp.block_objective, block_scales, sp.psd_block_dims)
    ]
    c_lin = np.zeros(n_lin)
    c_lin[: sp.n_scalars] = sp.scalar_objective * scalar_scales / objective_scale
    return _StandardForm(
        a_blocks=a_blocks,
        a_lin=a_lin,
        b=b,
        c_blocks=c_blocks,
        c_lin=c_lin,
        rows=kept,
        row_scale=np.asarray(scales),
        objective_scale=objective_scale,
        block_scales=block_scales,
        scalar_scales=scalar_scales,
    )


# Interior point method


def _sym(matrix):
    return 0.5 * (matrix + matrix.T)


def _apply(sf, blocks, vec):
    total = sf.a_lin @ vec
    for a_j, x_j in zip(sf.a_blocks, blocks):
        total = total + np.einsum("ipq,pq->i", a_j, x_j)
    return total


def _adjoint(sf, y):
    return [np.einsum("i,ipq->pq", y, a_j) for a_j in sf.a_blocks], sf.a_lin.T @ y


def _inner(left, right):
    return sum(float(np.sum(l * r)) for l, r in zip(left, right))


def _max_step(blocks, steps, vec, step_vec) -> float:
    alpha = math.inf
    for x_j, dx_j in zip(blocks, steps):
        try:
            lowest = linalg.eigh(dx_j, x_j, eigvals_only=True)[0]
        except (linalg.LinAlgError, ValueError):
            return 0.0
        if lowest < 0.0:
            alpha = min(alpha, -1.0 / lowest)
    negative = step_vec < 0.0
    if np.any(negative):
        alpha = min(alpha, float(np.min(-vec[negative] / step_vec[negative])))
    return alpha


@dataclass
class _IpmState:
    x: List[np.ndarray]
    x_lin: np.ndarray
    y: np.ndarray
    z: List[np.ndarray]
    z_lin: np.ndarray


def _residuals(sf, state):
    rp = sf.b - _apply(sf, state.x, state.x_lin)
    aty, aty_lin = _adjoint(sf, state.y)
    rd = [c - a - z for c, a, z in zip(sf.c_blocks, aty, state.z)]
    rd_lin = sf.c_lin - aty_lin - state.z_lin
    return rp, rd, rd_lin


def _measures(sf, state, rp, rd, rd_lin):
    pobj = _inner(sf.c_blocks, state.x) + float(sf.c_lin @ state.x_lin)
    dobj = float(sf.b @ state.y)
    c_norm = math.sqrt(_inner(sf.c_blocks, sf.c_blocks) + float(sf.c_lin @ sf.c_lin))
    primal = float(np.linalg.norm(rp)) / (1.0 + float(np.linalg.norm(sf.b)))
    dual = math.sqrt(_inner(rd, rd) + float(rd_lin @ rd_lin)) / (1.0 + c_norm)
    gap = abs(pobj - dobj) / max(1.0, abs(pobj))
    return pobj, dobj, SolverResiduals(primal=primal, dual=dual, gap=gap)


def _initial_state(sf) -> _IpmState:
    dims = [c.shape[0] for c in sf.c_blocks]
    total = sum(dims) + sf.c_lin.size
    row_norms = [
        math.sqrt(
            sum(float(np.sum(a_j[i] ** 2)) for a_j in sf.a_blocks)
            + float(np.sum(sf.a_lin[i] ** 2))
        )
        for i in range(sf.b.size)
    ]
    xi = max(
        [10.0, math.sqrt(total)]
        + [(1.0 + abs(b_i)) / (1.0 + n_i) for b_i, n_i in zip(sf.b, row_norms)]
    )
    c_norm = math.sqrt(_inner(sf.c_blocks, sf.c_blocks) + float(sf.c_lin @ sf.c_lin))
    eta = max([10.0, math.sqrt(total), c_norm] + row_norms)
    return _IpmState(
        x=[xi * np.eye(d) for d in dims],
        x_lin=xi * np.ones(sf.c_lin.size),
        y=np.zeros(sf.b.size),
        z=[eta * np.eye(d) for d in dims],
        z_lin=eta * np.ones(sf.c_lin.size),
    )


def _schur(sf, state, z_inv):
    m = sf.b.size
    schur = np.zeros((m, m))
    for a_j, x_j, zi_j in zip(sf.a_blocks, state.x, z_inv):
        product = x_j @ a_j @ zi_j
        schur += np.einsum("ipq,kpq->ik", a_j, product)
    schur += (sf.a_lin * (state.x_lin / state.z_lin)) @ sf.a_lin.T
    return _sym(schur)


def _solver_for(schur):
    if schur.size == 0:
        return lambda rhs: np.zeros(0)
    try:
        factor = linalg.cho_factor(schur)
        return lambda rhs: linalg.cho_solve(factor, rhs)
    except linalg.LinAlgError:
        logging.debug("Schur complement not positive definite, using least squares")
        return lambda rhs: np.linalg.lstsq(schur, rhs, rcond=None)[0]


def _direction(sf, state, z_inv, rp, rd, rd_lin, solve_schur, target, corrector):
    g_blocks, h_blocks = [], []
    for j, (x_j, zi_j) in enumerate(zip(state.x, z_inv)):
        g_j = target * zi_j - x_j
        if corrector is not None:
            g_j = g_j - corrector[0][j] @ corrector[1][j] @ zi_j
        g_blocks.append(g_j)
        h_blocks.append(g_j - x_j @ rd[j] @ zi_j)
    g_lin = (target - state.x_lin * state.z_lin) / state.z_lin
    if corrector is not None:
        g_lin = g_lin - corrector[2] * corrector[3] / state.z_lin
    h_lin = g_lin - state.x_lin * rd_lin / state.z_lin

    dy = solve_schur(rp - _apply(sf, h_blocks, h_lin))
    aty, aty_lin = _adjoint(sf, dy)
    dz = [r - a for r, a in zip(rd, aty)]
    dz_lin = rd_lin - aty_lin
    dx = [
        _sym(g_j - x_j @ dz_j @ zi_j)
        for g_j, x_j, dz_j, zi_j in zip(g_blocks, state.x, dz, z_inv)
    ]
    dx_lin = g_lin - state.x_lin * dz_lin / state.z_lin
    return dx, dx_lin, dy, dz, dz_lin


def _ipm(sf: _StandardForm, settings: IpmSettings):
    """Returns (status, state, residuals, pobj, dobj, iterations)"""
    state = _initial_state(sf)
    total = sum(c.shape[0] for c in sf.c_blocks) + sf.c_lin.size
    status = None
    stalls = 0
    iteration = 0
    for iteration in range(1, settings.max_iterations + 1):
        rp, rd, rd_lin = _residuals(sf, state)
        pobj, dobj, res = _measures(sf, state, rp, rd, rd_lin)
        mu = (_inner(state.x, state.z) + float(state.x_lin @ state.z_lin)) / total
        logging.debug(
            "ipm %3d: pobj=% .10e dobj=% .10e p=%.2e d=%.2e gap=%.2e mu=%.2e",
            iteration,
            pobj,
            dobj,
            res.primal,
            res.dual,
            res.gap,
            mu,
        )
        if (
            res.primal <= settings.tolerance
            and res.dual <= settings.tolerance
            and res.gap <= settings.gap_tolerance
        ):
            status = SolveStatus.OPTIMAL
            break
        if dobj > 0.0:
            aty, aty_lin = _adjoint(sf, state.y)
            ray = math.sqrt(
                _inner([a + z for a, z in zip(aty, state.z)], [a + z for a, z in zip(aty, state.z)])
                + float(np.sum((aty_lin + state.z_lin) ** 2))
            )
            if ray <= settings.infeasibility_tolerance * dobj:
                status = SolveStatus.INFEASIBLE
                break
        try:
            z_inv = [np.linalg.inv(z_j) for z_j in state.z]
        except np.linalg.LinAlgError:
            break
        solve_schur = _solver_for(_schur(sf, state, z_inv))

        predictor = _direction(sf, state, z_inv, rp, rd, rd_lin, solve_schur, 0.0, None)
        dx, dx_lin, _, dz, dz_lin = predictor
        alpha_p = min(1.0, _max_step(state.x, dx, state.x_lin, dx_lin))
        alpha_d = min(1.0, _max_step(state.z, dz, state.z_lin, dz_lin))
        mu_aff = (
            _inner(
                [x + alpha_p * d for x, d in zip(state.x, dx)],
                [z + alpha_d * d for z, d in zip(state.z, dz)],
            )
            + float((state.x_lin + alpha_p * dx_lin) @ (state.z_lin + alpha_d * dz_lin))
        ) / total
        sigma = min(1.0, max(0.0, (mu_aff / mu) ** 3)) if mu > 0.0 else 0.0

        dx, dx_lin, dy, dz, dz_lin = _direction(
            sf,
            state,
            z_inv,
            rp,
            rd,
            rd_lin,
            solve_schur,
            sigma * mu,
            (predictor[0], predictor[3], predictor[1], predictor[4]),
        )
        alpha_p = min(1.0, settings.step_fraction * _max_step(state.x, dx, state.x_lin, dx_lin))
        alpha_d = min(1.0, settings.step_fraction * _max_step(state.z, dz, state.z_lin, dz_lin))
        state.x = [_sym(x + alpha_p * d) for x, d in zip(state.x, dx)]
        state.x_lin = state.x_lin + alpha_p * dx_lin
        state.y = state.y + alpha_d * dy
        state.z = [_sym(z + alpha_d * d) for z, d in zip(state.z, dz)]
        state.z_lin = state.z_lin + alpha_d * dz_lin
        if max(alpha_p, alpha_d) < 1.0e-10:
            stalls += 1
            if stalls >= 3:
                logging.debug("ipm stalled at iteration %d", iteration)
                break
        else:
            stalls = 0

    rp, rd, rd_lin = _residuals(sf, state)
    pobj, dobj, res = _measures(sf, state, rp, rd, rd_lin)
    if status is None:
        accepted = (
            res.primal <= settings.accept_residual
            and res.dual <= settings.accept_residual
            and res.gap <= settings.accept_gap
        )
        status = SolveStatus.OPTIMAL if accepted else SolveStatus.NUMERICAL_TROUBLE
    return status, state, res, pobj, dobj, iteration


def _failed(sp: SdpSubproblem, status: SolveStatus, residuals, iterations=0) -> SdpSolution:
    return SdpSolution(
        status=status,
        v_blocks=[np.zeros((d, d), dtype=complex) for d in sp.psd_block_dims],
        scalars=np.zeros(sp.n_scalars),
        objective_value=math.nan,
        dual_objective=math.nan,
        residuals=residuals,
        iterations=iterations,
        row_duals=np.zeros(len(sp.constraints)),
        block_duals=[np.zeros((d, d), dtype=complex) for d in sp.psd_block_dims],
        scalar_duals=np.zeros(sp.n_scalars),
    )


def _solve_unconstrained(sp: SdpSubproblem) -> SdpSolution:
    """Only the cone constraints: zero is optimal unless the objective is unbounded"""
    if min(sp.block_objective, default=0.0) < 0.0 or np.any(sp.scalar_objective < 0.0):
        return _failed(sp, SolveStatus.NUMERICAL_TROUBLE, SolverResiduals(0.0, math.inf, math.nan))
    return SdpSolution(
        status=SolveStatus.OPTIMAL,
        v_blocks=[np.zeros((d, d), dtype=complex) for d in sp.psd_block_dims],
        scalars=np.zeros(sp.n_scalars),
        objective_value=0.0,
        dual_objective=0.0,
        residuals=SolverResiduals(0.0, 0.0, 0.0),
        row_duals=np.zeros(len(sp.constraints)),
        block_duals=[
            c * np.eye(d, dtype=complex) for c, d in zip(sp.block_objective, sp.psd_block_dims)
        ],
        scalar_duals=np.array(sp.scalar_objective, dtype=float),
    )


def _solve_ipm(sp: SdpSubproblem, settings: IpmSettings) -> SdpSolution:
    reason = _presolve_infeasible(sp)
    if reason:
        logging.debug("presolve: %s", reason)
        return _failed(sp, SolveStatus.INFEASIBLE, SolverResiduals(math.inf, math.nan, math.nan))
    sf = _standard_form(sp)
    if sf.b.size == 0:
        return _solve_unconstrained(sp)
    status, state, res, pobj, dobj, iterations = _ipm(sf, settings)
    if status is not SolveStatus.OPTIMAL:
        logging.debug("ipm finished with %s after %d iterations", status.value, iterations)
        return _failed(sp, status, res, iterations)

    omega = sf.objective_scale
    v_blocks = [s * real_to_hermitian(x) for s, x in zip(sf.block_scales, state.x)]
    scalars = sf.scalar_scales * state.x_lin[: sp.n_scalars]
    row_duals = np.zeros(len(sp.constraints))
    row_duals[sf.rows] = omega * sf.row_scale * state.y
    block_duals = [omega / s * 2.0 * real_to_hermitian(z) for s, z in zip(sf.block_scales, state.z)]
    scalar_duals = omega / sf.scalar_scales * state.z_lin[: sp.n_scalars]
    return SdpSolution(
        status=status,
        v_blocks=v_blocks,
        scalars=scalars,
        objective_value=omega * pobj,
        dual_objective=omega * dobj,
        residuals=res,
        iterations=iterations,
        row_duals=row_duals,
        block_duals=block_duals,
        scalar_duals=scalar_duals,
    )


def _solve_cvxpy(sp: SdpSubproblem) -> SdpSolution:
    # pylint: disable=import-outside-toplevel
    try:
        import cvxpy as cp
    except ImportError as err:
        raise SolverError("the cvxpy backend needs the optional cvxpy package") from err

    blocks = [cp.Variable((d, d), hermitian=True) for d in sp.psd_block_dims]
    scalars = cp.Variable(sp.n_scalars, nonneg=True) if sp.n_scalars else None
    constraints = [block >> 0 for block in blocks]
    # equalities are split into two inequalities so every dual is a plain multiplier
    pairs = []
    for row in sp.constraints:
        terms = [cp.real(cp.trace(coeff @ blocks[n])) for n, coeff in row.blocks.items()]
        terms += [coeff * scalars[j] for j, coeff in row.scalars.items()]
        lhs = cp.sum(cp.hstack(terms)) if terms else cp.Constant(0.0)
        upper = lhs <= row.rhs if row.sense in (Sense.LE, Sense.EQ) else None
        lower = lhs >= row.rhs if row.sense in (Sense.GE, Sense.EQ) else None
        constraints += [c for c in (upper, lower) if c is not None]
        pairs.append((upper, lower))
    objective = sum(
        c * cp.real(cp.trace(block)) for c, block in zip(sp.block_objective, blocks)
    )
    if scalars is not None:
        objective = objective + sp.scalar_objective @ scalars
    problem = cp.Problem(cp.Minimize(objective), constraints)
    problem.solve()
    if problem.status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
        return _failed(sp, SolveStatus.INFEASIBLE, SolverResiduals(math.inf, math.nan, math.nan))
    if problem.status != cp.OPTIMAL:
        residuals = SolverResiduals(math.nan, math.nan, math.nan)
        return _failed(sp, SolveStatus.NUMERICAL_TROUBLE, residuals)

    row_duals = np.array(
        [
            (float(lower.dual_value) if lower is not None else 0.0)
            - (float(upper.dual_value) if upper is not None else 0.0)
            for upper, lower in pairs
        ]
    )
    v_blocks = [np.asarray(block.value) for block in blocks]
    values = np.asarray(scalars.value) if scalars is not None else np.zeros(0)
    block_duals, scalar_duals = _dual_slacks(sp, row_duals)
    dual_objective = float(row_duals @ np.array([row.rhs for row in sp.constraints]))
    primal = float(problem.value)
    return SdpSolution(
        status=SolveStatus.OPTIMAL,
        v_blocks=v_blocks,
        scalars=values,
        objective_value=primal,
        dual_objective=dual_objective,
        residuals=SolverResiduals(
            primal=_primal_violation(sp, v_blocks, values),
            dual=0.0,
            gap=abs(primal - dual_objective) / max(1.0, abs(primal)),
        ),
        row_duals=row_duals,
        block_duals=block_duals,
        scalar_duals=scalar_duals,
    )


def solve(
    sp: SdpSubproblem, backend: str = "ipm", settings: Optional[IpmSettings] = None
) -> SdpSolution:
    """Solve a subproblem with the built-in interior point method or cvxpy"""
    if backend == "ipm":
        return _solve_ipm(sp, settings or IpmSettings())
    if backend == "cvxpy":
        return _solve_cvxpy(sp)
    raise DomainError(f"unknown conic backend ({backend})")


# Certificates


def _row_value(row: AffineRow, v_blocks, scalars) -> float:
    value = sum(float(np.real(np.trace(c @ v_blocks[n]))) for n, c in row.blocks.items())
    return value + sum(c * float(scalars[j]) for j, c in row.scalars.items())


def _primal_violation(sp: SdpSubproblem, v_blocks, scalars) -> float:
    worst = 0.0
    for row in sp.constraints:
        excess = _row_value(row, v_blocks, scalars) - row.rhs
        scale = 1.0 + abs(row.rhs)
        if row.sense is Sense.LE:
            worst = max(worst, excess / scale)
        elif row.sense is Sense.GE:
            worst = max(worst, -excess / scale)
        else:
            worst = max(worst, abs(excess) / scale)
    return worst


def _dual_slacks(sp: SdpSubproblem, row_duals):
    """Y_n = c_n I - sum_i y_i A_in and z = d - sum_i y_i a_i"""
    block_duals = [
        c * np.eye(d, dtype=complex) for c, d in zip(sp.block_objective, sp.psd_block_dims)
    ]
    scalar_duals = np.array(sp.scalar_objective, dtype=float)
    for y_i, row in zip(row_duals, sp.constraints):
        for n, coeff in row.blocks.items():
            block_duals[n] = block_duals[n] - y_i * coeff
        for j, coeff in row.scalars.items():
            scalar_duals[j] -= y_i * coeff
    return block_duals, scalar_duals


def verify_kkt(sp: SdpSubproblem, sol: SdpSolution) -> KktReport:
    """Stationarity, complementary slackness and dual signs of a solution"""
    expected, expected_scalars = _dual_slacks(sp, sol.row_duals)
    stationarity = [
        float(np.linalg.norm(e - y)) / (1.0 + abs(c) * math.sqrt(d))
        for e, y, c, d in zip(expected, sol.block_duals, sp.block_objective, sp.psd_block_dims)
    ]
    scalar_stationarity = float(
        np.max(np.abs(expected_scalars - sol.scalar_duals), initial=0.0)
    ) / (1.0 + float(np.max(np.abs(sp.scalar_objective), initial=0.0)))

    scale = max(1.0, abs(sol.objective_value))
    complementarity = max(
        [abs(float(np.real(np.trace(y @ v)))) for y, v in zip(sol.block_duals, sol.v_blocks)]
        + [abs(float(z * s)) for z, s in zip(sol.scalar_duals, sol.scalars)],
        default=0.0,
    ) / scale
    row_complementarity = max(
        [
            abs(float(y_i) * (_row_value(row, sol.v_blocks, sol.scalars) - row.rhs))
            for y_i, row in zip(sol.row_duals, sp.constraints)
            if row.sense is not Sense.EQ
        ],
        default=0.0,
    ) / scale

    violation = 0.0
    for y_i, row in zip(sol.row_duals, sp.constraints):
        if row.sense is Sense.LE:
            violation = max(violation, float(y_i))
        elif row.sense is Sense.GE:
            violation = max(violation, -float(y_i))
    for y_n in sol.block_duals:
        lowest = float(np.linalg.eigvalsh(y_n)[0]) if y_n.size else 0.0
        violation = max(violation, -lowest / (1.0 + float(np.linalg.norm(y_n))))
    violation = max(violation, -float(np.min(sol.scalar_duals, initial=0.0)))

    gap = abs(sol.objective_value - sol.dual_objective) / max(1.0, abs(sol.objective_value))
    return KktReport(
        stationarity=stationarity,
        scalar_stationarity=scalar_stationarity,
        complementarity=complementarity,
        row_complementarity=row_complementarity,
        dual_sign_violation=violation,
        gap=gap,
    )


def dump_subproblem(sp: SdpSubproblem, path: str):
    """
    Write a subproblem as plain text:

        blocks <dims...>
        scalars <n>
        objective <c_1 .. c_N> | <d_1 .. d_n>
        row <label> <sense> <rhs>
        block <n>
        <d lines of space separated re+imj entries>
        scalar <j> <coefficient>
        end

    with one row/end section per constraint, in order.
    """
    with open(path, "w", encoding="utf8") as outfile:
        outfile.write("blocks " + " ".join(str(d) for d in sp.psd_block_dims) + "\n")
        outfile.write(f"scalars {sp.n_scalars}\n")
        outfile.write(
            "objective "
            + " ".join(repr(float(c)) for c in sp.block_objective)
            + " | "
            + " ".join(repr(float(c)) for c in sp.scalar_objective)
            + "\n"
        )
        for row in sp.constraints:
            outfile.write(f"row {row.label or '-'} {row.sense.value} {row.rhs!r}\n")
            for n, coeff in sorted(row.blocks.items()):
                outfile.write(f"block {n}\n")
                for line in coeff:
                    outfile.write(
                        " ".join(
                            f"{v.real!r}{v.imag:+.17g}j" for v in np.asarray(line, dtype=complex)
                        )
                        + "\n"
                    )
            for j, coeff in sorted(row.scalars.items()):
                outfile.write(f"scalar {j} {float(coeff)!r}\n")
            outfile.write("end\n")
