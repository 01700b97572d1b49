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

"""Monte-Carlo sweeps over antennas, sum rates and schemes.

Every realization gets its own child seed, split from the master seed
by its index, so a sweep is reproducible whatever the number of worker
processes.  The channel of a realization is drawn once, at the largest
antenna count of the plan, and truncated for smaller arrays; the same
draw is reused for every sum rate and scheme so that all comparisons
are paired.
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .allocator import allocate
from .baselines import EhModelKind, baseline_allocate
from .exceptions import ChannelError, DomainError, WpcnException
from .feasibility import FeasibilityStatus, max_feasible_sum_rate
from .system import ChannelRealization, SystemConfig, sample_channel

SCHEMES = ("proposed", "sigmoid", "linear")
STATUSES = ("ok", "infeasible", "trivial", "solver_error")
FEASIBLE_STATUSES = ("ok", "trivial")
RECORD_COLUMNS = (
    "seed",
    "realization_id",
    "n_antennas",
    "r_sum_bits",
    "scheme",
    "status",
    "tau_bar",
    "p_dl_w",
    "p_u1_w",
    "p_u2_w",
    "n_active_slots",
    "sca_iterations",
    "wall_ms",
    # beyond the core schema
    "r_sum_bound",
    "max_rank_ratio",
    "rank_reductions",
)
OPTIONAL_COLUMNS = ("tau_bar", "p_dl_w", "p_u1_w", "p_u2_w", "r_sum_bound", "max_rank_ratio")
SUMMARY_COLUMNS = (
    "n_antennas",
    "r_sum_bits",
    "scheme",
    "n_records",
    "feasible_fraction",
    "mean_p_dl_w",
    "mean_sca_iterations",
)
CSV_FLOAT_FORMAT = "%.17g"
ABSENT = "NA"


@dataclass(frozen=True)
class ExperimentRecord:
    """The outcome of one scheme on one realization at one operating point"""

    seed: int
    realization_id: int
    n_antennas: int
    r_sum_bits: float
    scheme: str
    status: str
    tau_bar: Optional[float] = None
    p_dl_w: Optional[float] = None
    p_u1_w: Optional[float] = None
    p_u2_w: Optional[float] = None
    n_active_slots: int = 0
    sca_iterations: int = 0
    wall_ms: float = 0.0
    r_sum_bound: Optional[float] = None
    max_rank_ratio: Optional[float] = None
    rank_reductions: int = 0

    def __post_init__(self):
        if self.status not in STATUSES:
            raise DomainError(f"unknown record status ({self.status})")
        if self.status == "ok" and not (self.p_dl_w is not None and self.p_dl_w >= 0.0):
            raise DomainError(f"an ok record needs a non-negative P_DL ({self.p_dl_w})")

    def key(self) -> Tuple:
        """Sort key of the record files"""
        return (
            self.n_antennas,
            self.r_sum_bits,
            SCHEMES.index(self.scheme),
            self.realization_id,
        )


@dataclass(frozen=True)
class SweepPlan:
    """What a sweep runs"""

    n_antennas: Tuple[int, ...]
    r_sum_bits: Tuple[float, ...]
    schemes: Tuple[str, ...]
    n_realizations: int
    master_seed: int

    def __post_init__(self):
        for name in ("n_antennas", "r_sum_bits", "schemes"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
            if not getattr(self, name):
                raise DomainError(f"a sweep plan needs at least one {name} value")
        unknown = [scheme for scheme in self.schemes if scheme not in SCHEMES]
        if unknown:
            raise DomainError(f"unknown schemes {unknown}; choose from {list(SCHEMES)}")
        if self.n_realizations < 1:
            raise DomainError(f"at least one realization is needed ({self.n_realizations})")
        if min(self.n_antennas) < 2:
            raise DomainError(f"every antenna count must be at least 2 ({self.n_antennas})")
        if min(self.r_sum_bits) < 0.0:
            raise DomainError(f"sum rates must be non-negative ({self.r_sum_bits})")


def child_seed(master_seed: int, realization: int) -> np.random.SeedSequence:
    """The seed of one realization, independent of execution order"""
    return np.random.SeedSequence(entropy=master_seed, spawn_key=(realization,))


def run_scheme(
    scheme: str,
    ch: ChannelRealization,
    cfg: SystemConfig,
    eps_tau: Optional[float] = None,
    eps_sca: Optional[float] = None,
):
    """Dispatch to the proposed allocator or a baseline"""
    if scheme == "proposed":
        return allocate(ch, cfg, eps_tau=eps_tau, eps_sca=eps_sca)
    return baseline_allocate(ch, cfg, EhModelKind(scheme), eps_tau=eps_tau)


def _record(common: dict, scheme: str, ch, cfg, eps_tau, eps_sca) -> ExperimentRecord:
    start = time.perf_counter()
    try:
        outcome = run_scheme(scheme, ch, cfg, eps_tau, eps_sca)
    except (WpcnException, np.linalg.LinAlgError) as err:
        logging.warning(
            "realization %s, N_t=%s, R_sum=%s, %s: %s",
            common["realization_id"],
            common["n_antennas"],
            common["r_sum_bits"],
            scheme,
            err,
        )
        return ExperimentRecord(
            **common,
            scheme=scheme,
            status="solver_error",
            wall_ms=1.0e3 * (time.perf_counter() - start),
        )
    wall_ms = 1.0e3 * (time.perf_counter() - start)
    alloc = outcome.allocation
    if alloc is None:
        return ExperimentRecord(**common, scheme=scheme, status="infeasible", wall_ms=wall_ms)
    status = "trivial" if outcome.status is FeasibilityStatus.TRIVIAL else "ok"
    return ExperimentRecord(
        **common,
        scheme=scheme,
        status=status,
        tau_bar=alloc.tau_bar,
        p_dl_w=alloc.p_dl,
        p_u1_w=alloc.p_u[0],
        p_u2_w=alloc.p_u[1],
        n_active_slots=len(alloc.slots),
        sca_iterations=alloc.diagnostics.sca_iterations,
        wall_ms=wall_ms,
        max_rank_ratio=alloc.diagnostics.max_rank_ratio if alloc.diagnostics.rank_ratios else None,
        rank_reductions=alloc.diagnostics.rank_reductions,
    )


def run_realization(
    plan: SweepPlan,
    cfg: SystemConfig,
    realization: int,
    eps_tau: Optional[float] = None,
    eps_sca: Optional[float] = None,
) -> List[ExperimentRecord]:
    """Every (N_t, R_sum, scheme) of the plan on one channel draw"""
    widest = cfg.replace(n_antennas=max(plan.n_antennas))
    try:
        channel = sample_channel(widest, child_seed(plan.master_seed, realization))
    except ChannelError as err:
        logging.warning("realization %s: %s", realization, err)
        channel = None
    records = []
    for n_t in plan.n_antennas:
        sized = cfg.replace(n_antennas=n_t)
        ch = None
        bound = None
        if channel is not None:
            try:
                ch = channel.truncated(n_t)
                bound = max_feasible_sum_rate(sized, ch)
            except WpcnException as err:
                logging.warning("realization %s, N_t=%s: %s", realization, n_t, err)
        for r_sum in plan.r_sum_bits:
            common = {
                "seed": plan.master_seed,
                "realization_id": realization,
                "n_antennas": n_t,
                "r_sum_bits": r_sum,
                "r_sum_bound": bound,
            }
            for scheme in plan.schemes:
                if ch is None:
                    records.append(ExperimentRecord(**common, scheme=scheme, status="solver_error"))
                    continue
                scaled = sized.with_sum_rate(r_sum)
                records.append(_record(common, scheme, ch, scaled, eps_tau, eps_sca))
    return records


def _run_realization_star(args):
    return run_realization(*args)


def run_sweep(
    plan: SweepPlan,
    cfg: SystemConfig,
    eps_tau: Optional[float] = None,
    eps_sca: Optional[float] = None,
    jobs: int = 1,
) -> List[ExperimentRecord]:
    """Run a sweep, fanning realizations out over jobs processes"""
    tasks = [(plan, cfg, r, eps_tau, eps_sca) for r in range(plan.n_realizations)]
    records: List[ExperimentRecord] = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for chunk in pool.map(_run_realization_star, tasks):
                records.extend(chunk)
    else:
        for task in tasks:
            logging.info("realization %d of %d", task[2] + 1, plan.n_realizations)
            records.extend(run_realization(*task))
    return sorted(records, key=ExperimentRecord.key)


def records_frame(records: Sequence[ExperimentRecord]) -> pd.DataFrame:
    """Records as a table with the documented column order"""
    frame = pd.DataFrame([asdict(record) for record in records], columns=list(RECORD_COLUMNS))
    # None becomes NaN
    for column in OPTIONAL_COLUMNS:
        frame[column] = frame[column].astype(float)
    return frame


def aggregate(records: Sequence[ExperimentRecord]) -> pd.DataFrame:
    """
    Per (N_t, R_sum, scheme): record count, feasible fraction and the
    means of P_DL and SCA iterations over feasible records (NaN when none).
    """
    frame = records_frame(records)
    if frame.empty:
        return pd.DataFrame(columns=list(SUMMARY_COLUMNS))
    frame["feasible"] = frame["status"].isin(FEASIBLE_STATUSES)
    frame["p_dl_feasible"] = frame["p_dl_w"].where(frame["feasible"])
    frame["iterations_feasible"] = frame["sca_iterations"].where(frame["feasible"])
    frame["scheme_order"] = frame["scheme"].map(SCHEMES.index)
    summary = (
        frame.groupby(["n_antennas", "r_sum_bits", "scheme_order", "scheme"], sort=True)
        .agg(
            n_records=("status", "size"),
            feasible_fraction=("feasible", "mean"),
            mean_p_dl_w=("p_dl_feasible", "mean"),
            mean_sca_iterations=("iterations_feasible", "mean"),
        )
        .reset_index()
    )
    return summary[list(SUMMARY_COLUMNS)]


def paired_differences(
    records: Sequence[ExperimentRecord], scheme_a: str, scheme_b: str
) -> pd.DataFrame:
    """P_DL(scheme_a) - P_DL(scheme_b) on every cell where both are feasible"""
    frame = records_frame(records)
    frame = frame[frame["status"].isin(FEASIBLE_STATUSES)]
    keys = ["n_antennas", "r_sum_bits", "realization_id"]
    left = frame[frame["scheme"] == scheme_a][keys + ["p_dl_w"]]
    right = frame[frame["scheme"] == scheme_b][keys + ["p_dl_w"]]
    paired = left.merge(right, on=keys, suffixes=("_a", "_b"))
    paired["difference_w"] = paired["p_dl_w_a"] - paired["p_dl_w_b"]
    return paired.sort_values(keys).reset_index(drop=True)


def write_records_csv(records: Sequence[ExperimentRecord], path: str):
    """records.csv"""
    records_frame(records).to_csv(
        path, index=False, float_format=CSV_FLOAT_FORMAT, na_rep=ABSENT, lineterminator="\n"
    )


def write_summary_csv(summary: pd.DataFrame, path: str):
    """summary.csv"""
    summary.to_csv(
        path, index=False, float_format=CSV_FLOAT_FORMAT, na_rep=ABSENT, lineterminator="\n"
    )


def all_failed(records: Sequence[ExperimentRecord]) -> bool:
    """True when every record is a solver error"""
    return bool(records) and all(record.status == "solver_error" for record in records)

