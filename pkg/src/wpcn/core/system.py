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

"""System model: configuration, channels, ZF uplink, rate and energy bookkeeping.

Two single-antenna users are served by an N_t antenna base station.
The channel of user k is the column h_k of H = [h_1 h_2], the downlink
received power of a beam w is |h_k^H w|^2 and the uplink is equalized
with the zero-forcing rows F = (H^H H)^-1 H^H.
"""

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence, Tuple, Union

import numpy as np
import yaml
from scipy import constants

from .common import Common, Globals
from .eh_model import EhCircuitParams, phi
from .exceptions import ChannelError, ConfigError, DomainError

N_USERS = 2
# H is rejected when its condition number exceeds this
MAX_CONDITION = 1.0e8
MAX_RESAMPLES = 100

Beams = Sequence[Tuple[float, np.ndarray]]


def _pair(value, name) -> Tuple[float, float]:
    """Broadcast a scalar or a two-element sequence to a per-user pair"""
    if np.isscalar(value):
        return (float(value), float(value))
    pair = tuple(float(item) for item in value)
    if len(pair) != N_USERS:
        raise DomainError(f"{name} needs one value per user ({value})")
    return pair


@dataclass(frozen=True)
class SystemConfig:
    """Immutable system parameters.  Per-user fields are (user 1, user 2)."""

    n_antennas: int
    carrier_hz: float
    distances_m: Tuple[float, float]
    noise_w: float
    ricean_k: float
    t_frame_s: float
    q_init_j: Tuple[float, float]
    r_req: Tuple[float, float]
    eh: EhCircuitParams

    def __post_init__(self):
        for name in ("distances_m", "q_init_j", "r_req"):
            object.__setattr__(self, name, _pair(getattr(self, name), name))
        if self.n_antennas < N_USERS:
            raise DomainError(
                f"zero forcing needs at least {N_USERS} antennas ({self.n_antennas})"
            )
        for name in ("carrier_hz", "noise_w", "t_frame_s"):
            if not getattr(self, name) > 0.0:
                raise DomainError(f"{name} must be positive ({getattr(self, name)})")
        if min(self.distances_m) <= 0.0:
            raise DomainError(f"distances must be positive ({self.distances_m})")
        if self.ricean_k < 0.0:
            raise DomainError(f"the Ricean factor must be non-negative ({self.ricean_k})")
        if min(self.q_init_j) < 0.0 or min(self.r_req) < 0.0:
            raise DomainError("initial energies and rate targets must be non-negative")

    @staticmethod
    def defaults(**overrides) -> "SystemConfig":
        """The reference system, optionally with some fields replaced"""
        values = {
            "n_antennas": Globals.get("n_antennas"),
            "carrier_hz": Globals.get("carrier_hz"),
            "distances_m": Globals.get("distance_m"),
            "noise_w": Common.dbm_to_watts(Globals.get("noise_dbm")),
            "ricean_k": Globals.get("ricean_k"),
            "t_frame_s": Globals.get("t_frame_s"),
            "q_init_j": Globals.get("q_init_j"),
            "r_req": Globals.get("r_req_bits"),
            "eh": EhCircuitParams.defaults(),
        }
        values.update(overrides)
        return SystemConfig(**values)

    def replace(self, **changes) -> "SystemConfig":
        """A copy with some fields replaced"""
        return dataclasses.replace(self, **changes)

    def with_sum_rate(self, r_sum: float) -> "SystemConfig":
        """Split a sum rate equally between the users"""
        return self.replace(r_req=(0.5 * r_sum, 0.5 * r_sum))


def zf_process(h: np.ndarray, noise_w: float):
    """
    Return (F, eff_noise) for H = h (N_t x 2): the zero-forcing rows
    F = (H^H H)^-1 H^H and the per-user noise ||f_k||^2 * sigma^2.
    """
    h = np.asarray(h, dtype=complex)
    cond = np.linalg.cond(h)
    if not math.isfinite(cond) or cond > MAX_CONDITION:
        raise ChannelError(f"channel matrix is ill-conditioned (cond={cond:.3e})")
    gram = h.conj().T @ h
    rows = np.linalg.solve(gram, h.conj().T)
    eff_noise = np.sum(np.abs(rows) ** 2, axis=1) * noise_w
    return rows, eff_noise


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """One channel draw with its derived ZF quantities"""

    h: np.ndarray
    noise_w: float
    zf_rows: np.ndarray = field(init=False, repr=False)
    eff_noise_w: np.ndarray = field(init=False)

    def __post_init__(self):
        h = np.array(self.h, dtype=complex)
        if h.ndim != 2 or h.shape[1] != N_USERS or h.shape[0] < N_USERS:
            raise ChannelError(f"channel matrix must be N_t x {N_USERS} ({h.shape})")
        h.setflags(write=False)
        rows, eff_noise = zf_process(h, self.noise_w)
        rows.setflags(write=False)
        eff_noise.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "zf_rows", rows)
        object.__setattr__(self, "eff_noise_w", eff_noise)

    @property
    def n_antennas(self) -> int:
        """N_t"""
        return self.h.shape[0]

    def user(self, k: int) -> np.ndarray:
        """h_k"""
        return self.h[:, k]

    def gains(self) -> np.ndarray:
        """||h_k||^2 per user"""
        return np.sum(np.abs(self.h) ** 2, axis=0)

    def received_powers(self, beam: np.ndarray) -> np.ndarray:
        """|h_k^H w|^2 per user"""
        return np.abs(self.h.conj().T @ beam) ** 2

    def truncated(self, n_antennas: int) -> "ChannelRealization":
        """The same draw seen by the first n_antennas antennas"""
        return ChannelRealization(self.h[:n_antennas, :], self.noise_w)


@dataclass(frozen=True, eq=False)
class EnergyState:
    """Per-user average harvested power and available energy"""

    harvested_avg_w: np.ndarray
    available_j: np.ndarray


def path_loss(cfg: SystemConfig, user: int) -> float:
    """Free space power gain (c/(4 pi d f_c))^2"""
    if user not in range(N_USERS):
        raise DomainError(f"no such user ({user})")
    return (constants.c / (4.0 * math.pi * cfg.distances_m[user] * cfg.carrier_hz)) ** 2


def steering_vector(n_antennas: int, angle: float) -> np.ndarray:
    """Half wavelength ULA response, unit modulus entries"""
    return np.exp(1j * math.pi * np.arange(n_antennas) * math.sin(angle))


def _ricean_weights(ricean_k: float):
    if math.isinf(ricean_k):
        return 1.0, 0.0
    return math.sqrt(ricean_k / (ricean_k + 1.0)), math.sqrt(1.0 / (ricean_k + 1.0))


def sample_channel(
    cfg: SystemConfig, seed: Union[int, np.random.Generator, np.random.SeedSequence]
) -> ChannelRealization:
    """Draw a Ricean channel, resampling rank deficient draws"""
    rng = np.random.default_rng(seed)
    los, nlos = _ricean_weights(cfg.ricean_k)
    n_t = cfg.n_antennas
    for attempt in range(MAX_RESAMPLES):
        columns = []
        for k in range(N_USERS):
            angle = rng.uniform(-0.5 * math.pi, 0.5 * math.pi)
            scatter = (rng.standard_normal(n_t) + 1j * rng.standard_normal(n_t)) / math.sqrt(
                2.0
            )
            columns.append(
                math.sqrt(path_loss(cfg, k)) * (los * steering_vector(n_t, angle) + nlos * scatter)
            )
        try:
            return ChannelRealization(np.column_stack(columns), cfg.noise_w)
        except ChannelError as err:
            logging.debug("channel draw %s rejected: %s", attempt, err)
    raise ChannelError(f"no well-conditioned channel after {MAX_RESAMPLES} draws")


def load_channel_file(path: str, noise_w: float) -> ChannelRealization:
    """Read a channel file with keys h1 and h2 (lists of complex literals)"""
    with open(path, "r", encoding="utf8") as file:
        data = yaml.load(file, Loader=yaml.BaseLoader)
    if not isinstance(data, dict) or sorted(data) != ["h1", "h2"]:
        raise ConfigError(f"channel file {path} must define exactly h1 and h2")
    try:
        columns = [[complex(item.replace(" ", "")) for item in data[key]] for key in ("h1", "h2")]
    except (TypeError, ValueError, AttributeError) as err:
        raise ConfigError(f"channel file {path} holds a malformed entry: {err}") from err
    if len(columns[0]) != len(columns[1]):
        raise ConfigError(f"h1 and h2 in {path} differ in length")
    return ChannelRealization(np.column_stack(columns), noise_w)


def uplink_rate(p_u: float, eff_noise: float, tau_bar: float) -> float:
    """(1 - tau_bar) * log2(1 + p_u/sigma~^2) in bits/s/Hz"""
    if p_u < 0.0 or not 0.0 <= tau_bar < 1.0:
        raise DomainError(f"uplink_rate needs p_u >= 0 and 0 <= tau_bar < 1 ({p_u}, {tau_bar})")
    return (1.0 - tau_bar) * math.log2(1.0 + p_u / eff_noise)


def harvested_power(
    ch: ChannelRealization, beams: Beams, tau_bar: float, eh: EhCircuitParams
) -> np.ndarray:
    """Average harvested power p^d_k = tau_bar * sum_n beta_n phi(|h_k^H w_n|^2)"""
    total = np.zeros(N_USERS)
    for beta, beam in beams:
        if beta < 0.0:
            raise DomainError(f"slot fractions must be non-negative ({beta})")
        received = ch.received_powers(beam)
        total += beta * np.array([phi(float(x), eh) for x in received])
    return tau_bar * total


def energy_state(
    ch: ChannelRealization, beams: Beams, tau_bar: float, cfg: SystemConfig
) -> EnergyState:
    """Harvested power and the energy E_k = q_k + p^d_k T_f available to each user"""
    harvested = harvested_power(ch, beams, tau_bar, cfg.eh)
    return EnergyState(
        harvested_avg_w=harvested,
        available_j=np.asarray(cfg.q_init_j) + harvested * cfg.t_frame_s,
    )
