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

"""The WpcnConfig class - parses a flat wpcn config yaml file."""

import logging
from typing import Optional

import yaml

from .common import Common, Globals
from .eh_model import EhCircuitParams
from .exceptions import ConfigError, DomainError
from .experiments import SweepPlan
from .system import SystemConfig


def _to_float(value):
    return float(value)


def _to_int(value):
    return int(value)


def _to_pair(value):
    if isinstance(value, list):
        return [float(item) for item in value]
    return float(value)


def _to_ints(value):
    if not isinstance(value, list):
        value = [value]
    return [int(item) for item in value]


def _to_floats(value):
    if not isinstance(value, list):
        value = [value]
    return [float(item) for item in value]


def _to_strings(value):
    if not isinstance(value, list):
        value = [value]
    return [str(item) for item in value]


class WpcnConfig:
    """
    Reads a flat key/value yaml file.  BaseLoader hands every scalar
    over as a string, so each key has an explicit converter.  Keys that
    are not in the file fall back to Globals.
    """

    _config_keys = {
        "n_antennas": _to_int,
        "carrier_hz": _to_float,
        "distance_m": _to_pair,
        "noise_dbm": _to_float,
        "ricean_k": _to_float,
        "t_frame_s": _to_float,
        "q_init_j": _to_pair,
        "r_req_bits": _to_pair,
        "eh.mu": _to_float,
        "eh.nu": _to_float,
        "eh.lambda": _to_float,
        "eh.a_s_sq": _to_float,
        "seed": _to_int,
        "n_realizations": _to_int,
        "eps_sca": _to_float,
        "eps_tau": _to_float,
        "sweep.n_antennas": _to_ints,
        "sweep.r_sum_bits": _to_floats,
        "sweep.schemes": _to_strings,
    }

    @staticmethod
    def check_config_syntax(config, filename):
        """Validate the config file syntax"""
        if not isinstance(config, dict):
            raise ConfigError(f"File ({filename}): the top level must be a mapping")
        bad_keys = [key for key in config if key not in WpcnConfig._config_keys]
        if bad_keys:
            raise ConfigError(
                f"File ({filename}): "
                f"the following config keys are not supported: {bad_keys}"
            )

    @staticmethod
    def read_config_file(filename):
        """Read the config yaml file, check the syntax and convert the values"""
        logging.debug("Reading %s", filename)
        with open(filename, "r", encoding="utf8") as config_file:
            config = yaml.load(config_file, Loader=yaml.BaseLoader)
        if config is None:
            config = {}
        WpcnConfig.check_config_syntax(config, filename)
        converted = {}
        for key, value in config.items():
            try:
                converted[key] = WpcnConfig._config_keys[key](value)
            except (TypeError, ValueError) as err:
                raise ConfigError(
                    f"File ({filename}): key {key} has a malformed value ({value})"
                ) from err
        return converted

    def __init__(self, filename: Optional[str] = None):
        """With no filename every key takes its default"""
        self.filename = filename
        self.config = WpcnConfig.read_config_file(filename) if filename else {}

    def get(self, name):
        """A generic getter - raises ConfigError if name is not a config key"""
        if name not in WpcnConfig._config_keys:
            raise ConfigError(f"Name {name} is not a supported config key")
        if name in self.config:
            return self.config[name]
        return Globals.get(name)

    def system_config(self) -> SystemConfig:
        """The SystemConfig these settings describe"""
        try:
            eh = EhCircuitParams(
                lam=self.get("eh.lambda"),
                mu=self.get("eh.mu"),
                nu=self.get("eh.nu"),
                a_s_sq=self.get("eh.a_s_sq"),
            )
            return SystemConfig(
                n_antennas=self.get("n_antennas"),
                carrier_hz=self.get("carrier_hz"),
                distances_m=self.get("distance_m"),
                noise_w=Common.dbm_to_watts(self.get("noise_dbm")),
                ricean_k=self.get("ricean_k"),
                t_frame_s=self.get("t_frame_s"),
                q_init_j=self.get("q_init_j"),
                r_req=self.get("r_req_bits"),
                eh=eh,
            )
        except DomainError as err:
            raise ConfigError(f"File ({self.filename}): {err}") from err

    def sweep_plan(self, n_antennas=None, r_sum_bits=None, schemes=None, seed=None) -> SweepPlan:
        """The sweep plan, with optional command line overrides"""
        try:
            return SweepPlan(
                n_antennas=n_antennas or self.get("sweep.n_antennas"),
                r_sum_bits=r_sum_bits or self.get("sweep.r_sum_bits"),
                schemes=schemes or self.get("sweep.schemes"),
                n_realizations=self.get("n_realizations"),
                master_seed=self.get("seed") if seed is None else seed,
            )
        except DomainError as err:
            raise ConfigError(f"File ({self.filename}): {err}") from err
