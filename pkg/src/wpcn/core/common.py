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

"""Constants and helpers without a better home"""

# pylint: disable=too-few-public-methods

#  Other imports:  critical, error, warning, info, debug
import logging
import sys


class Globals:
    """
    Python code constants.  The physical defaults below are the ones
    a configuration file falls back to when a key is absent.
    """

    _config = {
        # System defaults
        "n_antennas": 4,
        "carrier_hz": 868.0e6,
        "distance_m": 10.0,
        "noise_dbm": -110.0,
        "ricean_k": 1.0,
        # T_f cancels out of every constraint when q_k = 0
        "t_frame_s": 1.0,
        "q_init_j": 0.0,
        "r_req_bits": 1.0,
        # EH circuit
        "eh.mu": 1.85,
        "eh.nu": 2.2e3,
        "eh.lambda": 2.5e-7,
        "eh.a_s_sq": 2.0e-4,
        # Experiment and solver knobs
        "seed": 0,
        "n_realizations": 100,
        "eps_sca": 1.0e-4,
        "eps_tau": 0.1,
        # Sweep defaults
        "sweep.n_antennas": [4, 8],
        "sweep.r_sum_bits": [2.0, 6.0, 10.0, 14.0, 18.0, 22.0, 26.0],
        "sweep.schemes": ["proposed", "sigmoid", "linear"],
        # Points of the grid fit_surrogates uses
        "SURROGATE_GRID": 256,
        # Names of the sweep output files
        "RECORDS_FILE": "records.csv",
        "SUMMARY_FILE": "summary.csv",
    }

    @staticmethod
    def get(name):
        """A generic getter"""
        return Globals._config[name]


class Common:
    """Logging setup and unit conversions shared by the core modules"""

    # logging should only be configured once and only once
    _configured = False

    @staticmethod
    def configure_logging(verbosity):
        """How wpcn is using logging"""
        if Common._configured:
            return
        verbose = {
            0: logging.CRITICAL,
            1: logging.ERROR,
            2: logging.WARNING,
            3: logging.INFO,
            4: logging.DEBUG,
        }
        logging.basicConfig(
            format="%(message)s",
            level=verbose[verbosity],
            stream=sys.stdout,
        )
        Common._configured = True

    @staticmethod
    def dbm_to_watts(dbm: float) -> float:
        """W = 10^((dBm - 30)/10)"""
        return 10.0 ** ((dbm - 30.0) / 10.0)
