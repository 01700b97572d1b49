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

"""Logic of operation for the feasibility check."""

# Standard imports
import logging

# Project imports
import numpy as np
import pandas as pd

from wpcn.core.feasibility import (
    FeasibilityStatus,
    FeasibilityVerdict,
    check_feasibility,
    demand_curve,
    max_feasible_sum_rate,
)

# Local imports
from .operation import Operation


# pylint: disable=too-few-public-methods
class FeasibilityOperation(Operation):
    """
    A class to implement the feasibility operation: the verdict, the
    tau_bar interval and samples of both demand curves.
    """

    def run(
        self,
        seed=None,
        channel_file: str = "",
        samples: int = 99,
        out: str = "",
    ) -> FeasibilityVerdict:
        """Main function - see -h for more info"""
        cfg, the_channel = self.channel(seed, channel_file)
        verdict = check_feasibility(cfg, the_channel)
        logging.info("Verdict: %s", verdict.status.value)
        if verdict.status is FeasibilityStatus.NON_TRIVIAL:
            interval = verdict.interval
            logging.info(
                "tau_bar in [%.9f, %.9f] (per user minima %s, stationary points %s)",
                interval.tau_min,
                interval.tau_max,
                [f"{tau:.9f}" for tau in interval.tau_min_k],
                [f"{tau:.9f}" for tau in interval.tau_max_k],
            )
        elif verdict.status is FeasibilityStatus.TRIVIAL:
            logging.info("Uplink powers without power transfer: %s W", verdict.trivial_powers)
        logging.info(
            "Largest feasible sum rate: %.6f b/s/Hz", max_feasible_sum_rate(cfg, the_channel)
        )

        taus = np.linspace(0.0, 1.0, samples + 2)[1:-1]
        table = pd.DataFrame({"tau_bar": taus})
        for k in range(2):
            table[f"f{k + 1}_w"] = demand_curve(taus, k, cfg, float(the_channel.eff_noise_w[k]))
        if out and not self.printonly:
            table.to_csv(out, index=False, float_format="%.17g", na_rep="NA")
            logging.info("Wrote %s", out)
        else:
            print(table.to_csv(index=False, float_format="%.9e", na_rep="NA"), end="")
        return verdict


# EOF
