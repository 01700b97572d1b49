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

"""Logic of operation for allocating one channel realization."""

# Standard imports
import json
import logging

# Project imports
import pandas as pd

from wpcn.core.allocator import AllocationOutcome, allocate
from wpcn.core.baselines import EhModelKind, baseline_allocate
from wpcn.core.experiments import SCHEMES

# Local imports
from .operation import Operation


# pylint: disable=too-few-public-methods
class AllocateOperation(Operation):
    """
    A class to implement the allocate operation: run one scheme on one
    channel, print the allocation and optionally dump the P_DL curve.
    """

    # pylint: disable=too-many-arguments
    def run(
        self,
        scheme: str = "proposed",
        seed=None,
        channel_file: str = "",
        curve: str = "",
        init_seed=None,
        backend: str = "ipm",
        strict_rank: bool = False,
    ) -> AllocationOutcome:
        """Main function - see -h for more info"""
        if scheme not in SCHEMES:
            raise ValueError(f"unknown scheme ({scheme}); choose from {list(SCHEMES)}")
        cfg, the_channel = self.channel(seed, channel_file)
        eps_tau = self.config.get("eps_tau")
        if scheme == "proposed":
            outcome = allocate(
                the_channel,
                cfg,
                eps_tau=eps_tau,
                eps_sca=self.config.get("eps_sca"),
                init_seed=init_seed,
                backend=backend,
                rank_reduction=not strict_rank,
            )
        else:
            outcome = baseline_allocate(the_channel, cfg, EhModelKind(scheme), eps_tau=eps_tau)

        result = {"scheme": scheme, "status": outcome.status.value}
        if outcome.allocation is not None:
            result["allocation"] = outcome.allocation.to_dict()
        print(json.dumps(result, sort_keys=True, indent=4))

        if curve and outcome.curve:
            table = pd.DataFrame(outcome.curve, columns=["tau_bar", "p_dl_w"])
            if self.printonly:
                logging.info("Would write %s rows to %s", len(table), curve)
            else:
                table.to_csv(curve, index=False, float_format="%.17g", na_rep="NA")
                logging.info("Wrote %s", curve)
        return outcome


# EOF
