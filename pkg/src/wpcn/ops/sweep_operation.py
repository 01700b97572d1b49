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

"""Logic of operation for Monte-Carlo sweeps."""

# Standard imports
import logging
import os

# Project imports
from wpcn.core.common import Globals
from wpcn.core.experiments import (
    aggregate,
    all_failed,
    run_sweep,
    write_records_csv,
    write_summary_csv,
)

# Local imports
from .operation import Operation


# pylint: disable=too-few-public-methods
class SweepOperation(Operation):
    """
    A class to implement the sweep operation.  Writes records.csv and
    summary.csv into the output directory; returns the records.
    """

    # pylint: disable=too-many-arguments
    def run(
        self,
        out_dir: str = ".",
        schemes=None,
        n_antennas=None,
        r_sum_bits=None,
        seed=None,
        jobs: int = 1,
    ):
        """Main function - see -h for more info"""
        cfg = self.config.system_config()
        plan = self.config.sweep_plan(
            n_antennas=n_antennas, r_sum_bits=r_sum_bits, schemes=schemes, seed=seed
        )
        logging.info(
            "Sweep: N_t=%s, R_sum=%s, schemes=%s, %s realizations, seed %s",
            list(plan.n_antennas),
            list(plan.r_sum_bits),
            list(plan.schemes),
            plan.n_realizations,
            plan.master_seed,
        )
        records = run_sweep(
            plan,
            cfg,
            eps_tau=self.config.get("eps_tau"),
            eps_sca=self.config.get("eps_sca"),
            jobs=jobs,
        )
        summary = aggregate(records)
        if self.printonly:
            print(summary.to_string(index=False))
        else:
            os.makedirs(out_dir, exist_ok=True)
            write_records_csv(records, os.path.join(out_dir, Globals.get("RECORDS_FILE")))
            write_summary_csv(summary, os.path.join(out_dir, Globals.get("SUMMARY_FILE")))
            logging.info("Wrote %s records to %s", len(records), out_dir)
        if all_failed(records):
            logging.error("Every record of the sweep failed")
        return records


# EOF
