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

"""Command line script to run a Monte-Carlo sweep.

Run with '--help' for usage information.
"""

# Standard imports
import argparse
import sys

# Project imports
from wpcn.core.experiments import all_failed
from wpcn.ops.sweep_operation import SweepOperation

# Local imports
from ._arguments import Arguments


def parse_arguments():
    """Parse arguments from a command line or from the constructor"""

    parser = argparse.ArgumentParser(
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description="""
Runs every scheme on seeded channel realizations for each antenna
count and sum rate (split equally between the users) and writes one
record per run to records.csv and the per cell averages to
summary.csv.  Realizations are paired across schemes, sum rates and
antenna counts.  The exit code is non-zero only when every record
failed.

records.csv columns: seed, realization_id, n_antennas, r_sum_bits,
scheme, status, tau_bar, p_dl_w, p_u1_w, p_u2_w, n_active_slots,
sca_iterations and wall_ms, followed by

  r_sum_bound      largest equally split sum rate that is feasible for
                   the realization at that antenna count
  max_rank_ratio   largest lambda_2/lambda_1 over the active slots of
                   the proposed scheme (NA for the baselines)
  rank_reductions  slots whose covariance was not rank one and was
                   replaced by the least-norm beam with the same
                   received powers
""",
    )

    Arguments.add_config(parser)
    parser.add_argument(
        "-o",
        "--out",
        default=".",
        help="output directory (def='.')",
    )
    parser.add_argument(
        "--schemes",
        default="",
        help="comma separated schemes (def=the config's sweep.schemes)",
    )
    parser.add_argument(
        "--nt",
        default="",
        help="comma separated antenna counts (def=the config's sweep.n_antennas)",
    )
    parser.add_argument(
        "--rsum",
        default="",
        help="comma separated sum rates in b/s/Hz (def=the config's sweep.r_sum_bits)",
    )
    parser.add_argument(
        "-s",
        "--seed",
        type=int,
        help="master seed (def=the config seed)",
    )
    parser.add_argument(
        "-j",
        "--jobs",
        type=int,
        default=1,
        help="worker processes (def=1)",
    )
    Arguments.add_verbosity(parser)
    Arguments.add_printonly(parser)
    parsed_args = parser.parse_args()

    # Validate required args
    if parsed_args.jobs < 1:
        raise ValueError(f"The jobs parameter must be at least 1 ({parsed_args.jobs})")
    parsed_args.schemes = Arguments.split_list(parsed_args.schemes, str, "schemes")
    parsed_args.nt = Arguments.split_list(parsed_args.nt, int, "nt")
    parsed_args.rsum = Arguments.split_list(parsed_args.rsum, float, "rsum")
    return parsed_args


def main():
    """Entry point for 'wpcn-sweep'."""

    # Parse args
    parsed_args = parse_arguments()

    # do it
    swo = SweepOperation(
        config_file=parsed_args.config,
        verbosity=parsed_args.verbosity,
        printonly=parsed_args.printonly,
    )
    records = swo.run(
        out_dir=parsed_args.out,
        schemes=parsed_args.schemes,
        n_antennas=parsed_args.nt,
        r_sum_bits=parsed_args.rsum,
        seed=parsed_args.seed,
        jobs=parsed_args.jobs,
    )
    if all_failed(records):
        sys.exit(1)


# If called directly via this file
if __name__ == "__main__":
    main()
