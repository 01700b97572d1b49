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

"""Command line script to allocate resources on one channel realization.

Run with '--help' for usage information.
"""

# Standard imports
import argparse

# Project imports
from wpcn.ops.allocate_operation import AllocateOperation

# Local imports
from ._arguments import Arguments


def parse_arguments():
    """Parse arguments from a command line or from the constructor"""

    parser = argparse.ArgumentParser(
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description="""
Computes the minimum downlink power allocation of one channel
realization with the proposed scheme or one of the surrogate-model
baselines and prints it as JSON: the downlink fraction, the slots
(time fraction, beam, received powers), the uplink powers and the
achieved rates.  The per tau_bar downlink power curve of the grid
search can be written as CSV.
""",
    )

    Arguments.add_config(parser)
    Arguments.add_channel_args(parser)
    parser.add_argument(
        "--scheme",
        default="proposed",
        choices=["proposed", "sigmoid", "linear"],
        help="allocation scheme (def=proposed)",
    )
    parser.add_argument(
        "--curve",
        default="",
        help="CSV file for the P_DL(tau_bar) curve",
    )
    parser.add_argument(
        "--init_seed",
        type=int,
        help="perturb the SCA starting point with this seed",
    )
    parser.add_argument(
        "--backend",
        default="ipm",
        choices=["ipm", "cvxpy"],
        help="conic solver (def=ipm)",
    )
    parser.add_argument(
        "--strict_rank",
        action="store_true",
        help="fail a grid point whose slot is not rank one instead of reducing it",
    )
    Arguments.add_verbosity(parser)
    Arguments.add_printonly(parser)
    return parser.parse_args()


def main():
    """Entry point for 'wpcn-allocate'."""

    # Parse args
    parsed_args = parse_arguments()

    # do it
    alo = AllocateOperation(
        config_file=parsed_args.config,
        verbosity=parsed_args.verbosity,
        printonly=parsed_args.printonly,
    )
    alo.run(
        scheme=parsed_args.scheme,
        seed=parsed_args.seed,
        channel_file=parsed_args.channel,
        curve=parsed_args.curve,
        init_seed=parsed_args.init_seed,
        backend=parsed_args.backend,
        strict_rank=parsed_args.strict_rank,
    )


# If called directly via this file
if __name__ == "__main__":
    main()
