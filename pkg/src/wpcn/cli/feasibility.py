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

"""Command line script to check the feasibility of one channel realization.

Run with '--help' for usage information.
"""

# Standard imports
import argparse

# Project imports
from wpcn.ops.feasibility_operation import FeasibilityOperation

# Local imports
from ._arguments import Arguments


def parse_arguments():
    """Parse arguments from a command line or from the constructor"""

    parser = argparse.ArgumentParser(
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description="""
Decides whether the rate targets of the config can be met on one
channel realization: infeasible, trivial (stored energy suffices) or
non-trivial, in which case the downlink fraction interval is printed.
Also prints the largest feasible sum rate and writes samples of both
users' demand curves f_k(tau_bar) as CSV.
""",
    )

    Arguments.add_config(parser)
    Arguments.add_channel_args(parser)
    parser.add_argument(
        "--samples",
        type=int,
        default=99,
        help="number of demand curve samples (def=99)",
    )
    parser.add_argument(
        "-o",
        "--out",
        default="",
        help="CSV output file for the demand curves (def=stdout)",
    )
    Arguments.add_verbosity(parser)
    Arguments.add_printonly(parser)
    parsed_args = parser.parse_args()

    # Validate required args
    if parsed_args.samples < 1:
        raise ValueError(f"At least one sample is needed ({parsed_args.samples})")
    return parsed_args


def main():
    """Entry point for 'wpcn-feasibility'."""

    # Parse args
    parsed_args = parse_arguments()

    # do it
    feo = FeasibilityOperation(
        config_file=parsed_args.config,
        verbosity=parsed_args.verbosity,
        printonly=parsed_args.printonly,
    )
    feo.run(
        seed=parsed_args.seed,
        channel_file=parsed_args.channel,
        samples=parsed_args.samples,
        out=parsed_args.out,
    )


# If called directly via this file
if __name__ == "__main__":
    main()
