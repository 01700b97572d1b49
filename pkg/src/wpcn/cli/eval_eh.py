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

"""Command line script to tabulate the energy harvesting laws.

Run with '--help' for usage information.
"""

# Standard imports
import argparse

# Project imports
from wpcn.ops.eval_eh_operation import EvalEhOperation

# Local imports
from ._arguments import Arguments


def parse_arguments():
    """Parse arguments from a command line or from the constructor"""

    parser = argparse.ArgumentParser(
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description="""
Evaluates the circuit harvesting law phi, its derivative and the fitted
sigmoid and linear surrogates on a uniform grid over [0, A_s^2] and
writes them as CSV (x_w, phi_w, phi_prime, sigmoid_w, linear_w).
""",
    )

    Arguments.add_config(parser)
    parser.add_argument(
        "-g",
        "--grid",
        type=int,
        default=201,
        help="number of grid points (def=201)",
    )
    parser.add_argument(
        "-o",
        "--out",
        default="",
        help="CSV output file (def=stdout)",
    )
    Arguments.add_verbosity(parser)
    Arguments.add_printonly(parser)
    parsed_args = parser.parse_args()

    # Validate required args
    if parsed_args.grid < 2:
        raise ValueError(f"The grid needs at least two points ({parsed_args.grid})")
    return parsed_args


def main():
    """Entry point for 'wpcn-eval-eh'."""

    # Parse args
    parsed_args = parse_arguments()

    # do it
    eeo = EvalEhOperation(
        config_file=parsed_args.config,
        verbosity=parsed_args.verbosity,
        printonly=parsed_args.printonly,
    )
    eeo.run(grid_size=parsed_args.grid, out=parsed_args.out)


# If called directly via this file
if __name__ == "__main__":
    main()
