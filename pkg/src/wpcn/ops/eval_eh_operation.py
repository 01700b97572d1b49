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

"""Logic of operation for evaluating the energy harvesting laws."""

# Standard imports
import logging

# Project imports
import numpy as np
import pandas as pd

from wpcn.core.common import Globals
from wpcn.core.eh_model import fit_surrogates, linear, phi, phi_prime, sigmoid

# Local imports
from .operation import Operation


# pylint: disable=too-few-public-methods
class EvalEhOperation(Operation):
    """
    A class to implement the eval-eh operation: tabulate phi, phi',
    and both surrogate laws over [0, A_s^2].
    """

    def run(self, grid_size: int = 201, out: str = "") -> pd.DataFrame:
        """Main function - see -h for more info"""
        eh = self.config.system_config().eh
        fit = fit_surrogates(eh, Globals.get("SURROGATE_GRID"))
        logging.info(
            "phi(A_s^2)=%.9e W, sigmoid a=%.6e b=%.6e (rms %.3e), linear eta=%.6f (rms %.3e)",
            phi(eh.a_s_sq, eh),
            fit.sigmoid.a,
            fit.sigmoid.b,
            fit.sigmoid_rms,
            fit.linear.eta,
            fit.linear_rms,
        )
        grid = np.linspace(0.0, eh.a_s_sq, grid_size)
        table = pd.DataFrame(
            {
                "x_w": grid,
                "phi_w": [phi(float(x), eh) for x in grid],
                "phi_prime": [
                    phi_prime(float(x), eh) if 0.0 < x < eh.a_s_sq else np.nan for x in grid
                ],
                "sigmoid_w": sigmoid(grid, fit.sigmoid),
                "linear_w": linear(grid, fit.linear),
            }
        )
        if out and not self.printonly:
            table.to_csv(out, index=False, float_format="%.17g", na_rep="NA")
            logging.info("Wrote %s", out)
        else:
            print(table.to_csv(index=False, float_format="%.9e", na_rep="NA"), end="")
        return table


# EOF
