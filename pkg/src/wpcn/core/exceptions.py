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

"""Exceptions"""


class WpcnException(Exception):
    """Base of everything raised by the wpcn package."""


class DomainError(WpcnException, ValueError):
    """An argument lies outside the mathematical domain of a function."""


class RangeError(WpcnException, ValueError):
    """A demanded output lies above what a model can deliver."""


class ConfigError(WpcnException, KeyError):
    """A configuration or channel file is malformed."""

    def __str__(self):
        # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


class ChannelError(WpcnException):
    """Rank deficient or ill-conditioned channel matrix."""


class BracketingError(WpcnException):
    """A root could not be bracketed where one must exist."""


class InvariantViolation(WpcnException):
    """An allocation or linearization point broke one of its invariants."""


class SolverError(WpcnException):
    """Base class of optimization failures."""


class SubproblemFailure(SolverError):
    """The conic solver returned a status other than optimal."""

    def __init__(self, status, message=""):
        self.status = status
        super().__init__(message or f"conic subproblem returned {status}")


class NoConvergence(SolverError):
    """The SCA loop hit its iteration cap."""


class RankViolation(SolverError):
    """A converged slot covariance is not numerically rank one."""


class AllGridPointsFailed(SolverError):
    """Every tau_bar grid point failed; failures maps tau_bar to the reason."""

    def __init__(self, failures: dict):
        self.failures = failures
        lines = [f"  tau_bar={tau:.6f}: {reason}" for tau, reason in failures.items()]
        super().__init__("all tau_bar grid points failed:\n" + "\n".join(lines))
