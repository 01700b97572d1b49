#!/usr/bin/env python

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

"""Will test versions of stuff."""

import sys

import numpy as np
import pandas as pd
import scipy


def _major_minor(version):
    return tuple(int(part) for part in version.split(".")[:2])


def test_python_version():
    """Python 3.9 or higher is required"""
    assert sys.version_info[:2] >= (3, 9)


def test_numeric_stack():
    """The numeric libraries are recent enough for the calls made here"""
    # Generator.dirichlet, SeedSequence spawn keys
    assert _major_minor(np.__version__) >= (1, 17)
    # special.lambertw on arrays, linalg.eigh generalized problems
    assert _major_minor(scipy.__version__) >= (1, 7)
    # DataFrame.to_csv(lineterminator=...)
    assert _major_minor(pd.__version__) >= (1, 5)
