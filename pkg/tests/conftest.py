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

"""Shared fixtures"""

import numpy as np
import pytest

from wpcn.core.system import ChannelRealization, SystemConfig, sample_channel

# Per antenna power gain of the orthogonal test channel
ORTHOGONAL_GAIN = 3.0e-5


@pytest.fixture(name="cfg")
def fixture_cfg():
    """The reference system"""
    return SystemConfig.defaults()


@pytest.fixture(name="channel")
def fixture_channel(cfg):
    """A reproducible Ricean draw for the reference system"""
    return sample_channel(cfg, 7)


@pytest.fixture(name="orthogonal")
def fixture_orthogonal(cfg):
    """Equal gain users on orthogonal antennas"""
    h = np.zeros((cfg.n_antennas, 2), dtype=complex)
    h[0, 0] = np.sqrt(ORTHOGONAL_GAIN)
    h[1, 1] = np.sqrt(ORTHOGONAL_GAIN)
    return ChannelRealization(h, cfg.noise_w)
