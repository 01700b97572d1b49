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

"""The wpcn config file"""

import pytest

from wpcn.core.exceptions import ConfigError
from wpcn.core.system import SystemConfig
from wpcn.core.wpcn_config import WpcnConfig

CONFIG = """\
n_antennas: 8
distance_m: [10, 15]
noise_dbm: -100
r_req_bits: 2.5
eh.a_s_sq: 1.0e-4
eps_tau: 0.05
sweep.n_antennas: [4, 8, 16]
sweep.schemes: proposed
"""


def _write(tmp_path, text):
    path = tmp_path / "wpcn.yaml"
    path.write_text(text)
    return str(path)


def test_defaults_without_a_file():
    """No file means the reference system"""
    config = WpcnConfig()
    assert config.system_config() == SystemConfig.defaults()
    assert config.get("eps_sca") == 1.0e-4


def test_values_are_converted(tmp_path):
    """Strings become numbers, scalars and lists per key"""
    config = WpcnConfig(_write(tmp_path, CONFIG))
    cfg = config.system_config()
    assert cfg.n_antennas == 8
    assert cfg.distances_m == (10.0, 15.0)
    assert cfg.noise_w == pytest.approx(1.0e-13)
    assert cfg.r_req == (2.5, 2.5)
    assert cfg.eh.a_s_sq == 1.0e-4
    assert config.get("eps_tau") == 0.05
    plan = config.sweep_plan()
    assert plan.n_antennas == (4, 8, 16)
    assert plan.schemes == ("proposed",)
    assert plan.r_sum_bits == (2.0, 6.0, 10.0, 14.0, 18.0, 22.0, 26.0)


def test_sweep_overrides(tmp_path):
    """Command line values win over the file"""
    config = WpcnConfig(_write(tmp_path, CONFIG))
    plan = config.sweep_plan(n_antennas=[4], r_sum_bits=[6.0], schemes=["linear"], seed=9)
    assert plan.n_antennas == (4,)
    assert plan.r_sum_bits == (6.0,)
    assert plan.schemes == ("linear",)
    assert plan.master_seed == 9


def test_empty_file(tmp_path):
    """An empty file is all defaults"""
    assert WpcnConfig(_write(tmp_path, "")).system_config() == SystemConfig.defaults()


@pytest.mark.parametrize(
    "text",
    [
        "antennas: 4\n",
        "n_antennas: four\n",
        "- 1\n- 2\n",
        "n_antennas: 1\n",
        "sweep.schemes: [proposed, magic]\n",
    ],
)
def test_bad_files(tmp_path, text):
    """Unknown keys, malformed values and out of domain values"""
    with pytest.raises(ConfigError):
        config = WpcnConfig(_write(tmp_path, text))
        config.system_config()
        config.sweep_plan()


def test_unknown_getter_key():
    """get() only knows config keys"""
    with pytest.raises(ConfigError):
        WpcnConfig().get("SURROGATE_GRID")
