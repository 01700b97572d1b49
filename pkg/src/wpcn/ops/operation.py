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

"""The Operation base class of the wpcn operations."""

# Standard imports
import os
from typing import Tuple

# Project imports
from wpcn.core.common import Common
from wpcn.core.system import ChannelRealization, SystemConfig, load_channel_file, sample_channel
from wpcn.core.wpcn_config import WpcnConfig


# pylint: disable=too-few-public-methods
class Operation:
    """
    Generic operation base class constructor - covers config_file,
    verbosity, and printonly.  Also will configure (global) logging
    and read the configuration file.
    """

    def __init__(
        self,
        config_file: str = "",
        verbosity: int = 3,
        printonly: bool = False,
    ):
        self.config_file = config_file
        self.printonly = printonly
        self.verbosity = verbosity
        # Configure logging
        Common.configure_logging(verbosity)
        # Validate the config_file arg here and now
        if config_file and not os.path.isfile(config_file):
            raise FileNotFoundError(f"The config file ({config_file}) does not exist")
        self.config = WpcnConfig(config_file or None)

    def channel(self, seed=None, channel_file: str = "") -> Tuple[SystemConfig, ChannelRealization]:
        """
        The system config plus a channel: read from channel_file when
        given (the antenna count follows the file), otherwise drawn
        with seed (def=the config seed).
        """
        cfg = self.config.system_config()
        if channel_file:
            the_channel = load_channel_file(channel_file, cfg.noise_w)
            return cfg.replace(n_antennas=the_channel.n_antennas), the_channel
        if seed is None:
            seed = self.config.get("seed")
        return cfg, sample_channel(cfg, seed)
