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

"""Switches shared by the wpcn command line scripts."""


class Arguments:

    """Switches shared by the wpcn scripts.  A default is a parameter
    only where two scripts want different values.
    """

    # Options unique to one command are located in that file.

    @staticmethod
    def add_config(parser):
        """Add config option"""
        parser.add_argument(
            "-c",
            "--config",
            default="",
            help="a wpcn config yaml file (def=built-in defaults)",
        )

    @staticmethod
    def add_channel_args(parser):
        """Add the seed and channel options that select one channel realization"""
        parser.add_argument(
            "-s",
            "--seed",
            type=int,
            help="seed of the channel draw (def=the config seed)",
        )
        parser.add_argument(
            "--channel",
            default="",
            help="a yaml channel file with h1 and h2 (overrides --seed)",
        )

    @staticmethod
    def add_printonly(parser):
        """Add printonly option"""
        parser.add_argument(
            "-n",
            "--printonly",
            action="store_true",
            help="will printonly and not write to disk (def=False)",
        )

    @staticmethod
    def add_verbosity(parser, verbosity=3):
        """Add verbosity option"""
        parser.add_argument(
            "-v",
            "--verbosity",
            type=int,
            default=verbosity,
            help=f"0 critical, 1 error, 2 warning, 3 info, 4 debug (def={verbosity})",
        )

    @staticmethod
    def split_list(value, convert, name):
        """Split a comma separated switch value, raising ValueError on junk"""
        if not value:
            return None
        try:
            return [convert(item) for item in value.split(",")]
        except ValueError as err:
            raise ValueError(
                f"The {name} parameter takes a comma separated list ({value})"
            ) from err
