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

"""Lambert-W and Bessel kernels against mpmath"""

import math

import mpmath
import pytest

from wpcn.core.exceptions import DomainError
from wpcn.core.specfun import (
    INV_E,
    LogDomainValue,
    bessel_i0,
    bessel_i1_over_i0,
    lambert_w0,
    lambert_w0_of_exp,
    lambert_w0_shift,
    log_bessel_i0,
)

mpmath.mp.dps = 50


def test_lambert_w0_special_values():
    """W0(0) = 0, W0(-1/e) = -1, W0(e) = 1"""
    assert lambert_w0(0.0) == 0.0
    assert lambert_w0(-INV_E) == -1.0
    assert lambert_w0(math.e) == pytest.approx(1.0, rel=1e-15)


def test_lambert_w0_below_branch_point():
    """Arguments below -1/e are rejected"""
    with pytest.raises(DomainError):
        lambert_w0(-0.5)


@pytest.mark.parametrize("log_arg", [0.5, 5.0, 44.0, 700.0, 1.0e4])
def test_lambert_w0_of_exp(log_arg):
    """W0(e^l) without overflow, even where e^l is not a double"""
    expected = float(mpmath.lambertw(mpmath.exp(log_arg)).real)
    assert lambert_w0_of_exp(log_arg) == pytest.approx(expected, rel=1e-14)
    assert lambert_w0_of_exp(LogDomainValue(log_arg)) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("log_ratio", [1.0e-12, 1.0e-6, 0.5, 3.0, 40.0])
def test_lambert_w0_shift(log_ratio):
    """The offset W0(mu e^mu e^L) - mu keeps its relative precision for tiny L"""
    mu = 1.85
    exact = mpmath.lambertw(mpmath.mpf(mu) * mpmath.exp(mu) * mpmath.exp(log_ratio)).real - mu
    assert lambert_w0_shift(mu, log_ratio) == pytest.approx(float(exact), rel=1e-12)


def test_lambert_w0_shift_domain():
    """mu must be positive and the log ratio non-negative"""
    assert lambert_w0_shift(1.85, 0.0) == 0.0
    with pytest.raises(DomainError):
        lambert_w0_shift(0.0, 1.0)
    with pytest.raises(DomainError):
        lambert_w0_shift(1.85, -1.0e-3)


@pytest.mark.parametrize("t", [1.0e-4, 0.3, 1.5, 2.5, 44.0, 1000.0])
def test_log_bessel_i0(t):
    """log I0 across the series and the asymptotic regimes"""
    expected = float(mpmath.log(mpmath.besseli(0, t)))
    assert log_bessel_i0(t).log_magnitude == pytest.approx(expected, rel=1e-14, abs=1e-300)


def test_bessel_values():
    """I0(0) = 1, the ratio I1/I0 stays in [0, 1)"""
    assert log_bessel_i0(0.0).log_magnitude == 0.0
    assert bessel_i0(0.0) == 1.0
    assert bessel_i0(3.0) == pytest.approx(float(mpmath.besseli(0, 3.0)), rel=1e-14)
    assert bessel_i1_over_i0(0.0) == 0.0
    for t in (1.0e-3, 1.0, 44.0, 1.0e5):
        ratio = bessel_i1_over_i0(t)
        assert 0.0 < ratio < 1.0
    assert bessel_i1_over_i0(2.0) == pytest.approx(
        float(mpmath.besseli(1, 2.0) / mpmath.besseli(0, 2.0)), rel=1e-14
    )
    with pytest.raises(DomainError):
        log_bessel_i0(-1.0)


def test_log_domain_value():
    """Products, scaling and explicit conversion"""
    value = LogDomainValue(2.0).times(LogDomainValue(3.0)).scaled(math.e)
    assert value.log_magnitude == pytest.approx(6.0)
    assert LogDomainValue(1.0).to_float() == pytest.approx(math.e)
    with pytest.raises(OverflowError):
        LogDomainValue(1000.0).to_float()
    with pytest.raises(DomainError):
        LogDomainValue(math.inf)
    with pytest.raises(DomainError):
        LogDomainValue(0.0).scaled(-1.0)
