"""Oracle tests for exact power-law masses.

Expected values are frozen from closed forms computed independently of the
implementation (antiderivatives, polar integrals), plus a midpoint-rule
quadrature oracle for origin-free regions.
"""
import math

import numpy as np
import pytest

from mweights.powermass import (
    Ball,
    Interval,
    Rect,
    RectInBall,
    power_mass,
)


def midpoint_1d(a, lo, hi, cells=400_001):
    xs = np.linspace(lo, hi, cells + 1)
    mids = 0.5 * (xs[:-1] + xs[1:])
    return float(np.sum(np.abs(mids) ** a) * (hi - lo) / cells)


def midpoint_2d(a, lo, hi, cells=1201):
    xs = np.linspace(lo[0], hi[0], cells + 1)
    ys = np.linspace(lo[1], hi[1], cells + 1)
    mx = 0.5 * (xs[:-1] + xs[1:])
    my = 0.5 * (ys[:-1] + ys[1:])
    rr = np.hypot(mx[:, None], my[None, :])
    area = (hi[0] - lo[0]) * (hi[1] - lo[1]) / cells**2
    return float(np.sum(rr**a) * area)


def test_interval_frozen_values():
    # int_0^1 x^(eps-1) dx = 1/eps at eps = 1/4
    assert power_mass(-0.75, Interval(0.0, 1.0)) == pytest.approx(4.0, rel=1e-14)
    # int_0^1 x^(1/2) = 2/3
    assert power_mass(0.5, Interval(0.0, 1.0)) == pytest.approx(2.0 / 3.0, rel=1e-14)
    # int_1^4 x^(-1/2) = 2
    assert power_mass(-0.5, Interval(1.0, 4.0)) == pytest.approx(2.0, rel=1e-14)
    # logarithmic exponent
    assert power_mass(-1.0, Interval(1.0, math.e)) == pytest.approx(1.0, rel=1e-14)
    # interval crossing the origin: int_-1^2 |x|^(1/2) = (1 + 2^(3/2)) * 2/3
    want = (1.0 + 2.0**1.5) * 2.0 / 3.0
    assert power_mass(0.5, Interval(-1.0, 2.0)) == pytest.approx(want, rel=1e-14)
    # mirrored negative interval
    assert power_mass(-0.5, Interval(-4.0, -1.0)) == pytest.approx(2.0, rel=1e-14)


def test_interval_small_exponent_stability():
    # s = a+1 = 1e-12: naive b^s - a^s cancels catastrophically
    a = -1.0 + 1e-12
    got = power_mass(a, Interval(1.0, 4.0))
    # int_1^4 x^(s-1) dx = (4^s - 1)/s = log(4) + O(s)
    want = math.expm1(1e-12 * math.log(4.0)) / 1e-12
    assert got == pytest.approx(want, rel=1e-13)


def test_ball_frozen_values():
    assert power_mass(0.0, Ball(1.0, 2)) == pytest.approx(math.pi, rel=1e-14)
    assert power_mass(1.0, Ball(1.0, 2)) == pytest.approx(2.0 * math.pi / 3.0, rel=1e-14)
    assert power_mass(-1.0, Ball(1.0, 2)) == pytest.approx(2.0 * math.pi, rel=1e-14)
    # n=1 ball is the symmetric interval
    assert power_mass(0.5, Ball(1.0, 1)) == pytest.approx(4.0 / 3.0, rel=1e-14)
    assert power_mass(0.0, Ball(2.0, 3)) == pytest.approx(4.0 / 3.0 * math.pi * 8.0, rel=1e-14)


def test_non_integrable_rejected():
    with pytest.raises(ValueError):
        power_mass(-1.0, Interval(0.0, 1.0))
    with pytest.raises(ValueError):
        power_mass(-1.5, Interval(-1.0, 2.0))
    with pytest.raises(ValueError):
        power_mass(-2.0, Ball(1.0, 2))
    with pytest.raises(ValueError):
        power_mass(-2.5, Rect((0.0, 0.0), (1.0, 1.0)))


def test_rect_frozen_values():
    assert power_mass(0.0, Rect((0.0, 0.0), (2.0, 3.0))) == pytest.approx(6.0, rel=1e-12)
    # int_[0,1]^2 (x^2+y^2) = 2/3
    assert power_mass(2.0, Rect((0.0, 0.0), (1.0, 1.0))) == pytest.approx(2.0 / 3.0, rel=1e-12)
    # int_[0,1]^2 1/|x| = 2 log(1+sqrt(2))
    want = 2.0 * math.log(1.0 + math.sqrt(2.0))
    assert power_mass(-1.0, Rect((0.0, 0.0), (1.0, 1.0))) == pytest.approx(want, rel=1e-11)
    # origin interior: [-1,1]^2 is four reflected copies of the unit square
    assert power_mass(-1.0, Rect((-1.0, -1.0), (1.0, 1.0))) == pytest.approx(4.0 * want, rel=1e-11)


def test_rect_scaling_law():
    # mass(s * R) = s^(a+n) mass(R) exactly for power integrands
    for a in (-1.5, -0.5, 0.7, 2.0):
        base = power_mass(a, Rect((0.0, 0.0), (1.0, 2.0)))
        scaled = power_mass(a, Rect((0.0, 0.0), (0.25, 0.5)))
        assert scaled == pytest.approx(base * 0.25 ** (a + 2.0), rel=1e-10)


def test_rect_additivity():
    a = -1.7
    whole = power_mass(a, Rect((0.0, 0.0), (1.0, 1.0)))
    parts = (
        power_mass(a, Rect((0.0, 0.0), (0.5, 0.5)))
        + power_mass(a, Rect((0.5, 0.0), (1.0, 0.5)))
        + power_mass(a, Rect((0.0, 0.5), (0.5, 1.0)))
        + power_mass(a, Rect((0.5, 0.5), (1.0, 1.0)))
    )
    assert parts == pytest.approx(whole, rel=1e-10)


def test_rect_against_midpoint_oracle():
    # origin-free rects, agreement to 1e-8
    cases = [
        (-0.5, (0.5, 0.25), (1.5, 2.0)),
        (1.3, (1.0, 1.0), (2.0, 3.0)),
        (-2.5, (0.25, 0.5), (0.75, 1.25)),
    ]
    for a, lo, hi in cases:
        got = power_mass(a, Rect(lo, hi))
        want = midpoint_2d(a, lo, hi, cells=2401)
        assert got == pytest.approx(want, rel=1e-6)


def test_interval_against_midpoint_oracle():
    got = power_mass(-0.5, Interval(0.25, 1.75))
    want = midpoint_1d(-0.5, 0.25, 1.75)
    assert got == pytest.approx(want, rel=1e-8)


def test_rect_in_ball_frozen_values():
    # quarter disc: int 1/|x| over [0,1]^2 cap B(0,1) = pi/2
    got = power_mass(-1.0, RectInBall((0.0, 0.0), (1.0, 1.0), 1.0))
    assert got == pytest.approx(math.pi / 2.0, rel=1e-11)
    # a=0: area of the quarter disc
    got = power_mass(0.0, RectInBall((0.0, 0.0), (1.0, 1.0), 1.0))
    assert got == pytest.approx(math.pi / 4.0, rel=1e-11)
    # rect fully inside the ball reduces to the plain rect mass
    inside = power_mass(-0.5, RectInBall((0.1, 0.1), (0.3, 0.2), 5.0))
    plain = power_mass(-0.5, Rect((0.1, 0.1), (0.3, 0.2)))
    assert inside == pytest.approx(plain, rel=1e-12)
    # rect fully outside
    assert power_mass(1.0, RectInBall((2.0, 2.0), (3.0, 3.0), 1.0)) == 0.0


def test_rect_in_ball_against_midpoint_oracle():
    a, lo, hi, r = -0.5, (0.25, -0.5), (1.25, 0.75), 1.1
    xs = np.linspace(lo[0], hi[0], 4001 + 1)
    ys = np.linspace(lo[1], hi[1], 4001 + 1)
    mx = 0.5 * (xs[:-1] + xs[1:])
    my = 0.5 * (ys[:-1] + ys[1:])
    rr = np.hypot(mx[:, None], my[None, :])
    area = (hi[0] - lo[0]) * (hi[1] - lo[1]) / 4001**2
    want = float(np.sum(np.where(rr <= r, rr**a, 0.0)) * area)
    got = power_mass(a, RectInBall(lo, hi, r))
    assert got == pytest.approx(want, rel=2e-4)


def test_interval_in_ball_one_dim():
    # n=1: Interval clipped by Ball radius
    got = power_mass(0.5, RectInBall((-2.0,), (0.5,), 1.0))
    want = power_mass(0.5, Interval(-1.0, 0.5))
    assert got == pytest.approx(want, rel=1e-14)
