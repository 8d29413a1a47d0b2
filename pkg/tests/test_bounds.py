#!/usr/bin/env python
# -*- coding: utf-8 -*-

import numpy as np
import pytest
from scipy import optimize

from analysis.bounds import GenieCoupling, genie_bound, multicast_rank1_bound
from errors import CapabilityError
from precoders.fixed_phase import TargetSpec, cipm
from signals.constellation import SymbolFrame
from signals.units import db_to_linear
from tests.conftest import random_channels

ZETA = float(db_to_linear(4.7712))


def test_single_user_bounds():
    h = np.array([[0.2 - 1.0j, 0.7, 0.1j]])
    expected = ZETA / np.linalg.norm(h) ** 2
    assert genie_bound(h, ZETA)[0] == pytest.approx(expected, rel=1e-12)
    assert multicast_rank1_bound(h, ZETA)[0] == pytest.approx(expected, rel=1e-12)


def test_orthogonal_genie():
    H = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 3.0]])
    power, p = genie_bound(H, [2.0, 9.0], noise_power=0.5)
    assert power == pytest.approx(0.5 * (2.0 + 1.0))
    assert np.allclose(p, [1.0, 0.5])


def test_genie_matches_linprog():
    for H in random_channels(50, n_users=3, n_antennas=4, seed=19):
        power, p = genie_bound(H, ZETA)
        A = GenieCoupling.from_channel(H).constraint_matrix()
        result = optimize.linprog(np.ones(3), A_ub=-A, b_ub=-ZETA * np.ones(3), bounds=[(0, None)] * 3,
                                  method="highs")
        assert result.status == 0
        assert power == pytest.approx(result.fun, rel=1e-7)
        slack = A @ p - ZETA
        assert np.all(slack >= -1e-9)
        assert np.min(np.abs(slack)) <= 1e-9 * ZETA


def test_genie_below_single_user_sum():
    for H in random_channels(50, seed=29):
        total = np.sum(ZETA / np.linalg.norm(H, axis=1) ** 2)
        assert genie_bound(H, ZETA)[0] <= total * (1 + 1e-12)


def test_genie_below_strict_power_on_average(qpsk):
    generator = np.random.default_rng(14)
    genie, strict = [], []
    for H in random_channels(300, seed=37):
        frame = SymbolFrame.from_indices(generator.integers(0, 4, size=2), qpsk)
        genie.append(genie_bound(H, ZETA)[0])
        strict.append(cipm(H, frame, TargetSpec.strict(ZETA)).power)
    assert np.mean(genie) <= np.mean(strict)


def _check_multicast_below_strict(count, seed, qpsk, tol=1e-6):
    generator = np.random.default_rng(seed)
    for H in random_channels(count, seed=seed + 32):
        frame = SymbolFrame.from_indices(generator.integers(0, 4, size=2), qpsk)
        bound, direction = multicast_rank1_bound(H, ZETA)
        assert np.linalg.norm(direction) == pytest.approx(1.0)
        assert bound <= cipm(H, frame, TargetSpec.strict(ZETA)).power * (1 + tol)
        assert np.all(ZETA / np.abs(H @ direction) ** 2 <= bound * (1 + 1e-9))


def test_multicast_below_strict_power(qpsk):
    _check_multicast_below_strict(40, 15, qpsk)


@pytest.mark.slow
def test_multicast_below_strict_power_many_trials(qpsk):
    _check_multicast_below_strict(1000, 115, qpsk, tol=1e-4)


def test_multicast_identical_users():
    h = np.array([0.5, 1.0j, -0.25])
    H = np.vstack([h, h])
    assert multicast_rank1_bound(H, ZETA)[0] == pytest.approx(ZETA / np.linalg.norm(h) ** 2, rel=1e-6)


def test_multicast_grid_refinement_converges():
    H = random_channels(1, seed=53)[0]
    fine = multicast_rank1_bound(H, ZETA, resolution=128)[0]
    coarse = multicast_rank1_bound(H, ZETA, resolution=32)[0]
    assert coarse == pytest.approx(fine, rel=1e-3)


def test_capability_limits():
    with pytest.raises(CapabilityError):
        multicast_rank1_bound(random_channels(1, n_users=4, n_antennas=4)[0], ZETA)
    with pytest.raises(CapabilityError):
        genie_bound(random_channels(1, n_users=11, n_antennas=12)[0], ZETA)
