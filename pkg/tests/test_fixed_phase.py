#!/usr/bin/env python
# -*- coding: utf-8 -*-

from dataclasses import replace

import numpy as np
import pytest

from errors import ParameterError, RankDeficiencyError
from precoders.fixed_phase import (
    FixedPhaseSolver, TargetSpec, cipm, lagrangian_residual, solve_fixed_phase,
)
from signals.constellation import Constellation, SymbolFrame
from signals.units import db_to_linear
from tests.conftest import random_channels

ZETA = float(db_to_linear(4.7712))


def test_single_user_closed_form(qpsk):
    h = np.array([[0.3 + 1.1j, -0.7j, 0.2]])
    frame = SymbolFrame.from_indices([2], qpsk)
    solution = cipm(h, frame, TargetSpec.strict(ZETA))
    norm2 = np.linalg.norm(h) ** 2
    assert solution.power == pytest.approx(ZETA / norm2, rel=1e-10)
    expected = np.sqrt(ZETA) * frame.symbols[0] * h[0].conj() / norm2
    assert np.allclose(solution.x, expected, atol=1e-12)


def test_orthogonal_channels_decouple(qpsk):
    H = np.array([[1.0, 0.0, 0.0], [0.0, 2.0j, 0.0]])
    frame = SymbolFrame.from_indices([0, 3], qpsk)
    spec = TargetSpec.strict([2.0, 5.0], noise_power=0.5)
    solution = cipm(H, frame, spec)
    assert solution.power == pytest.approx(0.5 * (2.0 / 1.0 + 5.0 / 4.0), rel=1e-10)
    assert solution.active_set == (0, 1)


def _grid_oracle(H, frame, spec, offsets, step=1e-3, reach=8.0):
    """Least power over an amplitude grid, with the least-norm solve done by pseudo-inverse."""
    thresholds = spec.thresholds(2)
    directions = np.exp(1j * (frame.angles + offsets))
    pinv = np.linalg.pinv(H)
    G = pinv.conj().T @ pinv
    Q = np.real(np.diag(directions).conj() @ G @ np.diag(directions))
    a1 = np.arange(thresholds[0], reach * thresholds[0] + step, step)
    a2 = np.arange(thresholds[1], reach * thresholds[1] + step, step)
    best = np.inf
    for value in a1:
        powers = Q[0, 0] * value ** 2 + 2 * Q[0, 1] * value * a2 + Q[1, 1] * a2 ** 2
        best = min(best, float(np.min(powers)))
    return best


def _check_against_oracle(H, index, qpsk):
    frame = SymbolFrame.from_indices([index % 4, (3 * index + 1) % 4], qpsk)
    spec = TargetSpec.equal_margin(ZETA, np.pi / 5)
    offsets = np.array([0.1, -0.3]) if index % 2 else np.zeros(2)
    solution = solve_fixed_phase(H, frame, spec, offsets)
    reach = max(8.0, 1.5 * float(np.max(solution.amplitudes / spec.thresholds(2))))
    assert solution.power == pytest.approx(_grid_oracle(H, frame, spec, offsets, reach=reach), rel=1e-4)


@pytest.mark.parametrize("index", range(20))
def test_amplitude_grid_oracle(index, qpsk):
    _check_against_oracle(random_channels(20, seed=31)[index], index, qpsk)


@pytest.mark.slow
@pytest.mark.parametrize("index", range(200))
def test_amplitude_grid_oracle_many_instances(index, qpsk):
    _check_against_oracle(random_channels(200, seed=131)[index], index, qpsk)


def test_strict_solution_invariants(qpsk):
    spec = TargetSpec.strict(ZETA)
    generator = np.random.default_rng(8)
    for H in random_channels(50):
        frame = SymbolFrame.from_indices(generator.integers(0, 4, size=2), qpsk)
        solution = cipm(H, frame, spec)
        threshold = np.sqrt(ZETA)
        assert solution.power == pytest.approx(np.vdot(solution.x, solution.x).real, rel=1e-10)
        assert np.allclose(np.angle(solution.received / frame.symbols), 0.0, atol=1e-9)
        assert np.all(np.abs(solution.received) >= threshold * (1 - 1e-8))
        assert np.min(np.abs(solution.received)) == pytest.approx(threshold, rel=1e-6)
        assert solution.iterations["lagrangian_residual"] <= 1e-6
        assert np.max(np.abs(lagrangian_residual(H, frame, solution))) <= 1e-6
        coefficients = np.linalg.lstsq(H.conj().T, solution.x, rcond=None)[0]
        assert np.linalg.norm(solution.x - H.conj().T @ coefficients) <= 1e-8


def test_residual_flags_an_inflated_solution(qpsk):
    H = random_channels(1, seed=7)[0]
    frame = SymbolFrame.from_indices([2, 1], qpsk)
    solution = cipm(H, frame, TargetSpec.strict(ZETA))
    inflated = replace(solution, x=1.5 * solution.x, received=1.5 * solution.received, dual=1.5 * solution.dual,
                       power=2.25 * solution.power)
    # Tight users now sit half a threshold beyond their target
    assert np.max(np.abs(lagrangian_residual(H, frame, inflated))) == pytest.approx(0.5, rel=1e-6)
    with pytest.raises(ParameterError):
        lagrangian_residual(H, frame, replace(solution, dual=None))


def test_scaling_of_targets(qpsk):
    H = random_channels(1, seed=5)[0]
    frame = SymbolFrame.from_indices([1, 2], qpsk)
    spec = TargetSpec.equal_margin(ZETA, np.pi / 8)
    offsets = np.array([0.2, -0.1])
    base = solve_fixed_phase(H, frame, spec, offsets)
    scaled = solve_fixed_phase(H, frame, spec.scaled(7.0), offsets)
    assert scaled.power == pytest.approx(7.0 * base.power, rel=1e-10)
    assert np.allclose(scaled.x, np.sqrt(7.0) * base.x, atol=1e-10)


@pytest.mark.parametrize("order", [2, 4, 8])
def test_rotation_covariance(order):
    c = Constellation(order)
    H = random_channels(1, seed=13)[0]
    frame = SymbolFrame.from_indices([0, order // 2 - 1 if order > 2 else 1], c)
    rotated = SymbolFrame.from_indices((frame.indices + 1) % order, c)
    rotation = np.exp(2j * np.pi / order)
    spec = TargetSpec.strict(ZETA)
    base = cipm(H, frame, spec)
    turned = cipm(H, rotated, spec)
    assert turned.power == pytest.approx(base.power, rel=1e-10)
    assert np.allclose(turned.received, rotation * base.received, atol=1e-10)


def test_rank_deficiency_is_rejected(qpsk):
    with pytest.raises(RankDeficiencyError):
        FixedPhaseSolver(np.ones((3, 2)) + 1j * np.eye(3, 2))
    colinear = np.array([[1.0, 2.0j, 0.5], [2.0, 4.0j, 1.0]])
    with pytest.raises(RankDeficiencyError):
        cipm(colinear, SymbolFrame.from_indices([0, 0], qpsk), TargetSpec.strict(ZETA))


def test_offsets_outside_margins(qpsk):
    H = random_channels(1)[0]
    frame = SymbolFrame.from_indices([0, 1], qpsk)
    with pytest.raises(ParameterError):
        solve_fixed_phase(H, frame, TargetSpec.equal_margin(ZETA, 0.1), 0.2)
    with pytest.raises(ParameterError):
        solve_fixed_phase(H, frame, TargetSpec.equal_margin(ZETA, np.pi / 3), 0.0)


def test_target_spec_validation():
    with pytest.raises(ParameterError):
        TargetSpec.strict(0.0)
    with pytest.raises(ParameterError):
        TargetSpec(1.0, 1.0, 0.1, 0.0)
    with pytest.raises(ParameterError):
        TargetSpec(1.0, 1.0, 0.1, 0.2, "equal_margin")
