#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Shared fixtures for the test suite.
"""

import numpy as np
import pytest

from signals.channel_model import RngStream, draw_channel
from signals.constellation import Constellation


class MockConfig:
    """Configuration with test tolerances and a temporary output directory."""

    def __init__(self, tmp_path):
        self.base_dir = str(tmp_path)
        self.output_dir = str(tmp_path / 'results')
        self.logs_dir = str(tmp_path / 'logs')
        self.threads = 1
        self.version = 'test'
        self.seed = 2016
        self.trials = 2
        self.phi_step_deg = 1.0
        self.noise_draws = 200
        self.min_errors = 10
        self.max_symbols = 10 ** 5
        self.noise_power = 1.0
        self.power_tol = 1e-10
        self.amplitude_tol = 1e-8
        self.tight_tol = 1e-6
        self.span_tol = 1e-8
        self.angle_tol = 1e-9
        self.residual_tol = 1e-6
        self.float_format = '%.12g'

    @property
    def phi_step(self):
        return float(np.radians(self.phi_step_deg))


@pytest.fixture
def mock_config(tmp_path):
    return MockConfig(tmp_path)


@pytest.fixture
def rng():
    return RngStream(2016, 7)


@pytest.fixture
def qpsk():
    return Constellation(4)


@pytest.fixture
def channel(rng):
    """2 x 3 Rayleigh channel with unit power."""
    return draw_channel(2, 3, 1.0, rng.substream(0))


def random_channels(count, n_users=2, n_antennas=3, seed=11):
    """Reproducible list of channel arrays."""
    base = RngStream(seed)
    return [draw_channel(n_users, n_antennas, 1.0, base.substream(t)).matrix for t in range(count)]
