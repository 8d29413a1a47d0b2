#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Configuration settings for the constructive-interference precoding simulator.
"""

import os

import numpy as np
from dotenv import load_dotenv

from errors import ConfigError

# Values from a local .env file never override the real environment
load_dotenv(override=False)

VERSION = "1.0.0"


def _env(name, default, cast):
    raw = os.environ.get(name)
    if raw is None or raw == '':
        return default
    try:
        return cast(raw)
    except ValueError as e:
        raise ConfigError(f"Environment variable {name}={raw!r} is not a valid {cast.__name__}") from e


class Config:
    """Configuration class for simulation settings."""

    def __init__(self, create_dirs=True):
        """
        Initialize the configuration from the environment.

        Args:
            create_dirs (bool): Create the output and log directories
        """
        # Base paths
        self.base_dir = os.path.dirname(os.path.abspath(__file__))
        self.output_dir = _env('CIPRECODE_OUTPUT_DIR', os.path.join(self.base_dir, 'results'), str)
        self.logs_dir = _env('CIPRECODE_LOG_DIR', os.path.join(self.base_dir, 'logs'), str)

        if create_dirs:
            os.makedirs(self.output_dir, exist_ok=True)
            os.makedirs(self.logs_dir, exist_ok=True)

        # Execution
        self.threads = _env('CIPRECODE_THREADS', 1, int)
        if self.threads < 1:
            raise ConfigError(f"CIPRECODE_THREADS must be >= 1, got {self.threads}")
        self.version = VERSION

        # Simulation defaults
        self.seed = _env('CIPRECODE_SEED', 2016, int)
        self.trials = _env('CIPRECODE_TRIALS', 10000, int)
        self.phi_step_deg = _env('CIPRECODE_PHI_STEP_DEG', 1.0, float)
        self.noise_draws = _env('CIPRECODE_NOISE_DRAWS', 2000, int)
        self.min_errors = _env('CIPRECODE_MIN_ERRORS', 100, int)
        self.max_symbols = int(_env('CIPRECODE_MAX_SYMBOLS', 1e8, float))
        self.noise_power = 1.0

        # Validation thresholds
        self.power_tol = 1e-10
        self.amplitude_tol = 1e-8
        self.tight_tol = 1e-6
        self.span_tol = 1e-8
        self.angle_tol = 1e-9
        self.residual_tol = 1e-6

        # Output formatting
        self.float_format = '%.12g'

    @property
    def phi_step(self):
        """Offset grid step in radians."""
        return float(np.radians(self.phi_step_deg))
