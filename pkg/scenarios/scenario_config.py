#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Scenario configuration schema and the registry of built-in experiments.
"""

import hashlib
import json
import logging
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from errors import ConfigError

logger = logging.getLogger(__name__)

Pipeline = Literal[
    'power_vs_channel',
    'received_constellation',
    'ser_vs_power',
    'rate_vs_channel',
    'ee_vs_channel',
    'ee_vs_target',
    'ee_vs_phi',
    'modulation_table',
]


class ScenarioConfig(BaseModel):
    """One experiment: system sizes, targets, sweeps, margins and run settings."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    scenario: str
    pipeline: Pipeline
    description: str = ''
    n_antennas: int = Field(3, ge=1)
    n_users: int = Field(2, ge=1)
    psk_orders: List[int] = Field(default_factory=lambda: [4])
    zeta_db: Optional[float] = None
    zeta_db_sweep: List[float] = Field(default_factory=list)
    weights: Optional[List[float]] = None
    budget_db_sweep: List[float] = Field(default_factory=list)
    channel_power_db: List[float] = Field(default_factory=lambda: [0.0])
    noise_power: float = Field(1.0, gt=0)
    phis_deg: List[float] = Field(default_factory=list)
    phi_step_deg: float = Field(1.0, gt=0)
    trials: int = Field(10000, ge=1)
    seed: int = Field(2016, ge=0, lt=2 ** 64)
    ser_method: Literal['monte_carlo', 'quadrature'] = 'monte_carlo'
    noise_draws: int = Field(2000, ge=1)
    min_errors: int = Field(100, ge=1)
    max_symbols: int = Field(10 ** 8, ge=1)
    fixed_symbols: Optional[List[int]] = None
    output: Optional[str] = None

    @model_validator(mode='after')
    def check_preconditions(self):
        if self.n_users > self.n_antennas:
            raise ValueError(f"n_users={self.n_users} exceeds n_antennas={self.n_antennas}; channels cannot be full row rank")
        if not self.psk_orders or any(order < 2 for order in self.psk_orders):
            raise ValueError(f"psk_orders must be non-empty with every order >= 2, got {self.psk_orders}")
        widest = 180.0 / max(self.psk_orders)
        for phi in self.phis_deg:
            if not 0.0 <= phi <= widest + 1e-9:
                raise ValueError(f"margin {phi} deg outside [0, {widest}] deg")
        if self.weights is not None:
            if len(self.weights) != self.n_users or any(w <= 0 for w in self.weights):
                raise ValueError(f"weights must be {self.n_users} positive values")
        needs_target = self.pipeline not in ('ser_vs_power', 'ee_vs_target')
        if needs_target and self.zeta_db is None:
            raise ValueError(f"pipeline {self.pipeline} needs zeta_db")
        if self.pipeline == 'ser_vs_power' and not self.budget_db_sweep:
            raise ValueError("pipeline ser_vs_power needs budget_db_sweep")
        if self.pipeline == 'ee_vs_target' and not self.zeta_db_sweep:
            raise ValueError("pipeline ee_vs_target needs zeta_db_sweep")
        if self.pipeline in ('received_constellation', 'ee_vs_phi', 'modulation_table') and not self.phis_deg:
            raise ValueError(f"pipeline {self.pipeline} needs phis_deg")
        if self.fixed_symbols is not None:
            if len(self.fixed_symbols) != self.n_users:
                raise ValueError(f"fixed_symbols needs {self.n_users} indices")
            if any(not 0 <= s < self.psk_orders[0] for s in self.fixed_symbols):
                raise ValueError("fixed_symbols outside the constellation")
        return self

    def digest(self):
        """Short hash of the resolved configuration."""
        payload = json.dumps(self.model_dump(exclude={'output'}), sort_keys=True)
        return hashlib.sha256(payload.encode('utf-8')).hexdigest()[:16]

    def with_overrides(self, **overrides):
        """Copy with the non-None overrides applied and re-validated."""
        values = self.model_dump()
        values.update({key: value for key, value in overrides.items() if value is not None})
        return parse_config(values)


def parse_config(values):
    """
    Validate a configuration mapping.

    Raises:
        ConfigError: On unknown keys or violated preconditions
    """
    try:
        return ScenarioConfig.model_validate(values)
    except ValidationError as e:
        raise ConfigError(f"Invalid scenario configuration: {e}") from e


def load_config_file(path):
    """
    Load a JSON scenario file; a ``scenario`` naming a built-in fills the defaults.

    Args:
        path (str): JSON file

    Returns:
        ScenarioConfig: The validated configuration
    """
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            values = json.load(handle)
    except OSError as e:
        raise ConfigError(f"Cannot read scenario file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Scenario file {path} is not valid JSON: {e}") from e
    if not isinstance(values, dict):
        raise ConfigError(f"Scenario file {path} must hold a JSON object")

    name = values.get('scenario')
    if name in SCENARIOS and 'pipeline' not in values:
        merged = SCENARIOS[name].model_dump()
        merged.update(values)
        values = merged
    logger.info(f"Loaded scenario configuration from {path}")
    return parse_config(values)


SCENARIOS = {config.scenario: config for config in (
    ScenarioConfig(
        scenario='fig2', pipeline='power_vs_channel',
        description='Transmit power vs channel strength: multicast, genie, CIPM, CIPMR',
        zeta_db=4.7712, phis_deg=[22.5, 36.0],
        channel_power_db=[0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
    ),
    ScenarioConfig(
        scenario='fig3', pipeline='received_constellation',
        description='Noiseless received points of CIPM and per-user CIPMR',
        zeta_db=4.7121, phis_deg=[36.0], channel_power_db=[0.0],
        fixed_symbols=[0, 2], trials=10,
    ),
    ScenarioConfig(
        scenario='fig4', pipeline='ser_vs_power',
        description='SER vs transmit power: CIMM, CIMMR, ZF, MRT',
        weights=[1.0, 1.0], phis_deg=[22.5, 36.0], channel_power_db=[0.0],
        budget_db_sweep=[0.0, 5.0, 10.0, 15.0, 20.0],
    ),
    ScenarioConfig(
        scenario='fig5', pipeline='rate_vs_channel',
        description='Effective rate per user vs channel strength',
        zeta_db=4.7121, phis_deg=[22.5, 36.0],
        channel_power_db=[0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
    ),
    ScenarioConfig(
        scenario='fig6', pipeline='ee_vs_channel',
        description='Energy efficiency vs channel strength',
        zeta_db=4.7712, phis_deg=[22.5, 36.0],
        channel_power_db=[0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
    ),
    ScenarioConfig(
        scenario='fig7', pipeline='ee_vs_target',
        description='Energy efficiency vs SNR target at 20 dB channel strength',
        phis_deg=[36.0], channel_power_db=[20.0],
        zeta_db_sweep=[0.0, 2.5, 5.0, 7.5, 10.0, 12.5, 15.0, 17.5, 20.0],
    ),
    ScenarioConfig(
        scenario='fig8', pipeline='ee_vs_phi',
        description='Energy efficiency and SER vs angular span, high SNR target',
        zeta_db=13.01, channel_power_db=[20.0],
        phis_deg=[float(p) for p in range(0, 46, 3)],
    ),
    ScenarioConfig(
        scenario='fig9', pipeline='ee_vs_phi',
        description='Energy efficiency and SER vs angular span, low SNR target',
        zeta_db=4.7712, channel_power_db=[0.0],
        phis_deg=[float(p) for p in range(0, 46, 2)],
    ),
    ScenarioConfig(
        scenario='table2', pipeline='modulation_table',
        description='Energy efficiency of BPSK and QPSK under relaxation',
        zeta_db=4.712, channel_power_db=[20.0], psk_orders=[2, 4],
        phis_deg=[0.0, 11.25, 22.5, 33.75], phi_step_deg=0.5,
    ),
)}


def get_scenario(name):
    """
    Look up a built-in scenario.

    Raises:
        ConfigError: If the id is unknown
    """
    if name not in SCENARIOS:
        raise ConfigError(f"Unknown scenario {name!r}; available: {', '.join(sorted(SCENARIOS))}")
    return SCENARIOS[name]


def list_scenarios():
    """Ids and one-line descriptions of the built-in scenarios."""
    return [(name, config.description) for name, config in sorted(SCENARIOS.items())]
