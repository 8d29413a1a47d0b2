#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Effective rate, energy efficiency and the search for the phase margin that
maximizes energy efficiency.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from tqdm import tqdm

from analysis.ser import conditional_ser, count_errors
from errors import ParameterError
from precoders.fixed_phase import FixedPhaseSolver, TargetSpec
from precoders.relaxed import DEFAULT_PHI_STEP, margin_sweep
from signals.channel_model import draw_channel
from signals.constellation import draw_frame

logger = logging.getLogger(__name__)

MONTE_CARLO = "monte_carlo"
QUADRATURE = "quadrature"


@dataclass(frozen=True, eq=False)
class EnergyReport:
    """
    Rates and energy efficiency at one phase margin.

    Attributes:
        effective_rates: Per-user effective rate in bits/symbol
        power: Transmit power
        eta: Sum effective rate per unit power
        phi: Phase margin
        ser: Mean SER behind the effective rates
    """

    effective_rates: np.ndarray
    power: float
    eta: float
    phi: float = 0.0
    ser: float = field(default=0.0)

    def __post_init__(self):
        if self.eta < 0:
            raise ParameterError(f"energy efficiency must be non-negative, got {self.eta}")


def effective_rate(rate, ser):
    """
    Rate scaled by the probability of correct detection, R (1 - SER).

    Args:
        rate (float): Nominal rate R in bits/symbol
        ser (float or numpy.ndarray): Symbol error rate in [0, 1]

    Returns:
        float or numpy.ndarray: Effective rate clamped to [0, R]
    """
    ser = np.asarray(ser, dtype=float)
    if np.any(ser < 0) or np.any(ser > 1):
        raise ParameterError(f"SER must lie in [0, 1], got {ser}")
    return np.clip(rate * (1.0 - ser), 0.0, rate)[()]


def energy_efficiency(effective_rates, power):
    """
    Sum of effective rates per unit transmit power.

    Raises:
        ParameterError: If ``power`` is not positive
    """
    if not power > 0:
        raise ParameterError(f"transmit power must be positive, got {power}")
    return float(np.sum(effective_rates)) / float(power)


@dataclass(frozen=True)
class DrawSettings:
    """Random-draw model of a trial: sizes, channel power and modulation."""

    n_users: int
    n_antennas: int
    channel_power: float
    constellation: object


class PhiStarSearch:
    """
    Monte-Carlo search over equal phase margins for the best energy efficiency.

    Each trial draws a channel and a symbol frame and lets every user pick its
    own receive offset within the margin. The per-user offset box of the
    largest margin is profiled once and each smaller margin selects among
    the offset vectors it contains. The same noise draws are used for every
    margin.
    """

    def __init__(self, draws, spec, phi_grid, step=DEFAULT_PHI_STEP, ser_method=MONTE_CARLO,
                 noise_draws=2000, threads=1, progress=True):
        """
        Initialize the search.

        Args:
            draws (DrawSettings): Channel and symbol model
            spec (TargetSpec): SNR targets and noise power
            phi_grid (array-like): Margins to compare
            step (float): Offset grid step
            ser_method (str): ``"monte_carlo"`` or ``"quadrature"``
            noise_draws (int): Noise draws per trial for Monte-Carlo SER
            threads (int): Worker threads for trials
            progress (bool): Show a progress bar
        """
        self.phi_grid = np.sort(np.atleast_1d(np.asarray(phi_grid, dtype=float)))
        if self.phi_grid.size == 0:
            raise ParameterError("phi grid must not be empty")
        if ser_method not in (MONTE_CARLO, QUADRATURE):
            raise ParameterError(f"unknown SER method {ser_method!r}")
        self.draws = draws
        self.spec = spec
        self.step = step
        self.ser_method = ser_method
        self.noise_draws = int(noise_draws)
        self.threads = max(1, int(threads))
        self.progress = progress

        widest = float(self.phi_grid[-1])
        TargetSpec.per_user(spec.zeta, widest, widest, spec.noise_power).check_margins(draws.constellation)

    def evaluate_trial(self, rng):
        """
        Per-margin (power, mean SER, effective rates) of one draw.

        Returns:
            tuple: Arrays of shape (n_phi,), (n_phi,) and (n_phi, K)
        """
        draws = self.draws
        H = draw_channel(draws.n_users, draws.n_antennas, draws.channel_power, rng.substream(0))
        frame = draw_frame(draws.n_users, draws.constellation, rng.substream(1))
        solver = FixedPhaseSolver(H)
        solutions = margin_sweep(solver, frame, self.spec, self.phi_grid, self.step)
        rate = draws.constellation.bits_per_symbol

        powers, sers, rates = [], [], []
        for solution in solutions:
            if self.ser_method == QUADRATURE:
                user_ser = conditional_ser(solution, frame, self.spec.noise_power)
            else:
                # Common random numbers across margins
                user_ser = count_errors(solution, frame, self.spec.noise_power, self.noise_draws,
                                        rng.substream(2).generator()) / float(self.noise_draws)
            powers.append(solution.power)
            sers.append(float(np.mean(user_ser)))
            rates.append(effective_rate(rate, user_ser))
        return np.array(powers), np.array(sers), np.array(rates)

    def run(self, trials, rng):
        """
        Average energy efficiency per margin over ``trials`` draws.

        Returns:
            tuple: (phi*, list of EnergyReport in phi order)
        """
        if trials < 1:
            raise ParameterError(f"trials must be >= 1, got {trials}")
        streams = [rng.substream(t) for t in range(int(trials))]
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            results = list(tqdm(pool.map(self.evaluate_trial, streams), total=len(streams),
                                desc="phi* search", disable=not self.progress))

        powers = np.array([r[0] for r in results])
        sers = np.array([r[1] for r in results])
        rates = np.array([r[2] for r in results])
        etas = rates.sum(axis=2) / powers

        reports = [
            EnergyReport(
                effective_rates=rates[:, i].mean(axis=0),
                power=float(powers[:, i].mean()),
                eta=float(etas[:, i].mean()),
                phi=float(phi),
                ser=float(sers[:, i].mean()),
            )
            for i, phi in enumerate(self.phi_grid)
        ]
        curve = np.array([report.eta for report in reports])
        # argmax returns the first maximum, i.e. the smallest margin among ties
        best = int(np.argmax(curve))
        logger.info(f"phi* = {np.degrees(self.phi_grid[best]):.2f} deg with eta = {curve[best]:.6g}")
        return float(self.phi_grid[best]), reports


def phi_star_search(draws, spec, phi_grid, trials, rng, step=DEFAULT_PHI_STEP, ser_method=MONTE_CARLO,
                    noise_draws=2000, threads=1, progress=False):
    """
    Margin maximizing the average energy efficiency with per-user receive offsets.

    Args:
        draws (DrawSettings): Channel and symbol model
        spec (TargetSpec): SNR targets and noise power
        phi_grid (array-like): Margins to compare, non-empty
        trials (int): Channel and symbol draws
        rng (RngStream): Random stream
        step (float): Offset grid step
        ser_method (str): ``"monte_carlo"`` or ``"quadrature"``
        noise_draws (int): Noise draws per trial
        threads (int): Worker threads
        progress (bool): Show a progress bar

    Returns:
        tuple: (phi*, list of EnergyReport)
    """
    search = PhiStarSearch(draws, spec, phi_grid, step, ser_method, noise_draws, threads, progress)
    return search.run(trials, rng)
