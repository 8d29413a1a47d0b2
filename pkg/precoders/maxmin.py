#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Weighted max-min SNR precoding under a total power budget.

The budgeted problem is solved by bisection on the common SNR factor t:
each step solves the minimum-power problem with targets r_j * t, dropping
the budget, and compares the required power with the budget.
"""

import logging
from dataclasses import dataclass

import numpy as np

from errors import InfeasibleError, ParameterError
from precoders.fixed_phase import FixedPhaseSolver, PER_USER, STRICT, TargetSpec
from precoders.relaxed import (DEFAULT_PHI_STEP, MAX_GRID_CANDIDATES, least_power_index, offset_box,
                               offset_grid, offset_powers)

logger = logging.getLogger(__name__)

MAX_BRACKET_DOUBLINGS = 60
MAX_BISECTION_STEPS = 400


@dataclass(frozen=True, eq=False)
class MaxMinSpec:
    """
    Weights, budget and bisection settings of a max-min problem.

    ``tolerance`` defaults to 1e-6 of the budget.
    """

    weights: np.ndarray
    budget: float
    noise_power: float = 1.0
    phi1: float = 0.0
    phi2: float = 0.0
    tolerance: float = None
    bracket: tuple = (0.0, 1.0)

    def __post_init__(self):
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if np.any(~np.isfinite(weights)) or np.any(weights <= 0):
            raise ParameterError(f"SNR weights must be positive, got {weights.tolist()}")
        if not self.budget > 0:
            raise ParameterError(f"power budget must be positive, got {self.budget}")
        tolerance = 1e-6 * self.budget if self.tolerance is None else float(self.tolerance)
        if not tolerance > 0:
            raise ParameterError(f"bisection tolerance must be positive, got {tolerance}")
        low, high = (float(v) for v in self.bracket)
        if not 0 <= low < high:
            raise ParameterError(f"bracket must satisfy 0 <= m1 < m2, got {self.bracket}")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "budget", float(self.budget))
        object.__setattr__(self, "tolerance", tolerance)
        object.__setattr__(self, "bracket", (low, high))

    def targets(self, t):
        """Minimum-power targets r_j * t with this problem's margins."""
        relaxed = np.any(np.asarray(self.phi1) != 0) or np.any(np.asarray(self.phi2) != 0)
        mode = PER_USER if relaxed else STRICT
        return TargetSpec(self.weights * t, self.noise_power, self.phi1, self.phi2, mode)


def bisect_fixed_phase(solver, frame, spec, offsets=0.0):
    """
    Largest factor t whose minimum-power solution fits the budget.

    Args:
        solver (FixedPhaseSolver): Solver bound to the channel
        frame (SymbolFrame): Data symbols
        spec (MaxMinSpec): Problem settings
        offsets (float or array-like): Fixed receive offsets

    Returns:
        tuple: (t*, PrecodeSolution at t*)

    Raises:
        InfeasibleError: If the bracket cannot be extended or the search fails
    """
    low, high = spec.bracket
    best = None

    def required(t):
        return solver.solve(frame, spec.targets(t), offsets)

    if low > 0:
        at_low = required(low)
        if at_low.power > spec.budget:
            raise InfeasibleError(f"budget {spec.budget} is below the power needed at t={low}")
        best = at_low

    doublings = 0
    at_high = required(high)
    while at_high.power <= spec.budget:
        low, best = high, at_high
        if spec.budget - at_high.power <= spec.tolerance:
            return low, _with_bisection_stats(best, low, high, doublings, 0)
        if doublings == MAX_BRACKET_DOUBLINGS:
            raise InfeasibleError(f"bracket exhausted after {MAX_BRACKET_DOUBLINGS} doublings (t > {high:.3e})")
        high *= 2.0
        doublings += 1
        at_high = required(high)
    if doublings:
        logger.debug(f"Bisection bracket extended {doublings} times to [{low:.6g}, {high:.6g}]")

    for step in range(1, MAX_BISECTION_STEPS + 1):
        middle = 0.5 * (low + high)
        candidate = required(middle)
        if candidate.power <= spec.budget:
            low, best = middle, candidate
            if spec.budget - candidate.power <= spec.tolerance:
                return low, _with_bisection_stats(best, low, high, doublings, step)
        else:
            high = middle
    raise InfeasibleError(f"bisection did not reach tolerance {spec.tolerance:.3e} in {MAX_BISECTION_STEPS} steps")


def _with_bisection_stats(solution, low, high, doublings, steps):
    solution.iterations.update(t_star=float(low), bracket=(float(low), float(high)),
                               bracket_doublings=doublings, bisection_steps=steps)
    return solution


def cimm(H, frame, spec):
    """
    Strict constructive-interference weighted max-min SNR precoding.

    Args:
        H (ChannelMatrix or array-like): K x M channel
        frame (SymbolFrame): Data symbols
        spec (MaxMinSpec): Weights, budget and tolerance; margins are ignored

    Returns:
        tuple: (t*, PrecodeSolution) with power in [P - delta, P]
    """
    strict = MaxMinSpec(spec.weights, spec.budget, spec.noise_power, 0.0, 0.0, spec.tolerance, spec.bracket)
    return bisect_fixed_phase(FixedPhaseSolver(H), frame, strict, 0.0)


def cimmr(H, frame, spec, phi, step=DEFAULT_PHI_STEP, max_candidates=MAX_GRID_CANDIDATES):
    """
    Relaxed max-min precoding with an independent receive offset per user.

    At fixed offsets the power needed for targets r_j * t is t times the
    power needed for r_j, so the offset vector maximizing t* is the one
    with the least unit-target power. That vector is found on the box
    [-phi, phi]^K and the budget bisection runs there once.

    Args:
        H (ChannelMatrix or array-like): K x M channel
        frame (SymbolFrame): Data symbols
        spec (MaxMinSpec): Weights, budget and tolerance
        phi (float): Margin, 0 <= phi <= pi / M
        step (float): Offset grid step
        max_candidates (int): Cap on the number of offset vectors

    Returns:
        tuple: (t*, per-user offsets phi*, PrecodeSolution), ties toward the
        smaller total |phi_u|
    """
    relaxed = MaxMinSpec(spec.weights, spec.budget, spec.noise_power, phi, phi, spec.tolerance, spec.bracket)
    unit = relaxed.targets(1.0)
    unit.check_margins(frame.constellation)
    solver = FixedPhaseSolver(H)
    grid = offset_grid(phi, phi, step)
    offsets = offset_box([grid] * solver.n_users, max_candidates)
    powers = offset_powers(solver, frame, unit.thresholds(solver.n_users), offsets)
    phi_star = offsets[least_power_index(powers, offsets)]
    logger.debug(f"Max-min offset search over {len(offsets)} vectors: phi*={np.round(phi_star, 6).tolist()}")

    t_star, solution = bisect_fixed_phase(solver, frame, relaxed, phi_star)
    solution.iterations.update(phi_star=phi_star.copy(), grid_points=int(len(offsets)))
    return t_star, phi_star, solution
