#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Relaxed-detection-region power minimization by search over receive offsets.

A common offset applied to every user rotates all received points together
and leaves the transmit power unchanged, so the power savings come from
offsets chosen per user. ``cipmr_equal_margin`` keeps the common-offset
line search; ``cipmr_per_user`` and ``margin_sweep`` search the per-user box.
"""

import logging

import numpy as np

from errors import GridCapacityError, ParameterError
from precoders.fixed_phase import FixedPhaseSolver, TargetSpec

logger = logging.getLogger(__name__)

DEFAULT_PHI_STEP = np.pi / 180.0
MAX_GRID_CANDIDATES = 10 ** 7
# Powers closer than this (relative) count as a tie
POWER_TIE_TOL = 1e-12
_MERGE_TOL = 1e-12
# Offset vectors evaluated per vectorized batch
PROFILE_CHUNK = 1 << 15


def offset_grid(phi1, phi2, step=DEFAULT_PHI_STEP):
    """
    Ascending offset grid over [-phi1, phi2].

    The grid holds every multiple of ``step`` inside the interval plus both
    endpoints, so 0 is always present and grids built with one step nest
    when the margins grow.

    Args:
        phi1 (float): Clockwise margin >= 0
        phi2 (float): Counter-clockwise margin >= 0
        step (float): Grid step > 0

    Returns:
        numpy.ndarray: Grid offsets

    Raises:
        ParameterError: On a non-positive step or a negative margin
    """
    if not step > 0:
        raise ParameterError(f"grid step must be positive, got {step}")
    if phi1 < 0 or phi2 < 0:
        raise ParameterError(f"margins must be non-negative, got ({phi1}, {phi2})")
    low = -int(np.floor(phi1 / step + _MERGE_TOL))
    high = int(np.floor(phi2 / step + _MERGE_TOL))
    return _merged(np.concatenate([np.arange(low, high + 1) * step, [-phi1, phi2]]))


def _merged(points):
    points = np.sort(points)
    keep = np.concatenate([[True], np.diff(points) > _MERGE_TOL])
    return points[keep]


def offset_box(grids, max_candidates=MAX_GRID_CANDIDATES):
    """
    Every per-user offset vector drawn from one grid per user.

    Rows follow ``itertools.product`` order: the last user varies fastest.

    Raises:
        GridCapacityError: If the box holds more than ``max_candidates`` vectors
    """
    size = int(np.prod([len(grid) for grid in grids], dtype=float))
    if size > max_candidates:
        raise GridCapacityError(
            f"per-user grid has {size} candidates (cap {max_candidates}); "
            f"use a coarser step or narrower margins")
    mesh = np.meshgrid(*grids, indexing="ij")
    return np.stack([axis.ravel() for axis in mesh], axis=-1)


def offset_powers(solver, frame, thresholds, offsets):
    """Minimum power of every row of ``offsets``, evaluated in vectorized batches."""
    offsets = np.atleast_2d(offsets)
    return np.concatenate([
        solver.profile_powers(frame, thresholds, offsets[start:start + PROFILE_CHUNK])
        for start in range(0, offsets.shape[0], PROFILE_CHUNK)
    ])


def least_power_index(powers, offsets):
    """
    Index of the least power; among ties the smallest total |offset| wins,
    then the earliest index.

    Args:
        powers (array-like): Candidate powers
        offsets (array-like): Candidate offsets, one value or row per candidate

    Returns:
        int: Winning index
    """
    powers = np.asarray(powers, dtype=float)
    if powers.size == 0:
        raise ParameterError("no candidate solutions to select from")
    spread = np.abs(np.asarray(offsets, dtype=float)).reshape(powers.size, -1).sum(axis=1)
    ties = np.flatnonzero(powers <= np.min(powers) * (1.0 + POWER_TIE_TOL))
    closest = ties[spread[ties] <= np.min(spread[ties]) + _MERGE_TOL]
    return int(closest[0])


def equal_margin_profile(solver, frame, spec, offsets):
    """
    Fixed-phase solutions with one common offset per grid point.

    Args:
        solver (FixedPhaseSolver): Solver bound to the channel
        frame (SymbolFrame): Data symbols
        spec (TargetSpec): Targets with margins covering every offset
        offsets (array-like): Common offsets to evaluate

    Returns:
        list: One PrecodeSolution per offset, in grid order
    """
    return [solver.solve(frame, spec, float(offset)) for offset in offsets]


def select_least_power(solutions):
    """
    Pick the least-power solution with the ``least_power_index`` tie-break.

    Returns:
        tuple: (grid index, PrecodeSolution)
    """
    if not solutions:
        raise ParameterError("no candidate solutions to select from")
    index = least_power_index([s.power for s in solutions], [np.atleast_1d(s.phases_chosen) for s in solutions])
    return index, solutions[index]


def _with_search_stats(solution, **stats):
    solution.iterations.update(stats)
    return solution


def cipmr_equal_margin(H, frame, spec, phi, step=DEFAULT_PHI_STEP):
    """
    Relaxed power minimization with one common receive offset.

    Scans phi_u over the grid on [-phi, phi] and keeps the least-power
    fixed-phase solution. Rotating every receive direction by the same phi_u
    rotates x along, so on full-rank channels each grid point needs the
    strict power and the zero offset wins the tie-break.

    Args:
        H (ChannelMatrix or array-like): K x M channel
        frame (SymbolFrame): Data symbols
        spec (TargetSpec): SNR targets and noise power
        phi (float): Margin, 0 <= phi <= pi / M
        step (float): Grid step

    Returns:
        PrecodeSolution: Least-power solution, ``phases_chosen`` holds phi*
    """
    relaxed = TargetSpec.equal_margin(spec.zeta, phi, spec.noise_power)
    relaxed.check_margins(frame.constellation)
    offsets = offset_grid(phi, phi, step)
    solver = FixedPhaseSolver(H)
    index, solution = select_least_power(equal_margin_profile(solver, frame, relaxed, offsets))
    logger.debug(f"Equal-margin search over {offsets.size} offsets: phi*={offsets[index]:.6f}, power={solution.power:.6g}")
    return _with_search_stats(solution, grid_points=int(offsets.size), phi_star=float(offsets[index]))


def cipmr_per_user(H, frame, spec, step=DEFAULT_PHI_STEP, max_candidates=MAX_GRID_CANDIDATES):
    """
    Relaxed power minimization with an independent offset per user.

    Exhaustive search over the box prod_j [-phi_j1, phi_j2].

    Args:
        H (ChannelMatrix or array-like): K x M channel
        frame (SymbolFrame): Data symbols
        spec (TargetSpec): Targets with per-user margins
        step (float): Grid step
        max_candidates (int): Cap on the number of grid points

    Returns:
        PrecodeSolution: Least-power solution

    Raises:
        GridCapacityError: If the grid exceeds ``max_candidates``
    """
    spec.check_margins(frame.constellation)
    solver = FixedPhaseSolver(H)
    phi1, phi2 = spec.margins(solver.n_users)
    offsets = offset_box([offset_grid(lo, hi, step) for lo, hi in zip(phi1, phi2)], max_candidates)
    powers = offset_powers(solver, frame, spec.thresholds(solver.n_users), offsets)
    best = solver.solve(frame, spec, offsets[least_power_index(powers, offsets)])
    logger.debug(f"Per-user search over {len(offsets)} offset vectors: power={best.power:.6g}")
    return _with_search_stats(best, grid_points=int(len(offsets)))


def margin_sweep(solver, frame, spec, phis, step=DEFAULT_PHI_STEP, max_candidates=MAX_GRID_CANDIDATES):
    """
    Per-user relaxed solutions for several equal margins from one shared profile.

    Every user picks its own offset within [-phi, phi]. The box of the
    widest margin is evaluated once and each margin selects among the
    offset vectors it contains, so the returned powers never increase with
    the margin.

    Args:
        solver (FixedPhaseSolver): Solver bound to the channel
        frame (SymbolFrame): Data symbols
        spec (TargetSpec): SNR targets and noise power
        phis (array-like): Margins, each in [0, pi / M]
        step (float): Grid step
        max_candidates (int): Cap on the size of the widest box

    Returns:
        list: One PrecodeSolution per margin, in the order of ``phis``
    """
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    if phis.size == 0:
        return []
    widest = TargetSpec.per_user(spec.zeta, float(np.max(phis)), float(np.max(phis)), spec.noise_power)
    widest.check_margins(frame.constellation)
    grid = _merged(np.concatenate([[0.0]] + [offset_grid(phi, phi, step) for phi in phis]))
    offsets = offset_box([grid] * solver.n_users, max_candidates)
    powers = offset_powers(solver, frame, widest.thresholds(solver.n_users), offsets)
    reach = np.max(np.abs(offsets), axis=1)

    solutions = []
    for phi in phis:
        members = np.flatnonzero(reach <= phi + _MERGE_TOL)
        index = members[least_power_index(powers[members], offsets[members])]
        solution = solver.solve(frame, widest, offsets[index])
        solutions.append(_with_search_stats(solution, grid_points=int(members.size)))
    return solutions
