#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Conventional zero-forcing and matched-filter precoders used as baselines.
"""

import logging
from dataclasses import replace

import numpy as np

from analysis.interference import coupling_matrix, matched_filter_precoders
from errors import InfeasibleError, ParameterError
from precoders.fixed_phase import FixedPhaseSolver, PrecodeSolution, as_channel_array

logger = logging.getLogger(__name__)


def _solution(H, x, thresholds, **iterations):
    received = H @ x
    return PrecodeSolution(
        x=x,
        power=float(np.vdot(x, x).real),
        received=received,
        phases_chosen=np.zeros(H.shape[0]),
        active_set=tuple(range(H.shape[0])),
        iterations=dict(iterations),
        thresholds=thresholds,
    )


def zf_baseline(H, frame, spec):
    """
    Zero-forcing precoder x = H^H (H H^H)^{-1} diag(sqrt(sigma^2 zeta)) d.

    Every user receives exactly sqrt(sigma^2 zeta_j) d_j with no
    cross-interference.

    Args:
        H (ChannelMatrix or array-like): K x M channel, full row rank
        frame (SymbolFrame): Data symbols
        spec (TargetSpec): SNR targets and noise power

    Returns:
        PrecodeSolution: The zero-forcing solution
    """
    solver = FixedPhaseSolver(H)
    thresholds = spec.thresholds(solver.n_users)
    dual = solver.gram_inverse @ (thresholds * frame.symbols)
    x = solver.H.conj().T @ dual
    return replace(_solution(solver.H, x, thresholds, method="zf"), dual=dual)


def mrt_powers(H, zeta, noise_power):
    """
    Per-user powers of the matched-filter precoder for the worst symbol combination.

    User j receives |h_j| sum_k sqrt(p_k) rho_jk d_k, so its amplitude is at
    least |h_j| (q_j - sum_{k != j} |rho_jk| q_k) with q = sqrt(p), whatever
    the other users' symbols. Setting that bound to sqrt(sigma^2 zeta_j)
    gives the linear system (I - |R|) q = sqrt(sigma^2 zeta) / |h|, with
    |R| the off-diagonal coupling magnitudes.

    Args:
        H (numpy.ndarray): K x M channel
        zeta (numpy.ndarray): SNR targets
        noise_power (float): Noise power

    Returns:
        numpy.ndarray: Positive powers

    Raises:
        InfeasibleError: If the targets exceed the interference-limited region
    """
    norms = np.linalg.norm(H, axis=1)
    cross = np.abs(coupling_matrix(H, matched_filter_precoders(H)))
    np.fill_diagonal(cross, 0.0)
    target = np.sqrt(noise_power * np.asarray(zeta, dtype=float)) / norms
    try:
        amplitudes = np.linalg.solve(np.eye(H.shape[0]) - cross, target)
    except np.linalg.LinAlgError as e:
        raise InfeasibleError(f"matched-filter power control is singular: {e}") from e
    # Positive only while the coupling spectral radius stays below one
    if np.any(amplitudes <= 0) or not np.all(np.isfinite(amplitudes)):
        raise InfeasibleError("SNR targets are not reachable with matched filtering")
    return amplitudes ** 2


def mrt_baseline(H, frame, spec):
    """
    Matched-filter precoder whose every user meets its amplitude threshold
    for any combination of the other users' symbols.

    Args:
        H (ChannelMatrix or array-like): K x M channel
        frame (SymbolFrame): Data symbols
        spec (TargetSpec): SNR targets and noise power

    Returns:
        PrecodeSolution: Solution with the actual noiseless received points
    """
    H = as_channel_array(H)
    n_users = H.shape[0]
    zeta = spec.thresholds(n_users) ** 2 / spec.noise_power
    powers = mrt_powers(H, zeta, spec.noise_power)
    return matched_filter_baseline(H, frame, powers, spec.thresholds(n_users))


def matched_filter_baseline(H, frame, powers, thresholds=None):
    """
    Matched-filter precoder x = sum_j sqrt(p_j) d_j h_j^H / |h_j| for given powers.

    Args:
        H (ChannelMatrix or array-like): K x M channel
        frame (SymbolFrame): Data symbols
        powers (float or array-like): Per-user powers p_j >= 0
        thresholds (numpy.ndarray, optional): Amplitude thresholds to record

    Returns:
        PrecodeSolution: The matched-filter solution
    """
    H = as_channel_array(H)
    powers = np.broadcast_to(np.asarray(powers, dtype=float), (H.shape[0],))
    if np.any(powers < 0):
        raise ParameterError("matched-filter powers must be non-negative")
    x = matched_filter_precoders(H) @ (np.sqrt(powers) * frame.symbols)
    return _solution(H, x, thresholds, method="mrt", user_powers=powers.tolist())


def scale_to_budget(solution, budget):
    """
    Rescale a solution so that its transmit power equals ``budget``.

    Args:
        solution (PrecodeSolution): Solution with positive power
        budget (float): Target power P > 0

    Returns:
        PrecodeSolution: Scaled copy; thresholds and dual scale along
    """
    if not budget > 0:
        raise ParameterError(f"power budget must be positive, got {budget}")
    if not solution.power > 0:
        raise ParameterError("cannot rescale a zero-power solution")
    factor = np.sqrt(budget / solution.power)
    return replace(
        solution,
        x=solution.x * factor,
        power=float(budget),
        received=solution.received * factor,
        iterations=dict(solution.iterations, scale=float(factor)),
        dual=None if solution.dual is None else solution.dual * factor,
        thresholds=None if solution.thresholds is None else solution.thresholds * factor,
    )
