#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Power lower bounds: the genie-aided linear program and the unit-rank
multicast bound.
"""

import itertools
import logging
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from analysis.interference import coupling_matrix, matched_filter_precoders
from errors import CapabilityError, InfeasibleError, ParameterError
from precoders.fixed_phase import as_channel_array

logger = logging.getLogger(__name__)

MAX_GENIE_USERS = 10
MAX_MULTICAST_USERS = 3
FEASIBILITY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class GenieCoupling:
    """
    Couplings seen by the genie: row norms |g_j| and xi_jk = g_j b_k / |g_j|.
    """

    g_norms: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        if not np.all(np.isfinite(self.xi)):
            raise ParameterError("genie coupling has non-finite entries")
        if np.any(np.abs(np.diag(self.xi)) > 1 + 1e-12):
            raise ParameterError("genie self-coupling exceeds 1")

    @classmethod
    def from_channel(cls, H):
        """Couplings with matched-filter precoders W = H'."""
        H = as_channel_array(H)
        return cls(np.linalg.norm(H, axis=1), coupling_matrix(H, matched_filter_precoders(H)))

    def constraint_matrix(self):
        """A with A_kj = |g_k|^2 |xi_kj|^2, so the constraints read A p >= sigma^2 zeta."""
        return (self.g_norms ** 2)[:, np.newaxis] * np.abs(self.xi) ** 2


def _threshold_vector(zeta, noise_power, n_users):
    zeta = np.atleast_1d(np.asarray(zeta, dtype=float))
    if zeta.size == 1:
        zeta = np.full(n_users, zeta[0])
    if zeta.size != n_users or np.any(zeta <= 0):
        raise ParameterError(f"need {n_users} positive SNR targets, got {zeta.tolist()}")
    if not noise_power > 0:
        raise ParameterError(f"noise power must be positive, got {noise_power}")
    return noise_power * zeta


def genie_bound(H, zeta, noise_power=1.0):
    """
    Genie-aided minimum transmit power.

    Solves min sum(p) subject to A p >= sigma^2 zeta, p >= 0 exactly by
    enumerating the vertices of the feasible polyhedron: each vertex makes K
    of the 2K inequalities tight.

    Args:
        H (ChannelMatrix or array-like): K x M channel without zero rows
        zeta (float or array-like): SNR targets
        noise_power (float): Noise power

    Returns:
        tuple: (minimum power, per-user powers)

    Raises:
        CapabilityError: If K exceeds the enumeration limit
        InfeasibleError: If no vertex is feasible
    """
    coupling = GenieCoupling.from_channel(H)
    n_users = coupling.g_norms.size
    if n_users > MAX_GENIE_USERS:
        raise CapabilityError(f"genie bound enumeration supports K <= {MAX_GENIE_USERS}, got {n_users}")
    demand = _threshold_vector(zeta, noise_power, n_users)
    A = coupling.constraint_matrix()

    # Rows 0..K-1: A p >= demand; rows K..2K-1: p >= 0
    rows = np.vstack([A, np.eye(n_users)])
    rhs = np.concatenate([demand, np.zeros(n_users)])
    best = None
    for tight in itertools.combinations(range(2 * n_users), n_users):
        tight = list(tight)
        try:
            p = np.linalg.solve(rows[tight], rhs[tight])
        except np.linalg.LinAlgError:
            continue
        slack = rows @ p - rhs
        if np.any(slack < -FEASIBILITY_TOL * np.maximum(1.0, np.abs(rhs))):
            continue
        total = float(np.sum(p))
        if best is None or total < best[0]:
            best = (total, np.maximum(p, 0.0))
    if best is None:
        raise InfeasibleError("genie linear program has no feasible vertex")
    logger.debug(f"Genie bound: P={best[0]:.6g}, p={best[1].tolist()}")
    return best


def _span_basis(H):
    _, singular, vh = np.linalg.svd(H)
    rank = int(np.sum(singular > singular[0] * 1e-12))
    return vh[:rank].conj().T


def _coefficients(params, n_coeffs):
    c = params[:n_coeffs] + 1j * params[n_coeffs:]
    return c / np.linalg.norm(c)


def _sphere_grid(n_coeffs, resolution):
    """Unit coefficient vectors covering C^n modulo a common phase."""
    if n_coeffs == 1:
        return np.ones((1, 1), dtype=complex)
    polar = np.linspace(0.0, np.pi / 2.0, resolution // 2 + 1)
    phase = np.linspace(0.0, 2.0 * np.pi, resolution, endpoint=False)
    if n_coeffs == 2:
        alpha, beta = np.meshgrid(polar, phase, indexing="ij")
        return np.stack([np.cos(alpha), np.sin(alpha) * np.exp(1j * beta)], axis=-1).reshape(-1, 2)
    alpha, gamma, beta1, beta2 = np.meshgrid(polar, polar, phase, phase, indexing="ij")
    return np.stack([
        np.cos(alpha),
        np.sin(alpha) * np.cos(gamma) * np.exp(1j * beta1),
        np.sin(alpha) * np.sin(gamma) * np.exp(1j * beta2),
    ], axis=-1).reshape(-1, 3)


def multicast_rank1_bound(H, zeta, noise_power=1.0, resolution=64, refine_starts=3):
    """
    Unit-rank multicast bound: one beam serving every user.

    Minimizes max_j sigma^2 zeta_j / |h_j w|^2 over unit vectors w in the
    span of the channels, by a grid over the coefficient sphere followed by
    Nelder-Mead refinement from the best grid points.

    Args:
        H (ChannelMatrix or array-like): K x M channel, K <= 3
        zeta (float or array-like): SNR targets
        noise_power (float): Noise power
        resolution (int): Phase samples per circle of the grid
        refine_starts (int): Number of grid points refined locally

    Returns:
        tuple: (minimum power, unit beamforming direction w)

    Raises:
        CapabilityError: If K > 3
    """
    H = as_channel_array(H)
    n_users = H.shape[0]
    if n_users > MAX_MULTICAST_USERS:
        raise CapabilityError(f"multicast direction search supports K <= {MAX_MULTICAST_USERS}, got {n_users}")
    demand = _threshold_vector(zeta, noise_power, n_users)

    if n_users == 1:
        norm = np.linalg.norm(H[0])
        return float(demand[0] / norm ** 2), H[0].conj() / norm

    basis = _span_basis(H)
    reduced = H @ basis
    n_coeffs = basis.shape[1]

    def required_power(coeffs):
        gains = np.abs(coeffs @ reduced.T) ** 2
        with np.errstate(divide="ignore"):
            return np.max(demand / gains, axis=-1)

    grid = _sphere_grid(n_coeffs, int(resolution))
    values = required_power(grid)
    starts = grid[np.argsort(values)[:max(1, int(refine_starts))]]

    best_power, best_coeffs = float(np.min(values)), grid[int(np.argmin(values))]
    for start in starts:
        # Logarithm keeps the scale of the max-ratio objective moderate
        result = optimize.minimize(
            lambda params: np.log(required_power(_coefficients(params, n_coeffs))),
            np.concatenate([start.real, start.imag]),
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000 * n_coeffs, "maxfev": 8000 * n_coeffs},
        )
        coeffs = _coefficients(result.x, n_coeffs)
        power = float(required_power(coeffs))
        if power < best_power:
            best_power, best_coeffs = power, coeffs
    direction = basis @ best_coeffs
    logger.debug(f"Unit-rank multicast bound: P={best_power:.6g}")
    return best_power, direction / np.linalg.norm(direction)
