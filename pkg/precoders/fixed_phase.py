#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Minimum-power constructive-interference precoding at fixed receive phases.

Every user j receives h_j x = a_j e^{i(angle(d_j) + offset_j)} with an
amplitude a_j >= sqrt(sigma^2 zeta_j). With the least-norm transmit vector
x = H^H (H H^H)^{-1} r the power is a^T Q a, Q = Re(D^H (H H^H)^{-1} D), so
the problem is a small convex QP in the amplitudes, solved exactly by
enumerating the set of tight amplitude constraints.
"""

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from errors import CapabilityError, InfeasibleError, ParameterError, RankDeficiencyError
from signals.channel_model import ChannelMatrix

logger = logging.getLogger(__name__)

MAX_ACTIVE_SET_USERS = 20
RANK_TOL = 1e-12
# Relative slack when accepting a free amplitude at its threshold
AMPLITUDE_TOL = 1e-12
TIGHT_TOL = 1e-9
MARGIN_TOL = 1e-12

STRICT = "strict"
EQUAL_MARGIN = "equal_margin"
PER_USER = "per_user"


def as_channel_array(H):
    """Plain complex K x M array from a ChannelMatrix or array-like."""
    if isinstance(H, ChannelMatrix):
        return H.matrix
    return ChannelMatrix(H).matrix


@dataclass(frozen=True, eq=False)
class TargetSpec:
    """
    SNR targets, noise power and receive-phase margins.

    ``zeta``, ``phi1`` and ``phi2`` hold one value per user or a single value
    shared by all users.
    """

    zeta: np.ndarray
    noise_power: float = 1.0
    phi1: np.ndarray = 0.0
    phi2: np.ndarray = 0.0
    margin_mode: str = STRICT

    def __post_init__(self):
        zeta = np.atleast_1d(np.asarray(self.zeta, dtype=float))
        phi1 = np.atleast_1d(np.asarray(self.phi1, dtype=float))
        phi2 = np.atleast_1d(np.asarray(self.phi2, dtype=float))
        if np.any(~np.isfinite(zeta)) or np.any(zeta <= 0):
            raise ParameterError(f"SNR targets must be positive, got {zeta.tolist()}")
        if not self.noise_power > 0:
            raise ParameterError(f"noise power must be positive, got {self.noise_power}")
        if np.any(phi1 < 0) or np.any(phi2 < 0):
            raise ParameterError("phase margins must be non-negative")
        if self.margin_mode not in (STRICT, EQUAL_MARGIN, PER_USER):
            raise ParameterError(f"unknown margin mode {self.margin_mode!r}")
        if self.margin_mode == STRICT and (np.any(phi1 != 0) or np.any(phi2 != 0)):
            raise ParameterError("strict targets take no phase margins")
        if self.margin_mode == EQUAL_MARGIN and (np.ptp(np.concatenate([phi1, phi2])) > 0):
            raise ParameterError("equal-margin targets need one common margin")
        for name, value in (("zeta", zeta), ("phi1", phi1), ("phi2", phi2)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        object.__setattr__(self, "noise_power", float(self.noise_power))

    @classmethod
    def strict(cls, zeta, noise_power=1.0):
        return cls(zeta, noise_power)

    @classmethod
    def equal_margin(cls, zeta, phi, noise_power=1.0):
        return cls(zeta, noise_power, phi, phi, EQUAL_MARGIN)

    @classmethod
    def per_user(cls, zeta, phi1, phi2, noise_power=1.0):
        return cls(zeta, noise_power, phi1, phi2, PER_USER)

    def _broadcast(self, values, n_users, name):
        if values.size == 1:
            return np.full(n_users, values[0])
        if values.size != n_users:
            raise ParameterError(f"{name} has {values.size} entries for {n_users} users")
        return values.copy()

    def thresholds(self, n_users):
        """Amplitude thresholds sqrt(sigma^2 zeta_j)."""
        return np.sqrt(self.noise_power * self._broadcast(self.zeta, n_users, "zeta"))

    def margins(self, n_users):
        """Per-user (phi1, phi2) arrays."""
        return self._broadcast(self.phi1, n_users, "phi1"), self._broadcast(self.phi2, n_users, "phi2")

    def check_margins(self, constellation):
        """Raise ParameterError if a margin leaves the strict detection sector."""
        limit = constellation.half_width + MARGIN_TOL
        if np.any(self.phi1 > limit) or np.any(self.phi2 > limit):
            raise ParameterError(f"phase margins exceed pi/{constellation.order}")

    def scaled(self, factor):
        """Same margins, SNR targets multiplied by ``factor``."""
        return TargetSpec(self.zeta * factor, self.noise_power, self.phi1, self.phi2, self.margin_mode)


@dataclass(frozen=True, eq=False)
class PrecodeSolution:
    """
    Transmit vector for one symbol period and its bookkeeping.

    Attributes:
        x: Complex M-vector
        power: Transmit power |x|^2
        received: Noiseless received points h_j x
        phases_chosen: Per-user receive offset from angle(d_j)
        active_set: Users whose amplitude constraint is tight
        iterations: Solver statistics
        dual: Coefficients nu with x = sum_j nu_j h_j^H, when available
        thresholds: Amplitude thresholds the solution was built for
    """

    x: np.ndarray
    power: float
    received: np.ndarray
    phases_chosen: np.ndarray
    active_set: tuple = ()
    iterations: dict = field(default_factory=dict)
    dual: np.ndarray = None
    thresholds: np.ndarray = None

    @property
    def amplitudes(self):
        return np.abs(self.received)

    @property
    def n_users(self):
        return int(self.received.size)


def _solve_amplitudes(Q, s):
    """
    Minimize a^T Q a subject to a >= s for positive definite Q.

    Returns:
        tuple: (amplitudes, tight users, candidates examined)
    """
    n_users = s.size
    users = range(n_users)
    best = None
    examined = 0
    for size in range(1, n_users + 1):
        for tight in itertools.combinations(users, size):
            examined += 1
            tight = list(tight)
            free = [u for u in users if u not in tight]
            a = s.copy()
            if free:
                try:
                    a[free] = -np.linalg.solve(Q[np.ix_(free, free)], Q[np.ix_(free, tight)] @ s[tight])
                except np.linalg.LinAlgError:
                    continue
                if np.any(a[free] < s[free] * (1.0 - AMPLITUDE_TOL)):
                    continue
                a = np.maximum(a, s)
            power = float(a @ Q @ a)
            if best is None or power < best[0]:
                best = (power, a, tuple(tight))
    if best is None:
        raise InfeasibleError("no feasible active set found for the amplitude problem")
    return best[1], best[2], examined


def _batch_amplitude_powers(Q, s):
    """
    Minimum of a^T Q_n a subject to a >= s for a stack of matrices Q_n.

    Same active-set enumeration as ``_solve_amplitudes``, vectorized over the
    leading axis.

    Args:
        Q (numpy.ndarray): N x K x K positive definite matrices
        s (numpy.ndarray): K thresholds

    Returns:
        numpy.ndarray: N minimum powers
    """
    n_cases, n_users = Q.shape[0], s.size
    users = range(n_users)
    best = np.full(n_cases, np.inf)
    for size in range(1, n_users + 1):
        for tight in itertools.combinations(users, size):
            tight = list(tight)
            free = [u for u in users if u not in tight]
            a = np.tile(s, (n_cases, 1))
            feasible = np.ones(n_cases, dtype=bool)
            if free:
                coupled = Q[:, free][:, :, tight] @ s[tight]
                a_free = -np.linalg.solve(Q[:, free][:, :, free], coupled[..., np.newaxis])[..., 0]
                feasible = np.all(a_free >= s[free] * (1.0 - AMPLITUDE_TOL), axis=1)
                a[:, free] = np.maximum(a_free, s[free])
            power = np.einsum("ni,nij,nj->n", a, Q, a)
            best = np.where(feasible & (power < best), power, best)
    return best


class FixedPhaseSolver:
    """
    Fixed-phase minimum-power solver bound to one channel.

    The Gram inverse (H H^H)^{-1} is computed once and reused for every
    symbol frame and offset vector solved on this channel.
    """

    def __init__(self, H):
        """
        Initialize the solver.

        Args:
            H (ChannelMatrix or array-like): K x M channel

        Raises:
            RankDeficiencyError: If H does not have full row rank
            CapabilityError: If K exceeds the active-set enumeration limit
        """
        self.H = as_channel_array(H)
        n_users, n_antennas = self.H.shape
        if n_users > MAX_ACTIVE_SET_USERS:
            raise CapabilityError(f"active-set enumeration supports K <= {MAX_ACTIVE_SET_USERS}, got {n_users}")
        singular = np.linalg.svd(self.H, compute_uv=False)
        if n_users > n_antennas or singular[-1] <= RANK_TOL * singular[0]:
            raise RankDeficiencyError(
                f"channel with K={n_users}, M={n_antennas} is not full row rank "
                f"(smallest singular value {singular[-1]:.3e})")
        self.gram_inverse = np.linalg.inv(self.H @ self.H.conj().T)
        self.gram_inverse = 0.5 * (self.gram_inverse + self.gram_inverse.conj().T)

    @property
    def n_users(self):
        return self.H.shape[0]

    def check_offsets(self, offsets, spec, constellation):
        offsets = np.broadcast_to(np.asarray(offsets, dtype=float), (self.n_users,)).copy()
        spec.check_margins(constellation)
        phi1, phi2 = spec.margins(self.n_users)
        if np.any(offsets < -phi1 - MARGIN_TOL) or np.any(offsets > phi2 + MARGIN_TOL):
            raise ParameterError(f"offsets {offsets.tolist()} outside the phase margins")
        return offsets

    def solve_amplitude_problem(self, directions, thresholds):
        """
        Exact minimum power for unit receive directions and amplitude thresholds.

        Args:
            directions (numpy.ndarray): Unit complex receive directions
            thresholds (numpy.ndarray): Amplitude thresholds

        Returns:
            tuple: (x, amplitudes, tight users, candidates examined)
        """
        D = np.diag(directions)
        Q = np.real(D.conj().T @ self.gram_inverse @ D)
        Q = 0.5 * (Q + Q.T)
        amplitudes, tight, examined = _solve_amplitudes(Q, thresholds)
        dual = self.gram_inverse @ (directions * amplitudes)
        return self.H.conj().T @ dual, amplitudes, tight, examined, dual

    def profile_powers(self, frame, thresholds, offsets):
        """
        Minimum power for many per-user offset vectors at once.

        Args:
            frame (SymbolFrame): Data symbols
            thresholds (numpy.ndarray): Amplitude thresholds
            offsets (numpy.ndarray): N x K receive offsets, one row per candidate

        Returns:
            numpy.ndarray: N minimum powers, equal to ``solve(...).power`` row by row
        """
        offsets = np.atleast_2d(np.asarray(offsets, dtype=float))
        if offsets.shape[1] != self.n_users:
            raise ParameterError(f"offset rows have {offsets.shape[1]} entries for {self.n_users} users")
        directions = np.exp(1j * (frame.angles + offsets))
        Q = np.real(directions.conj()[:, :, np.newaxis] * self.gram_inverse * directions[:, np.newaxis, :])
        Q = 0.5 * (Q + Q.transpose(0, 2, 1))
        return _batch_amplitude_powers(Q, np.asarray(thresholds, dtype=float))

    def solve(self, frame, spec, offsets=0.0):
        """
        Minimum-power transmit vector with every receive phase pinned.

        Args:
            frame (SymbolFrame): Data symbols of the K users
            spec (TargetSpec): Targets and margins
            offsets (float or array-like): Receive offset phi_u,j per user

        Returns:
            PrecodeSolution: The exact optimum

        Raises:
            ParameterError: If an offset leaves its margin or sizes disagree
        """
        if len(frame) != self.n_users:
            raise ParameterError(f"frame has {len(frame)} symbols for {self.n_users} users")
        offsets = self.check_offsets(offsets, spec, frame.constellation)
        thresholds = spec.thresholds(self.n_users)
        directions = np.exp(1j * (frame.angles + offsets))

        x, amplitudes, tight, examined, dual = self.solve_amplitude_problem(directions, thresholds)
        received = self.H @ x
        active = tuple(j for j in range(self.n_users)
                       if j in tight or amplitudes[j] <= thresholds[j] * (1.0 + TIGHT_TOL))
        logger.debug(f"Fixed-phase solve: offsets={offsets.tolist()}, active={active}, power={np.vdot(x, x).real:.6g}")
        return PrecodeSolution(
            x=x,
            power=float(np.vdot(x, x).real),
            received=received,
            phases_chosen=offsets,
            active_set=active,
            iterations={"active_sets_examined": examined},
            dual=dual,
            thresholds=thresholds,
        )


def solve_fixed_phase(H, frame, spec, offsets):
    """
    Solve the fixed-phase minimum-power problem on a single channel.

    Args:
        H (ChannelMatrix or array-like): K x M channel, full row rank
        frame (SymbolFrame): Data symbols
        spec (TargetSpec): Targets and margins
        offsets (float or array-like): Per-user receive offsets

    Returns:
        PrecodeSolution: The exact optimum
    """
    return FixedPhaseSolver(H).solve(frame, spec, offsets)


def lagrangian_residual(H, frame, solution):
    """
    Residual of the 2K real optimality equations at the recovered multipliers.

    With mu_j = -2 Im(nu_j) and alpha_j = -2 Re(nu_j) taken from the dual
    certificate, z_j = 0.5 |h_j| sum_k (-alpha_k - i mu_k) |h_k| rho_jk is
    the received point the multipliers produce (rho_jk the matched-filter
    coupling, e_j the unit receive direction). The equations are

        Im(z_j e_j^*) = 0                      for every user,
        Re(z_j e_j^*) = sqrt(sigma^2 zeta_j)   for users in the active set,
        lambda_j = 0                           for the other users,

    with lambda_j = 2 Re(nu_j e_j^*) |h_j|^2 the amplitude multiplier.

    Args:
        H (ChannelMatrix or array-like): K x M channel
        frame (SymbolFrame): Data symbols
        solution (PrecodeSolution): Solution carrying a dual certificate and thresholds

    Returns:
        numpy.ndarray: 2K residuals relative to the largest threshold
    """
    if solution.dual is None or solution.thresholds is None:
        raise ParameterError("solution carries no dual certificate or thresholds")
    H = as_channel_array(H)
    norms = np.linalg.norm(H, axis=1)
    rho = (H @ H.conj().T) / np.outer(norms, norms)
    mu = -2.0 * np.imag(solution.dual)
    alpha = -2.0 * np.real(solution.dual)

    z = 0.5 * norms * (rho @ ((-alpha - 1j * mu) * norms))
    directions = np.exp(1j * (frame.angles + solution.phases_chosen))
    along = z * directions.conj()
    multipliers = 2.0 * np.real(solution.dual * directions.conj()) * norms ** 2
    thresholds = np.asarray(solution.thresholds, dtype=float)
    tight = np.zeros(H.shape[0], dtype=bool)
    tight[list(solution.active_set)] = True

    residual = np.empty(2 * H.shape[0])
    residual[0::2] = np.imag(along)
    residual[1::2] = np.where(tight, np.real(along) - thresholds, multipliers)
    return residual / max(float(np.max(thresholds)), np.finfo(float).tiny)


def cipm(H, frame, spec, check_residual=True):
    """
    Strict constructive-interference power minimization.

    Every received point lands on the ray of its own symbol with at least
    the target amplitude.

    Args:
        H (ChannelMatrix or array-like): K x M channel
        frame (SymbolFrame): Data symbols
        spec (TargetSpec): SNR targets; margins are ignored
        check_residual (bool): Evaluate the stationarity residual

    Returns:
        PrecodeSolution: The strict optimum
    """
    strict_spec = TargetSpec.strict(spec.zeta, spec.noise_power)
    solution = FixedPhaseSolver(H).solve(frame, strict_spec, 0.0)
    if check_residual:
        residual = float(np.max(np.abs(lagrangian_residual(H, frame, solution))))
        solution.iterations["lagrangian_residual"] = residual
        if residual > 1e-6:
            logger.warning(f"Stationarity residual {residual:.3e} exceeds 1e-6")
    return solution
