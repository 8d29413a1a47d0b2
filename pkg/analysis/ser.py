#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Symbol error rate of M-PSK sector detection: adaptive quadrature of the
received-angle density and Monte-Carlo simulation.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special, stats

from errors import ParameterError
from signals.channel_model import complex_noise
from signals.constellation import ANGLE_TOL, detect_many, wrap_angle

logger = logging.getLogger(__name__)

QUAD_OPTIONS = {"epsabs": 1e-13, "epsrel": 1e-10, "limit": 200}
UNIFORM = "uniform"
EMPIRICAL = "empirical"
UNNORMALIZED = "unnormalized"
WILSON_LEVEL = 0.95


@dataclass(frozen=True, eq=False)
class SerReport:
    """
    Analytic and simulated SER of one configuration.

    Attributes:
        ser_analytic: Quadrature SER conditioned on the simulated received points
        ser_mc: Fraction of detection errors
        mc_ci95: Half-width of the Wilson 95% interval
        trials: Simulated symbols per user
        omega: Mean received SNR |h_j x|^2 over users and draws
        phi: Phase margin of the precoder
        errors: Counted detection errors
        per_user_ser: Simulated SER of each user
    """

    ser_analytic: float
    ser_mc: float
    mc_ci95: float
    trials: int
    omega: float
    phi: float = 0.0
    errors: int = 0
    per_user_ser: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("ser_analytic", "ser_mc"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ParameterError(f"{name}={value} is not a probability")
        if self.mc_ci95 < 0:
            raise ParameterError(f"mc_ci95 must be non-negative, got {self.mc_ci95}")


def _check_power(omega, noise_power):
    if omega < 0:
        raise ParameterError(f"received SNR must be non-negative, got {omega}")
    if noise_power < 0:
        raise ParameterError(f"noise power must be non-negative, got {noise_power}")


def polar_density(v, theta, omega, noise_power, phi=0.0):
    """
    Joint density of the received amplitude v and angle theta.

    The noiseless point sits at sqrt(omega) e^{i phi}; noise is CN(0, sigma^2).

    Args:
        v (float or numpy.ndarray): Amplitude >= 0
        theta (float or numpy.ndarray): Angle relative to the symbol
        omega (float): Received signal power
        noise_power (float): Noise power sigma^2 > 0
        phi (float): Offset of the noiseless point

    Returns:
        float or numpy.ndarray: Density value(s)
    """
    v = np.asarray(v, dtype=float)
    exponent = -(v ** 2 + omega - 2.0 * v * np.sqrt(omega) * np.cos(np.asarray(theta) - phi)) / noise_power
    return (v / (np.pi * noise_power) * np.exp(exponent))[()]


def angle_density(theta, omega, noise_power, v_min=0.0):
    """
    Density of the received angle over amplitudes v >= v_min.

    The amplitude integral has the closed form

        e^{-s^2/sigma^2} / (pi sigma^2) * [ sigma^2/2 e^{-(v0-c)^2/sigma^2}
            + c sigma sqrt(pi)/2 erfc((v0-c)/sigma) ]

    with c = sqrt(omega) cos(theta) and s = sqrt(omega) sin(theta).

    Args:
        theta (float or numpy.ndarray): Angle relative to the noiseless point
        omega (float): Received signal power
        noise_power (float): Noise power sigma^2 > 0
        v_min (float): Lower amplitude limit v0 >= 0

    Returns:
        float or numpy.ndarray: Density value(s); integrates to 1 for v_min = 0
    """
    sigma = np.sqrt(noise_power)
    c = np.sqrt(omega) * np.cos(theta)
    s = np.sqrt(omega) * np.sin(theta)
    u = (v_min - c) / sigma
    bracket = 0.5 * noise_power * np.exp(-u ** 2) + c * sigma * 0.5 * np.sqrt(np.pi) * special.erfc(u)
    return (np.exp(-s ** 2 / noise_power) / (np.pi * noise_power) * bracket)[()]


def sector_error(omega, noise_power, order, offset=0.0, v_min=0.0):
    """
    Probability that the received angle leaves the strict sector (and v >= v_min).

    Any offset in (-pi, pi] is accepted.
    """
    _check_power(omega, noise_power)
    half_width = np.pi / order
    offset = float(wrap_angle(offset))
    if noise_power == 0:
        if omega == 0:
            raise ParameterError("noiseless zero signal has no detection sector")
        if np.sqrt(omega) < v_min:
            return 0.0
        if abs(abs(offset) - half_width) <= ANGLE_TOL:
            return 0.5
        return 0.0 if abs(offset) < half_width else 1.0

    # Complement of the sector, integrated in the frame of the noiseless point
    value, _ = integrate.quad(
        lambda theta: angle_density(theta - offset, omega, noise_power, v_min),
        half_width, 2.0 * np.pi - half_width, **QUAD_OPTIONS)
    return float(np.clip(value, 0.0, 1.0))


def ser_strict_quadrature(omega, noise_power, order):
    """
    SER with the noiseless point on the constellation point.

    Args:
        omega (float): Received signal power |h_j x|^2
        noise_power (float): Noise power sigma^2
        order (int): PSK order M

    Returns:
        float: Symbol error probability
    """
    return sector_error(omega, noise_power, order, 0.0)


def ser_offset_quadrature(omega, noise_power, order, offset):
    """
    SER with the noiseless point rotated by ``offset`` inside the sector.

    Raises:
        ParameterError: If |offset| > pi / M
    """
    if abs(offset) > np.pi / order + ANGLE_TOL:
        raise ParameterError(f"offset {offset} outside [-pi/{order}, pi/{order}]")
    return sector_error(omega, noise_power, order, offset)


def ser_relaxed_average(omega, noise_power, order, phi1, phi2, weighting=EMPIRICAL, offsets=None, omegas=None):
    """
    SER averaged over the receive offsets of a relaxed precoder.

    Args:
        omega (float): Received signal power
        noise_power (float): Noise power
        order (int): PSK order M
        phi1 (float): Clockwise margin
        phi2 (float): Counter-clockwise margin
        weighting (str): ``"empirical"`` averages over ``offsets`` (and
            ``omegas`` when given); ``"uniform"`` integrates with density
            1 / (phi1 + phi2); ``"unnormalized"`` integrates with density 1
        offsets (array-like, optional): Offsets chosen by a precoder
        omegas (array-like, optional): Received powers matching ``offsets``

    Returns:
        float: Averaged SER (the unnormalized integral is not a probability)
    """
    limit = np.pi / order + ANGLE_TOL
    if phi1 < 0 or phi2 < 0 or phi1 > limit or phi2 > limit:
        raise ParameterError(f"margins ({phi1}, {phi2}) outside [0, pi/{order}]")

    if weighting == EMPIRICAL:
        if offsets is None:
            raise ParameterError("empirical weighting needs the offsets chosen by the precoder")
        offsets = np.atleast_1d(np.asarray(offsets, dtype=float))
        if offsets.size == 0:
            raise ParameterError("empirical weighting needs at least one offset")
        if np.any(offsets < -phi1 - ANGLE_TOL) or np.any(offsets > phi2 + ANGLE_TOL):
            raise ParameterError("empirical offsets leave the margins")
        omegas = np.full(offsets.size, omega) if omegas is None else np.broadcast_to(omegas, offsets.shape)
        return float(np.mean([sector_error(w, noise_power, order, o) for w, o in zip(omegas, offsets)]))

    if weighting not in (UNIFORM, UNNORMALIZED):
        raise ParameterError(f"unknown weighting {weighting!r}")
    width = phi1 + phi2
    if width == 0:
        return ser_strict_quadrature(omega, noise_power, order)
    integral, _ = integrate.quad(lambda psi: sector_error(omega, noise_power, order, psi), -phi1, phi2,
                                 epsabs=1e-12, epsrel=1e-9, limit=100)
    return float(integral / width) if weighting == UNIFORM else float(integral)


def ser_above_target(zeta, noise_power, order, phi, omega=None):
    """
    Probability of a wrong decision with a received amplitude still above target.

    Integrates the joint density over v >= sqrt(sigma^2 zeta), the angles
    outside the strict sector, and offsets uniform on [-phi, phi].

    Args:
        zeta (float): SNR target > 0
        noise_power (float): Noise power
        order (int): PSK order M
        phi (float): Margin, 0 <= phi <= pi / M
        omega (float, optional): Received signal power, sigma^2 zeta by default

    Returns:
        float: The probability
    """
    if not zeta > 0:
        raise ParameterError(f"SNR target must be positive, got {zeta}")
    if phi < 0 or phi > np.pi / order + ANGLE_TOL:
        raise ParameterError(f"margin {phi} outside [0, pi/{order}]")
    omega = noise_power * zeta if omega is None else omega
    v_min = np.sqrt(noise_power * zeta)
    if phi == 0:
        return sector_error(omega, noise_power, order, 0.0, v_min)
    integral, _ = integrate.quad(lambda psi: sector_error(omega, noise_power, order, psi, v_min), -phi, phi,
                                 epsabs=1e-12, epsrel=1e-9, limit=100)
    return float(integral / (2.0 * phi))


def received_offsets(solution, frame):
    """Angle of each noiseless received point relative to its symbol."""
    return wrap_angle(np.angle(solution.received) - frame.angles)


def conditional_ser(solution, frame, noise_power):
    """
    Exact per-user SER given the noiseless received points of a solution.

    Returns:
        numpy.ndarray: One probability per user
    """
    omegas = np.abs(solution.received) ** 2
    offsets = received_offsets(solution, frame)
    order = frame.constellation.order
    return np.array([sector_error(w, noise_power, order, o) for w, o in zip(omegas, offsets)])


def wilson_interval(errors, n):
    """
    Half-width of the Wilson 95% interval for a binomial proportion.

    Args:
        errors (int): Observed errors
        n (int): Trials, at least 1

    Returns:
        float: Half-width of the interval
    """
    if n < 1:
        raise ParameterError(f"need at least one trial, got {n}")
    interval = stats.binomtest(int(errors), int(n)).proportion_ci(confidence_level=WILSON_LEVEL, method="wilson")
    return 0.5 * (interval.high - interval.low)


def count_errors(solution, frame, noise_power, draws, generator):
    """
    Detection errors per user over ``draws`` noisy observations.

    Returns:
        numpy.ndarray: Error count per user
    """
    received = np.broadcast_to(solution.received, (int(draws), solution.n_users))
    if noise_power > 0:
        received = received + complex_noise(received.shape, noise_power, generator)
    detected = detect_many(received, frame.constellation)
    return np.sum(detected != frame.indices, axis=0)


def mc_ser(solution, frame, noise_power, trials, rng, phi=0.0):
    """
    Monte-Carlo SER of a fixed precoding solution.

    Args:
        solution (PrecodeSolution): Precoder output
        frame (SymbolFrame): The symbols it was built for
        noise_power (float): Noise power sigma^2 >= 0
        trials (int): Noisy observations per user
        rng (RngStream): Random stream
        phi (float): Margin recorded in the report

    Returns:
        SerReport: Aggregate over all users
    """
    if trials < 1:
        raise ParameterError(f"trials must be >= 1, got {trials}")
    per_user = count_errors(solution, frame, noise_power, trials, rng.generator())
    errors = int(np.sum(per_user))
    total = int(trials) * solution.n_users
    if noise_power > 0:
        analytic = float(np.mean(conditional_ser(solution, frame, noise_power)))
    else:
        analytic = float(np.mean(per_user > 0))
    return SerReport(
        ser_analytic=analytic,
        ser_mc=errors / total,
        mc_ci95=wilson_interval(errors, total),
        trials=int(trials),
        omega=float(np.mean(np.abs(solution.received) ** 2)),
        phi=float(phi),
        errors=errors,
        per_user_ser=per_user / float(trials),
    )


def simulate_until(draw, noise_power, rng, min_errors=100, max_symbols=10 ** 8, draws_per_trial=2000, phi=0.0):
    """
    Error-count-targeted simulation over fresh channel and symbol draws.

    Trial t calls ``draw(rng.substream(t))`` for a (solution, frame) pair and
    simulates ``draws_per_trial`` noisy observations per user. Trials are
    added until ``min_errors`` errors are seen or ``max_symbols`` symbols are
    simulated.

    Args:
        draw (callable): Maps an RngStream to (PrecodeSolution, SymbolFrame)
        noise_power (float): Noise power
        rng (RngStream): Random stream
        min_errors (int): Error count to reach
        max_symbols (int): Cap on simulated symbols
        draws_per_trial (int): Noise draws per channel draw
        phi (float): Margin recorded in the report

    Returns:
        SerReport: Aggregate report; ``trials`` counts simulated symbols
    """
    errors = 0
    symbols = 0
    analytic = []
    omegas = []
    trial = 0
    while errors < min_errors and symbols < max_symbols:
        trial_rng = rng.substream(trial)
        solution, frame = draw(trial_rng.substream(0))
        draws = int(min(draws_per_trial, max(1, (max_symbols - symbols) // solution.n_users)))
        per_user = count_errors(solution, frame, noise_power, draws, trial_rng.substream(1).generator())
        errors += int(np.sum(per_user))
        symbols += draws * solution.n_users
        analytic.append(np.mean(conditional_ser(solution, frame, noise_power)))
        omegas.append(np.mean(np.abs(solution.received) ** 2))
        trial += 1
    if errors < min_errors:
        logger.warning(f"Simulation capped at {symbols} symbols with {errors} errors (wanted {min_errors})")
    logger.debug(f"Simulated {trial} channel draws, {symbols} symbols, {errors} errors")
    return SerReport(
        ser_analytic=float(np.mean(analytic)),
        ser_mc=errors / symbols,
        mc_ci95=wilson_interval(errors, symbols),
        trials=symbols,
        omega=float(np.mean(omegas)),
        phi=float(phi),
        errors=errors,
    )
