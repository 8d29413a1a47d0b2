#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Rayleigh block-fading channels, additive white Gaussian noise and
reproducible random streams.
"""

import logging
from dataclasses import dataclass

import numpy as np

from errors import ParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RngStream:
    """
    Reproducible random stream identified by (seed, stream id, trial path).

    Two streams with equal fields always produce identical draws, so a
    per-trial substream gives the same numbers whether trials run serially
    or on a thread pool.
    """

    seed: int
    stream: int = 0
    path: tuple = ()

    def __post_init__(self):
        if int(self.seed) < 0 or int(self.stream) < 0:
            raise ParameterError(f"seed and stream id must be non-negative, got ({self.seed}, {self.stream})")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "stream", int(self.stream))
        object.__setattr__(self, "path", tuple(int(p) for p in self.path))

    def substream(self, trial):
        """Child stream keyed by a trial index."""
        if int(trial) < 0:
            raise ParameterError(f"trial index must be non-negative, got {trial}")
        return RngStream(self.seed, self.stream, self.path + (int(trial),))

    def generator(self):
        """
        Fresh numpy Generator positioned at the start of this stream.

        Returns:
            numpy.random.Generator: PCG64 generator
        """
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream,) + self.path)
        return np.random.Generator(np.random.PCG64(sequence))


@dataclass(frozen=True, eq=False)
class ChannelMatrix:
    """
    K x M complex channel H; row j is the channel h_j of user j.
    """

    matrix: np.ndarray
    channel_power: float = 1.0

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=complex, ndmin=2)
        if matrix.ndim != 2 or matrix.shape[0] < 1 or matrix.shape[1] < 1:
            raise ParameterError(f"channel matrix must be K x M with K, M >= 1, got shape {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise ParameterError("channel matrix has non-finite entries")
        zero_rows = np.flatnonzero(np.all(matrix == 0, axis=1))
        if zero_rows.size:
            raise ParameterError(f"channel rows {zero_rows.tolist()} are all zero")
        if self.channel_power <= 0:
            raise ParameterError(f"channel_power must be positive, got {self.channel_power}")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "channel_power", float(self.channel_power))

    @property
    def n_users(self):
        return self.matrix.shape[0]

    @property
    def n_antennas(self):
        return self.matrix.shape[1]

    @property
    def row_norms(self):
        return np.linalg.norm(self.matrix, axis=1)

    def row(self, j):
        return self.matrix[j]


def draw_channel(n_users, n_antennas, channel_power, rng):
    """
    Draw a channel with i.i.d. CN(0, channel_power) entries.

    Args:
        n_users (int): Number of users K
        n_antennas (int): Number of transmit antennas M
        channel_power (float): Per-entry variance, linear scale
        rng (RngStream): Random stream

    Returns:
        ChannelMatrix: The drawn channel

    Raises:
        ParameterError: If ``channel_power`` is not positive
    """
    if channel_power <= 0:
        raise ParameterError(f"channel_power must be positive, got {channel_power}")
    if int(n_users) < 1 or int(n_antennas) < 1:
        raise ParameterError(f"need K >= 1 and M >= 1, got K={n_users}, M={n_antennas}")

    generator = rng.generator()
    scale = np.sqrt(channel_power / 2.0)
    shape = (int(n_users), int(n_antennas))
    matrix = scale * (generator.standard_normal(shape) + 1j * generator.standard_normal(shape))
    return ChannelMatrix(matrix, channel_power)


def complex_noise(shape, noise_power, generator):
    """CN(0, noise_power) samples from an existing generator."""
    scale = np.sqrt(noise_power / 2.0)
    return scale * (generator.standard_normal(shape) + 1j * generator.standard_normal(shape))


def add_noise(y, noise_power, rng):
    """
    Add independent CN(0, noise_power) noise to every component of ``y``.

    Args:
        y (array-like): Complex samples
        noise_power (float): Noise variance sigma^2 >= 0
        rng (RngStream): Random stream

    Returns:
        numpy.ndarray: Noisy samples; ``y`` itself when the noise power is 0
    """
    if noise_power < 0:
        raise ParameterError(f"noise power must be non-negative, got {noise_power}")
    y = np.asarray(y, dtype=complex)
    if noise_power == 0:
        return y.copy()
    return y + complex_noise(y.shape, noise_power, rng.generator())
