#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
M-PSK constellations, angular detection regions and nearest-sector detection.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from errors import AmbiguousDetectionError, ParameterError

logger = logging.getLogger(__name__)

# Boundary tolerance for sector membership tests
ANGLE_TOL = 1e-12


def wrap_angle(angle):
    """
    Map angles to their representative in (-pi, pi].

    Args:
        angle (float or numpy.ndarray): Angle(s) in radians

    Returns:
        float or numpy.ndarray: Wrapped angle(s)
    """
    wrapped = np.pi - np.mod(np.pi - np.asarray(angle, dtype=float), 2.0 * np.pi)
    return wrapped[()]


def default_offset(order):
    """Rotation of the first point: QPSK sits on the diagonals, the rest start at 0."""
    return np.pi / 4.0 if order == 4 else 0.0


@dataclass(frozen=True)
class DetectionRegion:
    """
    Angular sector [center - half_width, center + half_width].

    A zero half-width is the single ray at ``center_angle``.
    """

    center_angle: float
    half_width: float

    def __post_init__(self):
        if not (0.0 <= self.half_width <= np.pi):
            raise ParameterError(f"half_width must lie in [0, pi], got {self.half_width}")
        object.__setattr__(self, "center_angle", float(wrap_angle(self.center_angle)))

    @property
    def lower(self):
        return wrap_angle(self.center_angle - self.half_width)

    @property
    def upper(self):
        return wrap_angle(self.center_angle + self.half_width)

    def contains(self, angle, tol=ANGLE_TOL):
        """Check membership of an angle using the wrapped difference to the center."""
        return bool(abs(wrap_angle(angle - self.center_angle)) <= self.half_width + tol)


@dataclass(frozen=True)
class Constellation:
    """
    Unit-modulus M-PSK constellation with points e^{i(2 pi m / M + offset)}.
    """

    order: int
    offset: float = None
    points: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 2:
            raise ParameterError(f"M-PSK order must be an integer >= 2, got {self.order}")
        object.__setattr__(self, "order", int(self.order))
        offset = default_offset(self.order) if self.offset is None else float(self.offset)
        # Points sorted by angle in [0, 2 pi) need the offset inside the first slot
        offset = float(np.mod(offset, 2.0 * np.pi / self.order))
        object.__setattr__(self, "offset", offset)
        angles = 2.0 * np.pi * np.arange(self.order) / self.order + offset
        points = np.exp(1j * angles)
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    @property
    def half_width(self):
        """Half-width of the strict detection sector, pi / M."""
        return np.pi / self.order

    @property
    def bits_per_symbol(self):
        return float(np.log2(self.order))

    @property
    def angles(self):
        return np.angle(self.points)

    def region(self, index):
        """Strict detection region of a constellation point."""
        return DetectionRegion(float(np.angle(self.points[index])), self.half_width)

    def index_of(self, symbol, tol=1e-9):
        """
        Look up the index of a constellation point.

        Args:
            symbol (complex): A point of this constellation
            tol (float): Distance tolerance

        Returns:
            int: Index of the point

        Raises:
            ParameterError: If ``symbol`` is not a constellation point
        """
        distances = np.abs(self.points - symbol)
        index = int(np.argmin(distances))
        if distances[index] > tol:
            raise ParameterError(f"{symbol} is not a point of {self.order}-PSK")
        return index


@dataclass(frozen=True, eq=False)
class SymbolFrame:
    """
    One symbol period of data: a constellation index per user.
    """

    indices: np.ndarray
    constellation: Constellation

    def __post_init__(self):
        indices = np.asarray(self.indices, dtype=int).reshape(-1)
        if indices.size == 0:
            raise ParameterError("a symbol frame needs at least one user")
        if np.any(indices < 0) or np.any(indices >= self.constellation.order):
            raise ParameterError(f"symbol indices {indices.tolist()} outside 0..{self.constellation.order - 1}")
        indices.setflags(write=False)
        object.__setattr__(self, "indices", indices)

    @classmethod
    def from_indices(cls, indices, constellation):
        return cls(np.asarray(indices, dtype=int), constellation)

    @classmethod
    def from_symbols(cls, symbols, constellation):
        """Build a frame from complex symbols that are constellation points."""
        return cls(np.array([constellation.index_of(s) for s in np.ravel(symbols)]), constellation)

    @property
    def symbols(self):
        return self.constellation.points[self.indices]

    @property
    def angles(self):
        return np.angle(self.symbols)

    def __len__(self):
        return int(self.indices.size)


def draw_frame(n_users, constellation, rng):
    """
    Draw independent, uniformly distributed symbols for every user.

    Args:
        n_users (int): Number of users K
        constellation (Constellation): Modulation
        rng (RngStream): Random stream

    Returns:
        SymbolFrame: The drawn frame
    """
    generator = rng.generator()
    return SymbolFrame(generator.integers(0, constellation.order, size=int(n_users)), constellation)


def sector_of(symbol, phi1, phi2, constellation):
    """
    Relaxed detection region [angle(d) - phi1, angle(d) + phi2].

    Args:
        symbol (complex): Data symbol d
        phi1 (float): Clockwise margin, 0 <= phi1 <= pi / M
        phi2 (float): Counter-clockwise margin, 0 <= phi2 <= pi / M
        constellation (Constellation): Modulation of ``symbol``

    Returns:
        DetectionRegion: The relaxed region

    Raises:
        ParameterError: If a margin is negative or leaves the strict sector
    """
    limit = constellation.half_width
    for name, margin in (("phi1", phi1), ("phi2", phi2)):
        if margin < 0.0 or margin > limit + ANGLE_TOL:
            raise ParameterError(f"{name}={margin} outside [0, pi/{constellation.order}]")
    center = np.angle(symbol) + 0.5 * (phi2 - phi1)
    return DetectionRegion(float(center), 0.5 * (phi1 + phi2))


def detect_many(received, constellation):
    """
    Nearest-sector detection of many samples.

    Args:
        received (array-like): Complex received samples
        constellation (Constellation): Modulation

    Returns:
        numpy.ndarray: Constellation indices, ties resolved to the lower index

    Raises:
        AmbiguousDetectionError: If any sample is exactly zero
    """
    received = np.asarray(received, dtype=complex)
    if np.any(received == 0):
        raise AmbiguousDetectionError("received sample 0 lies in no detection sector")
    distance = np.abs(wrap_angle(np.angle(received)[..., np.newaxis] - constellation.angles))
    # argmin returns the first minimum, so exact boundary ties go to the lower index
    return np.argmin(distance, axis=-1)


def detect(received, constellation):
    """
    Detect a single received sample.

    Args:
        received (complex): Received sample y
        constellation (Constellation): Modulation

    Returns:
        int: Index of the detected constellation point
    """
    return int(detect_many(np.array([received]), constellation)[0])
