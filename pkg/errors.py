#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Exception taxonomy shared by the precoding library, the harness and the CLI.
"""


class CIPrecodeError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(CIPrecodeError, ValueError):
    """A documented precondition of an operation was violated."""


class AmbiguousDetectionError(ParameterError):
    """The received sample is zero and belongs to no detection sector."""


class GridCapacityError(ParameterError):
    """A per-user phase grid would exceed the candidate cap."""


class CapabilityError(ParameterError):
    """The request is outside the problem size a solver supports."""


class ConfigError(CIPrecodeError):
    """Invalid scenario configuration (unknown keys, bad values, unknown id)."""


class NumericalError(CIPrecodeError, ArithmeticError):
    """A numerical procedure failed to produce a trustworthy result."""


class RankDeficiencyError(NumericalError):
    """The channel matrix does not have full row rank."""


class InfeasibleError(NumericalError):
    """The optimization problem has no feasible point."""
