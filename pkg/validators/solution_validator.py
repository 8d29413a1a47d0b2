#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Solution Validator module for checking precoder outputs and result tables.
"""

import logging

import numpy as np

from config import Config
from errors import NumericalError
from precoders.fixed_phase import as_channel_array, lagrangian_residual
from signals.constellation import wrap_angle

logger = logging.getLogger(__name__)


class SolutionValidator:
    """Validates precoding solutions and result tables for consistency."""

    def __init__(self, config):
        """
        Initialize the Solution Validator.

        Args:
            config (Config): Configuration object
        """
        self.config = config
        self.power_tol = config.power_tol
        self.amplitude_tol = config.amplitude_tol
        self.tight_tol = config.tight_tol
        self.span_tol = config.span_tol
        self.angle_tol = config.angle_tol
        self.residual_tol = config.residual_tol

    def validate(self, H, frame, solution, spec, strict=False):
        """
        Check every invariant of a constructive-interference solution.

        Args:
            H (ChannelMatrix or array-like): Channel the solution was built for
            frame (SymbolFrame): Data symbols
            solution (PrecodeSolution): Solution to check
            spec (TargetSpec): Targets and margins it must satisfy
            strict (bool): Raise instead of only logging findings

        Returns:
            dict: Validation results with the list of ``validation_errors``

        Raises:
            NumericalError: In strict mode, if any check fails
        """
        H = as_channel_array(H)
        n_users = H.shape[0]
        results = {
            'users': n_users,
            'power_error': 0.0,
            'span_residual': 0.0,
            'min_amplitude_slack': 0.0,
            'validation_errors': [],
        }

        # Power bookkeeping
        actual = float(np.vdot(solution.x, solution.x).real)
        results['power_error'] = abs(actual - solution.power)
        if results['power_error'] > self.power_tol * max(1.0, actual):
            results['validation_errors'].append(
                f"Reported power {solution.power:.12g} differs from |x|^2 = {actual:.12g}")

        # Received points must match the channel
        received = H @ solution.x
        if not np.allclose(received, solution.received, rtol=1e-9, atol=1e-12):
            results['validation_errors'].append("Received points do not match H x")

        # Sector membership
        phi1, phi2 = spec.margins(n_users)
        offsets = wrap_angle(np.angle(received) - frame.angles)
        outside = np.flatnonzero((offsets < -phi1 - self.angle_tol) | (offsets > phi2 + self.angle_tol))
        if outside.size:
            results['validation_errors'].append(
                f"Users {outside.tolist()} received outside their relaxed sector")

        # Amplitude thresholds and tightness
        required = spec.noise_power * spec.zeta * np.ones(n_users)
        received_power = np.abs(received) ** 2
        slack = received_power - required
        results['min_amplitude_slack'] = float(np.min(slack))
        short = np.flatnonzero(slack < -self.amplitude_tol)
        if short.size:
            results['validation_errors'].append(f"Users {short.tolist()} are below their SNR target")
        if np.min(received_power / required) - 1.0 > self.tight_tol:
            results['validation_errors'].append("No amplitude constraint is tight; the solution could shrink")

        # The transmit vector lies in the span of the channels
        coefficients = np.linalg.lstsq(H.conj().T, solution.x, rcond=None)[0]
        residual = float(np.linalg.norm(solution.x - H.conj().T @ coefficients))
        results['span_residual'] = residual
        if residual > self.span_tol * max(1.0, np.linalg.norm(solution.x)):
            results['validation_errors'].append(f"Transmit vector leaves the channel span by {residual:.3e}")

        # Optimality equations, for solutions that carry a dual certificate
        if solution.dual is not None and solution.thresholds is not None:
            stationarity = float(np.max(np.abs(lagrangian_residual(H, frame, solution))))
            results['lagrangian_residual'] = stationarity
            if stationarity > self.residual_tol:
                results['validation_errors'].append(f"Lagrangian residual {stationarity:.3e} exceeds {self.residual_tol:g}")

        for message in results['validation_errors']:
            logger.warning(message)
        if strict and results['validation_errors']:
            raise NumericalError("; ".join(results['validation_errors']))
        return results

    def validate_table(self, table, strict=True):
        """
        Validate a result table before it is written.

        Args:
            table (ResultTable): Table to validate
            strict (bool): Raise on findings

        Returns:
            ResultTable: The same table, with the findings in its metadata
        """
        df = table.frame
        results = {'total_rows': len(df), 'validation_errors': []}

        missing = [col for col in table.columns if col not in df.columns]
        extra = [col for col in df.columns if col not in table.columns]
        if missing or extra:
            results['validation_errors'].append(f"Schema mismatch: missing {missing}, unexpected {extra}")

        nan_cells = int(df.isnull().sum().sum())
        if nan_cells:
            results['validation_errors'].append(f"Found {nan_cells} NaN cells")
        numeric = df.select_dtypes(include=[np.number])
        infinite = int((~np.isfinite(numeric.to_numpy(dtype=float))).sum()) - int(numeric.isnull().sum().sum())
        if infinite:
            results['validation_errors'].append(f"Found {infinite} infinite cells")

        for message in results['validation_errors']:
            logger.warning(message)
        logger.info(f"Validation complete for {table.scenario}: "
                    f"{results['total_rows']} rows, {len(results['validation_errors'])} findings")
        if strict and results['validation_errors']:
            raise NumericalError(f"Result table for {table.scenario} failed validation: "
                                 + "; ".join(results['validation_errors']))
        table.metadata['validation_results'] = results
        return table


def validate_solution(H, frame, solution, spec, config=None, strict=False):
    """Validate one solution with the default tolerances unless a config is given."""
    if config is None:
        config = Config(create_dirs=False)
    return SolutionValidator(config).validate(H, frame, solution, spec, strict)
