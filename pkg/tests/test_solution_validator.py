#!/usr/bin/env python
# -*- coding: utf-8 -*-

from dataclasses import replace

import numpy as np
import pytest

from errors import NumericalError
from loaders.result_table import ResultTable
from precoders.fixed_phase import TargetSpec, cipm
from precoders.relaxed import cipmr_equal_margin, cipmr_per_user
from signals.constellation import SymbolFrame
from validators.solution_validator import SolutionValidator, validate_solution


def test_valid_solutions_pass(mock_config, channel, qpsk):
    validator = SolutionValidator(mock_config)
    frame = SymbolFrame.from_indices([1, 3], qpsk)
    strict = cipm(channel, frame, TargetSpec.strict(3.0))
    assert validator.validate(channel, frame, strict, TargetSpec.strict(3.0), strict=True)['validation_errors'] == []
    relaxed = cipmr_equal_margin(channel, frame, TargetSpec.strict(3.0), np.pi / 5)
    results = validator.validate(channel, frame, relaxed, TargetSpec.equal_margin(3.0, np.pi / 5), strict=True)
    assert results['span_residual'] <= 1e-8


def test_findings_are_reported(mock_config, channel, qpsk):
    validator = SolutionValidator(mock_config)
    frame = SymbolFrame.from_indices([0, 2], qpsk)
    spec = TargetSpec.strict(3.0)
    solution = cipm(channel, frame, spec)

    wrong_power = replace(solution, power=solution.power * 2)
    assert any('power' in e for e in validator.validate(channel, frame, wrong_power, spec)['validation_errors'])

    loose = replace(solution, x=2 * solution.x, received=2 * solution.received, power=4 * solution.power)
    assert any('tight' in e for e in validator.validate(channel, frame, loose, spec)['validation_errors'])

    rotated = replace(solution, x=1j * solution.x, received=1j * solution.received)
    with pytest.raises(NumericalError):
        validator.validate(channel, frame, rotated, spec, strict=True)


def test_module_level_helper(channel, qpsk):
    frame = SymbolFrame.from_indices([0, 1], qpsk)
    spec = TargetSpec.strict(2.0)
    assert validate_solution(channel, frame, cipm(channel, frame, spec), spec)['validation_errors'] == []


def test_table_validation(mock_config):
    validator = SolutionValidator(mock_config)
    table = ResultTable('demo', ['a', 'b'], rows=[[1.0, 2.0]])
    assert validator.validate_table(table).metadata['validation_results']['validation_errors'] == []
    table.add_row([np.inf, 1.0])
    with pytest.raises(NumericalError):
        validator.validate_table(table)


def test_dual_certificate_is_checked(mock_config, channel, qpsk):
    validator = SolutionValidator(mock_config)
    frame = SymbolFrame.from_indices([3, 0], qpsk)
    spec = TargetSpec.per_user(3.0, np.pi / 5, np.pi / 5)
    relaxed = cipmr_per_user(channel, frame, spec, np.pi / 40)
    results = validator.validate(channel, frame, relaxed, spec, strict=True)
    assert results['lagrangian_residual'] <= 1e-6

    tampered = replace(relaxed, dual=1.1 * relaxed.dual)
    findings = validator.validate(channel, frame, tampered, spec)['validation_errors']
    assert any('Lagrangian' in e for e in findings)
    assert 'lagrangian_residual' not in validator.validate(channel, frame, replace(relaxed, dual=None), spec)
