#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Result table produced by a scenario run.
"""

import logging

import numpy as np
import pandas as pd

from errors import NumericalError, ParameterError

logger = logging.getLogger(__name__)

# Metadata written as '#' comment lines, in this order
CSV_METADATA_KEYS = ('scenario', 'seed', 'version', 'trials', 'config_digest')


class ResultTable:
    """Fixed-schema table of numeric results plus run metadata."""

    def __init__(self, scenario, columns, rows=None, metadata=None):
        """
        Initialize a result table.

        Args:
            scenario (str): Scenario id
            columns (list): Column names, in output order
            rows (list, optional): Row dicts or sequences matching ``columns``
            metadata (dict, optional): Seed, version, timestamp and similar
        """
        if len(set(columns)) != len(columns):
            raise ParameterError(f"duplicate column names in {columns}")
        self.scenario = scenario
        self.columns = list(columns)
        self.metadata = dict(metadata or {})
        self.metadata.setdefault('scenario', scenario)
        self.frame = pd.DataFrame(columns=self.columns, dtype=float)
        for row in rows or []:
            self.add_row(row)

    def add_row(self, row):
        """
        Append one row.

        Args:
            row (dict or sequence): Values for every column

        Raises:
            NumericalError: If a value is NaN
        """
        if isinstance(row, dict):
            unknown = set(row) - set(self.columns)
            if unknown:
                raise ParameterError(f"row has columns outside the schema: {sorted(unknown)}")
            values = [row.get(col, np.nan) for col in self.columns]
        else:
            values = list(row)
            if len(values) != len(self.columns):
                raise ParameterError(f"row has {len(values)} values for {len(self.columns)} columns")
        values = np.asarray(values, dtype=float)
        if np.any(np.isnan(values)):
            missing = [col for col, value in zip(self.columns, values) if np.isnan(value)]
            raise NumericalError(f"NaN result in columns {missing} of {self.scenario}")
        self.frame.loc[len(self.frame)] = values

    def column(self, name):
        return self.frame[name].to_numpy(dtype=float)

    def __len__(self):
        return len(self.frame)

    def equals(self, other):
        """Same scenario, schema and values."""
        return (self.scenario == other.scenario and self.columns == other.columns
                and self.frame.reset_index(drop=True).equals(other.frame.reset_index(drop=True)))
