#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
CSV Loader module for writing result tables and reading them back.
"""

import io
import logging
import os

import pandas as pd

from errors import ParameterError
from loaders.result_table import CSV_METADATA_KEYS, ResultTable

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.12g'


def format_csv(table, stamp=False, float_format=FLOAT_FORMAT):
    """
    Render a table as CSV text: '#' metadata lines, a header row, then rows.

    Args:
        table (ResultTable): Table to render
        stamp (bool): Include the run timestamp in the metadata
        float_format (str): Number format, 12 significant digits by default

    Returns:
        str: CSV text with '\\n' line endings
    """
    keys = list(CSV_METADATA_KEYS) + (['timestamp'] if stamp else [])
    lines = [f"# {key}: {table.metadata[key]}" for key in keys if key in table.metadata]
    body = table.frame.to_csv(index=False, float_format=float_format, lineterminator='\n')
    return '\n'.join(lines + [body.rstrip('\n')]) + '\n'


def emit_csv(table, path, stamp=False, float_format=FLOAT_FORMAT):
    """
    Write a table to ``path``.

    Args:
        table (ResultTable): Table to write
        path (str): Destination file
        stamp (bool): Include the run timestamp
        float_format (str): Number format

    Raises:
        OSError: If the file cannot be written, with the path in the message
    """
    text = format_csv(table, stamp, float_format)
    try:
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='') as handle:
            handle.write(text)
    except OSError as e:
        logger.error(f"Error writing results to {path}: {str(e)}")
        raise OSError(f"cannot write {path}: {e}") from e
    logger.info(f"Wrote {len(table)} rows to {path}")


def read_csv(path):
    """
    Parse a file written by ``emit_csv``.

    Args:
        path (str): CSV file

    Returns:
        ResultTable: Values and metadata of the file
    """
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            text = handle.read()
    except OSError as e:
        logger.error(f"Error reading results from {path}: {str(e)}")
        raise OSError(f"cannot read {path}: {e}") from e

    metadata = {}
    for line in text.splitlines():
        if not line.startswith('#'):
            break
        key, _, value = line[1:].partition(':')
        metadata[key.strip()] = value.strip()
    df = pd.read_csv(io.StringIO(text), comment='#', dtype=float)
    if 'scenario' not in metadata:
        raise ParameterError(f"{path} has no scenario metadata")
    table = ResultTable(metadata['scenario'], list(df.columns), metadata=metadata)
    for row in df.itertuples(index=False):
        table.add_row(list(row))
    return table


class CsvLoader:
    """Writes scenario result tables to the configured output directory."""

    def __init__(self, config):
        """
        Initialize the CSV Loader.

        Args:
            config (Config): Configuration object
        """
        self.config = config
        self.output_dir = config.output_dir
        self.float_format = config.float_format

    def default_path(self, table):
        return os.path.join(self.output_dir, f"{table.scenario}.csv")

    def export(self, table, path=None, stamp=False):
        """
        Export a table as CSV.

        Args:
            table (ResultTable): Table to export
            path (str, optional): Destination; ``<output_dir>/<scenario>.csv`` by default
            stamp (bool): Include the run timestamp

        Returns:
            str: Path of the written file
        """
        if table is None:
            raise ParameterError("No table to export")
        path = path or self.default_path(table)
        emit_csv(table, path, stamp=stamp, float_format=self.float_format)
        return path
