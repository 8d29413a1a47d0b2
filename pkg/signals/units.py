#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Decibel conversions. Every dB value entering the package goes through here.
"""

import numpy as np


def db_to_linear(value_db):
    """
    Convert a power ratio from dB to linear scale.

    Args:
        value_db (float or array-like): Value in dB

    Returns:
        float or numpy.ndarray: 10 ** (value_db / 10)
    """
    return np.power(10.0, np.asarray(value_db, dtype=float) / 10.0)[()]


def linear_to_db(value):
    """
    Convert a positive power ratio from linear scale to dB.

    Args:
        value (float or array-like): Linear value, > 0

    Returns:
        float or numpy.ndarray: 10 * log10(value)
    """
    return (10.0 * np.log10(np.asarray(value, dtype=float)))[()]
