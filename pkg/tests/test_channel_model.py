#!/usr/bin/env python
# -*- coding: utf-8 -*-

import numpy as np
import pytest

from errors import ParameterError
from signals.channel_model import ChannelMatrix, RngStream, add_noise, draw_channel


def test_shape_and_determinism(rng):
    first = draw_channel(2, 3, 1.0, rng)
    second = draw_channel(2, 3, 1.0, rng)
    assert first.matrix.shape == (2, 3)
    assert first.n_users == 2 and first.n_antennas == 3
    assert np.array_equal(first.matrix, second.matrix)


def test_entry_power():
    H = draw_channel(1000, 1000, 4.0, RngStream(5))
    assert np.mean(np.abs(H.matrix) ** 2) == pytest.approx(4.0, rel=0.01)


def test_rejects_bad_parameters(rng):
    with pytest.raises(ParameterError):
        draw_channel(2, 3, 0.0, rng)
    with pytest.raises(ParameterError):
        ChannelMatrix(np.array([[1.0, 0.0], [0.0, 0.0]]))
    with pytest.raises(ParameterError):
        ChannelMatrix(np.array([[np.nan, 1.0]]))
    with pytest.raises(ParameterError):
        RngStream(-1)


def test_zero_noise_is_identity(rng):
    y = np.array([1 + 2j, -0.5j])
    assert np.array_equal(add_noise(y, 0.0, rng), y)


def test_noise_moments(rng):
    noise = add_noise(np.zeros(10 ** 6, dtype=complex), 2.5, rng)
    assert np.var(noise) == pytest.approx(2.5, rel=0.01)
    assert abs(np.corrcoef(noise.real, noise.imag)[0, 1]) < 0.01


def test_streams_are_distinct_and_uncorrelated():
    a = RngStream(9, 0).generator().standard_normal(10 ** 5)
    b = RngStream(9, 1).generator().standard_normal(10 ** 5)
    c = RngStream(9, 0).substream(1).generator().standard_normal(10 ** 5)
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.02
    assert abs(np.corrcoef(a, c)[0, 1]) < 0.02
    assert abs(np.corrcoef(a[:-1], a[1:])[0, 1]) < 0.02


def test_substreams_reproduce():
    stream = RngStream(2016).substream(4)
    assert np.array_equal(stream.generator().random(3), RngStream(2016, 0, (4,)).generator().random(3))
