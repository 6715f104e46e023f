import numpy as np
import pytest

from core.errors import ConfigError, UsageError
from core.tensor import Tensor
from models.struct_element import StructElement
from morphology.flat import close_flat, dilate_flat, erode_flat, open_flat
from tests.oracles import extremum_oracle

SIZES = [4, 5, 6, 7, 8]
WINDOWS = [1, 3, 5]


def _volume(rng, extent, channels=1):
    return rng.normal(size=(1, channels, extent, extent, extent))


@pytest.mark.parametrize("extent", SIZES)
@pytest.mark.parametrize("window", WINDOWS)
def test_flat_operators_match_oracles_bitwise(rng, extent, window):
    se = StructElement.flat((window,) * 3)
    for _ in range(7):
        volume = _volume(rng, extent)
        eroded = extremum_oracle("min", volume, se.window)
        dilated = extremum_oracle("max", volume, se.window)
        assert np.array_equal(erode_flat(Tensor(volume), se).data, eroded)
        assert np.array_equal(dilate_flat(Tensor(volume), se).data, dilated)
        assert np.array_equal(open_flat(Tensor(volume), se).data, extremum_oracle("max", eroded, se.window))
        assert np.array_equal(close_flat(Tensor(volume), se).data, extremum_oracle("min", dilated, se.window))


@pytest.mark.parametrize("method", ["scan", "separable"])
def test_duality(rng, method):
    se = StructElement.flat((3, 3, 3))
    for _ in range(20):
        volume = _volume(rng, 6, channels=2)
        assert np.array_equal(dilate_flat(Tensor(volume), se, method).data,
                              -erode_flat(Tensor(-volume), se, method).data)


def test_opening_and_closing_are_idempotent(rng):
    se = StructElement.flat((3, 3, 3))
    for _ in range(20):
        image = Tensor(_volume(rng, 6))
        opened = open_flat(image, se)
        closed = close_flat(image, se)
        assert np.array_equal(open_flat(opened, se).data, opened.data)
        assert np.array_equal(close_flat(closed, se).data, closed.data)


def test_open_identity_close_sandwich(rng):
    se = StructElement.flat((3, 3, 3))
    for _ in range(20):
        volume = _volume(rng, 6)
        assert np.all(open_flat(Tensor(volume), se).data <= volume)
        assert np.all(close_flat(Tensor(volume), se).data >= volume)


def test_monotonicity(rng):
    se = StructElement.flat((3, 3, 3))
    for _ in range(20):
        low = _volume(rng, 5)
        high = low + rng.uniform(0.0, 1.0, low.shape)
        for op in (erode_flat, dilate_flat, open_flat, close_flat):
            assert np.all(op(Tensor(low), se).data <= op(Tensor(high), se).data)


def test_translation_invariance_in_interior(rng):
    se = StructElement.flat((3, 3, 3))
    big = rng.normal(size=(1, 1, 9, 8, 8))
    first = erode_flat(Tensor(big[:, :, 0:8]), se).data
    shifted = erode_flat(Tensor(big[:, :, 1:9]), se).data
    assert np.array_equal(shifted[:, :, 1:6, 1:-1, 1:-1], first[:, :, 2:7, 1:-1, 1:-1])


def test_repeated_erosion_equals_grown_window(rng):
    volume = Tensor(_volume(rng, 7))
    twice = erode_flat(erode_flat(volume, StructElement.flat((3, 3, 3))), StructElement.flat((3, 3, 3)))
    once = erode_flat(volume, StructElement.flat((5, 5, 5)))
    assert np.array_equal(twice.data, once.data)


def test_flat_ops_reject_chm_elements(rng):
    with pytest.raises(UsageError):
        erode_flat(Tensor(_volume(rng, 4)), StructElement.chm(1, (3, 3, 3), rng))


def test_even_window_is_config_error():
    with pytest.raises(ConfigError):
        StructElement.flat((3, 4, 3))
