import numpy as np
import pytest

from core.errors import ConfigError, ShapeError, VolumeFormatError, VolumeIOError, VolumeTruncatedError
from core.tensor import Tensor
from data.normalize import normalize_clip
from data.pgm import mid_slices, to_gray, write_mid_slices
from data.synthetic import class_intensity, gen_synthetic
from data.volume_io import load_volume, save_volume, volume_path
from models.volume import SynthSpec, VolumeSample


def _small_spec(**overrides):
    settings = dict(extent=(16, 16, 16), num_samples=3, radius_range=(5.0, 7.0), nesting_margins=(1.5, 1.5))
    settings.update(overrides)
    return SynthSpec(**settings)


def test_generation_is_deterministic():
    first = gen_synthetic(_small_spec(seed=4))
    second = gen_synthetic(_small_spec(seed=4))
    for a, b in zip(first, second):
        assert a.id == b.id
        assert np.array_equal(a.image, b.image)
        assert np.array_equal(a.label, b.label)


def test_two_class_noise_free_volume_thresholds_to_label():
    for sample in gen_synthetic(_small_spec(num_classes=2, noise_sigma=0.0)):
        levels = np.unique(sample.image)
        assert levels.tolist() == [1.0, 2.0]
        assert np.array_equal((sample.image[0] > 1.5).astype(np.int64), sample.label)


@pytest.mark.parametrize("seed", range(10))
def test_every_class_covers_one_percent(seed):
    for sample in gen_synthetic(_small_spec(seed=seed, num_classes=4)):
        fractions = np.bincount(sample.label.ravel(), minlength=4) / sample.label.size
        assert np.all(fractions >= 0.01)


def test_channel_intensities():
    assert class_intensity(np.array([0, 3]), 0).tolist() == [1.0, 4.0]
    assert class_intensity(np.array([1]), 2).tolist() == [3.0]


@pytest.mark.parametrize("overrides", [
    {"radius_range": (2.0, 3.0), "nesting_margins": (1.5, 1.5)},
    {"nesting_margins": (1.5,)},
    {"extent": (16, 16)},
    {"noise_sigma": -0.1},
    {"ellipsoid_count": (2, 1)},
])
def test_infeasible_specs(overrides):
    with pytest.raises(ConfigError):
        _small_spec(**overrides)


def test_unsatisfiable_class_fraction():
    with pytest.raises(ConfigError):
        gen_synthetic(_small_spec(num_samples=1, min_class_fraction=0.6, max_attempts=3))


def test_normalize_constant_channel_is_zero():
    image = np.full((2, 3, 3, 3), 5.0)
    image[1] = np.arange(27.0).reshape(3, 3, 3) + 1.0
    out = normalize_clip(image)
    assert np.array_equal(out[0], np.zeros((3, 3, 3)))
    assert np.any(out[1] != 0)


def test_normalize_statistics(rng):
    image = rng.normal(size=(2, 6, 6, 6))
    out = normalize_clip(image, clip=np.inf)
    for channel in out:
        assert abs(channel.mean()) < 1e-10
        assert abs(channel.std() - 1.0) < 1e-6


def test_normalize_masks_and_clips(rng):
    image = rng.normal(size=(1, 6, 6, 6))
    image[0, 0] = 0.0
    image[0, 5, 5, 5] = 1e6
    out = normalize_clip(Tensor(image))
    assert isinstance(out, Tensor)
    assert np.all(out.data[0, 0] == 0.0)
    assert out.data.min() >= -5.0 and out.data.max() <= 5.0


def test_normalize_rejects_bad_input():
    with pytest.raises(ShapeError):
        normalize_clip(np.ones((3, 3, 3)))
    with pytest.raises(ConfigError):
        normalize_clip(np.full((1, 2, 2, 2), np.nan))


def test_volume_round_trip_is_bitwise(tmp_path, rng):
    sample = VolumeSample(image=rng.normal(size=(2, 4, 5, 6)), label=rng.integers(0, 3, size=(4, 5, 6)),
                          id="vol", num_classes=3)
    path = volume_path(str(tmp_path), sample.id)
    save_volume(path, sample)
    restored = load_volume(path)
    assert restored.id == "vol" and restored.num_classes == 3
    assert np.array_equal(restored.image, sample.image)
    assert np.array_equal(restored.label, sample.label)
    assert open(path, "rb").read(5) == b"MORV1"


def _saved_volume(tmp_path, rng):
    sample = VolumeSample(image=rng.normal(size=(1, 3, 3, 3)), label=np.zeros((3, 3, 3)), id="v", num_classes=2)
    path = tmp_path / "v.morv"
    save_volume(str(path), sample)
    return path


def test_corrupted_magic_names_expected_format(tmp_path, rng):
    path = _saved_volume(tmp_path, rng)
    raw = path.read_bytes()
    path.write_bytes(b"XXXXX" + raw[5:])
    with pytest.raises(VolumeFormatError, match="MORV1"):
        load_volume(str(path))


def test_short_payload_is_truncation(tmp_path, rng):
    path = _saved_volume(tmp_path, rng)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(VolumeTruncatedError):
        load_volume(str(path))


def test_missing_file_is_io_error(tmp_path):
    with pytest.raises(VolumeIOError):
        load_volume(str(tmp_path / "absent.morv"))


def test_pgm_sections(tmp_path, rng):
    image = rng.normal(size=(2, 4, 5, 6))
    assert {k: v.shape for k, v in mid_slices(image[0]).items()} == {
        "axial": (5, 6), "coronal": (4, 6), "sagittal": (4, 5)}
    assert to_gray(np.full((2, 2), 3.0)).tolist() == [[0, 0], [0, 0]]
    written = write_mid_slices(str(tmp_path / "slices"), "vol", image)
    assert len(written) == 6
    raw = open(written[0], "rb").read()
    assert raw.startswith(b"P5\n6 5\n255\n")
    assert len(raw) == len(b"P5\n6 5\n255\n") + 30
