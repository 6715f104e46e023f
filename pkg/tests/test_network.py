import numpy as np
import pytest

from core.errors import ConfigError, ShapeError
from core.tensor import AutodiffTape, Tensor, backward, no_tape
from handlers.gradcheck_handler import run_scope
from models.configs import NetworkConfig, Variant
from network.checkpoint import load_checkpoint, save_checkpoint
from network.loss import dice_loss
from network.unet import build_network, forward
from training.optimizer import Adam

# depth 2, base 8, one input channel, K=3, one supervision head
EXPECTED_PARAMETERS = {
    Variant.BASELINE: 28096,
    Variant.NON_LEARNABLE: 22132,
    Variant.NON_LEARNABLE_SKIP: 22132,
    Variant.CHM: 22456,
    Variant.CHM_SKIP: 22456,
}


def _config(variant, /, **overrides):
    settings = dict(variant=variant, depth=2, base_channels=8, num_classes=3, deep_supervision_levels=1)
    settings.update(overrides)
    return NetworkConfig(**settings)


@pytest.mark.parametrize("variant", list(Variant))
def test_parameter_counts(variant):
    assert build_network(_config(variant)).parameter_count() == EXPECTED_PARAMETERS[variant]


@pytest.mark.parametrize("variant", list(Variant))
def test_all_variants_share_output_shapes(rng, variant):
    out = forward(build_network(_config(variant)), Tensor(rng.normal(size=(1, 1, 8, 8, 8))))
    assert out.logits.shape == (1, 3, 8, 8, 8)
    assert out.probs.shape == (1, 3, 8, 8, 8)
    assert out.aux == {}
    assert np.allclose(out.probs.data.sum(axis=1), 1.0, rtol=0, atol=1e-12)


def test_three_level_logits_shape(rng):
    model = build_network(NetworkConfig(variant=Variant.CHM_SKIP, depth=3, base_channels=8, num_classes=3,
                                        deep_supervision_levels=2))
    out = model.forward(Tensor(rng.normal(size=(1, 1, 16, 16, 16))))
    assert out.logits.shape == (1, 3, 16, 16, 16)
    assert list(out.aux) == [1]
    assert out.aux[1].shape == (1, 3, 8, 8, 8)


@pytest.mark.parametrize("variant", [v for v in Variant if v is not Variant.BASELINE])
def test_encoder_half_split(variant):
    model = build_network(_config(variant, depth=3))
    for level, sources in model.channel_sources.items():
        channels = model.config.level_channels(level)
        assert sources["morph"] == channels // 2
        assert sources["context"] + sources["morph"] == channels


def test_baseline_encoder_has_no_morphology():
    model = build_network(_config(Variant.BASELINE))
    assert all(sources["morph"] == 0 for sources in model.channel_sources.values())
    assert model.parameter_count("encoder.0.morph") == 0


def test_variants_differ_only_in_encoder():
    baseline = build_network(_config(Variant.BASELINE)).store.shapes()
    chm = build_network(_config(Variant.CHM_SKIP)).store.shapes()
    outside = lambda shapes: {n: s for n, s in shapes.items() if not n.startswith("encoder.")}
    assert outside(baseline) == outside(chm)
    assert {n for n in chm if n.startswith("encoder.") and ".morph." in n}


def test_same_seed_builds_identical_parameters():
    first = build_network(_config(Variant.CHM), seed=5).store.snapshot()
    second = build_network(_config(Variant.CHM), seed=5).store.snapshot()
    other = build_network(_config(Variant.CHM), seed=6).store.snapshot()
    assert all(np.array_equal(first[name], second[name]) for name in first)
    assert not all(np.array_equal(first[name], other[name]) for name in first)


def test_input_contract(rng):
    model = build_network(_config(Variant.BASELINE))
    with pytest.raises(ShapeError):
        model.forward(Tensor(rng.normal(size=(1, 2, 8, 8, 8))))
    with pytest.raises(ShapeError):
        model.forward(Tensor(rng.normal(size=(1, 1, 8, 8, 7))))


@pytest.mark.parametrize("overrides", [
    {"depth": 1},
    {"base_channels": 6},
    {"num_classes": 1},
    {"deep_supervision_levels": 2},
    {"window": (2, 3, 3)},
    {"variant": "deeplab"},
])
def test_invalid_network_configs(overrides):
    with pytest.raises(ConfigError):
        _config(Variant.CHM, **overrides)


def test_config_round_trip():
    cfg = _config(Variant.NON_LEARNABLE_SKIP)
    assert NetworkConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(ConfigError):
        NetworkConfig.from_dict({**cfg.to_dict(), "dropout": 0.5})


@pytest.mark.parametrize("variant", [Variant.BASELINE, Variant.CHM_SKIP])
def test_checkpoint_round_trip_is_bitwise(tmp_path, rng, variant):
    model = build_network(_config(variant), seed=13)
    model.metadata = {"fold": 2, "best_epoch": 4}
    x = rng.normal(size=(1, 1, 8, 8, 8))
    before = model.predict(x)

    path = tmp_path / "model.morphnet"
    save_checkpoint(str(path), model)
    restored = load_checkpoint(str(path))

    assert restored.config == model.config
    assert restored.metadata == {"fold": 2, "best_epoch": 4}
    snapshot = restored.store.snapshot()
    assert all(np.array_equal(snapshot[name], tensor.data) for name, tensor in model.store.items())
    assert np.array_equal(restored.predict(x), before)


def _ball_target(extent=8, num_classes=3):
    grid = np.stack(np.meshgrid(*(np.arange(extent),) * 3, indexing="ij"))
    distance = np.sqrt(((grid - (extent - 1) / 2) ** 2).sum(axis=0))
    # centre 2, shell 1, background 0
    label = (2 - np.digitize(distance, [1.5, 3.0])) % num_classes
    return (np.arange(num_classes)[:, None, None, None] == label[None]).astype(np.float64)[None]


@pytest.mark.parametrize("variant", list(Variant))
def test_one_adam_step_decreases_loss(rng, variant):
    model = build_network(_config(variant), seed=21)
    x = Tensor(rng.normal(size=(1, 1, 8, 8, 8)))
    target = _ball_target()
    optimizer = Adam(model.parameters, learning_rate=1e-3)

    with AutodiffTape() as tape:
        loss = dice_loss(model.forward(x).probs, target)
    grads = backward(tape, loss)
    optimizer.step({name: grads.get(tensor) for name, tensor in model.store.items()})

    with no_tape():
        after = dice_loss(model.forward(x).probs, target)
    assert after.item() < loss.item()


@pytest.mark.slow
def test_network_spot_check_passes():
    results = run_scope("network", seed=17)
    assert len(results) == len(Variant)
    failed = [(r.name, r.max_rel_error) for r in results if not r.passed]
    assert not failed
