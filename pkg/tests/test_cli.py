import json
import os

import numpy as np
import pytest

from config.run_config import VARIANTS
from data.volume_io import load_volume, volume_path
from handlers.command_factory import CommandHandlerFactory
from handlers.train_handler import write_metrics
from models.configs import Variant
from training.metrics import compute_metrics
from utils.constants import CSV_HEADER_COMMENT, COMPARE_COLUMNS, EXIT_CONFIG, EXIT_IO, EXIT_NUMERICAL, EXIT_OK
from utils.helpers import read_csv

DATA_SPEC = {
    "extent": [8, 8, 8],
    "num_samples": 4,
    "num_classes": 2,
    "radius_range": [2.5, 3.0],
    "ellipsoid_count": [1, 1],
    "noise_sigma": 0.05,
    "seed": 3,
}

RUN_CONFIG = {
    "network": {"depth": 2, "base_channels": 8, "num_classes": 2, "deep_supervision_levels": 1},
    "train": {"max_epochs": 1, "patience": 1, "folds": 2},
}


def run(*argv):
    return CommandHandlerFactory().run([str(a) for a in argv])


@pytest.fixture
def dataset(tmp_path):
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(DATA_SPEC))
    out = tmp_path / "data"
    assert run("gen-data", "--spec", spec_path, "--out", out) == EXIT_OK
    return out


def test_gen_data_writes_index_and_volumes(dataset):
    index = json.loads((dataset / "index.json").read_text())
    assert index["ids"] == [f"sample_{i:03d}" for i in range(4)]
    for sample_id in index["ids"]:
        sample = load_volume(volume_path(str(dataset), sample_id))
        assert sample.image.shape == (1, 8, 8, 8)
    manifest = json.loads((dataset / "run_manifest.json").read_text())
    assert manifest["command"] == "gen-data"


@pytest.mark.parametrize("impl", ["flat", "chm"])
@pytest.mark.parametrize("op", ["erode", "dilate", "open", "close"])
def test_filter_writes_a_volume(tmp_path, dataset, impl, op):
    source = volume_path(str(dataset), json.loads((dataset / "index.json").read_text())["ids"][0])
    out = tmp_path / f"{op}.morv"
    assert run("filter", "--in", source, "--op", op, "--impl", impl, "--p", 2, "--out", out) == EXIT_OK
    assert load_volume(str(out)).image.shape == (1, 8, 8, 8)


def test_filter_ordering_of_flat_erosion_and_dilation(tmp_path, dataset):
    source = volume_path(str(dataset), json.loads((dataset / "index.json").read_text())["ids"][0])
    for op in ("erode", "dilate"):
        assert run("filter", "--in", source, "--op", op, "--impl", "flat", "--out", tmp_path / f"{op}.morv") == 0
    eroded = load_volume(str(tmp_path / "erode.morv")).image
    dilated = load_volume(str(tmp_path / "dilate.morv")).image
    original = load_volume(source).image
    assert np.all(eroded <= original) and np.all(original <= dilated)


def test_filter_writes_pgm_sections(tmp_path, dataset):
    source = volume_path(str(dataset), json.loads((dataset / "index.json").read_text())["ids"][0])
    slices = tmp_path / "slices"
    assert run("filter", "--in", source, "--op", "open", "--impl", "flat", "--out", tmp_path / "o.morv",
               "--slice-pgm", slices) == EXIT_OK
    assert len(os.listdir(slices)) == 3


def test_filter_even_window_is_config_error(tmp_path, dataset):
    source = volume_path(str(dataset), json.loads((dataset / "index.json").read_text())["ids"][0])
    code = run("filter", "--in", source, "--op", "erode", "--impl", "flat", "--window", "2,3,3",
               "--out", tmp_path / "x.morv")
    assert code == EXIT_CONFIG


def test_filter_bad_magic_is_io_error(tmp_path):
    bogus = tmp_path / "bogus.morv"
    bogus.write_bytes(b"NOTAVOLUME" * 10)
    assert run("filter", "--in", bogus, "--op", "erode", "--impl", "flat", "--out", tmp_path / "x.morv") == EXIT_IO


def test_unknown_variant_is_usage_error(tmp_path):
    assert run("train", "--data", tmp_path, "--variant", "resnet", "--out", tmp_path / "run") == EXIT_CONFIG


def test_missing_dataset_is_io_error(tmp_path):
    assert run("train", "--data", tmp_path, "--variant", "chm", "--out", tmp_path / "run") == EXIT_IO


def test_compare_without_metrics(tmp_path):
    (tmp_path / "unfinished").mkdir()
    assert run("compare", "--runs", tmp_path / "unfinished", "--out", tmp_path / "cmp.csv") == EXIT_NUMERICAL


def test_gradcheck_tensor_scope():
    assert run("gradcheck", "--scope", "tensor", "--seed", 5) == EXIT_OK


def test_gradcheck_report_is_reproducible(capsys):
    reports = []
    for _ in range(2):
        assert run("gradcheck", "--scope", "tensor", "--seed", 11) == EXIT_OK
        reports.append(capsys.readouterr().out)
    assert reports[0] == reports[1]
    assert reports[0].startswith("gradcheck scope=tensor")


def test_bench_small_volume():
    assert run("bench", "--extent", 8, "--repeat", 1) == EXIT_OK


@pytest.mark.parametrize("argv", [
    ["bench", "--window", "4"],
    ["bench", "--repeat", "0"],
])
def test_bench_rejects_bad_arguments(argv):
    assert run(*argv) == EXIT_CONFIG


@pytest.mark.slow
def test_train_evaluate_compare(tmp_path, dataset):
    config_path = tmp_path / "run.json"
    config_path.write_text(json.dumps(RUN_CONFIG))
    runs = []
    for variant in ("baseline", "chm-skip"):
        run_dir = tmp_path / variant
        assert run("train", "--data", dataset, "--variant", variant, "--config", config_path,
                   "--out", run_dir, "--seed", 1) == EXIT_OK
        for name in ("fold_0.morphnet", "fold_1.morphnet", "history.csv", "metrics.csv", "metrics.json",
                     "run_manifest.json"):
            assert (run_dir / name).exists()
        assert (run_dir / "history.csv").read_text().splitlines()[0] == CSV_HEADER_COMMENT
        history = read_csv(str(run_dir / "history.csv"))
        assert [(row["fold"], row["epoch"]) for row in history] == [("0", "1"), ("1", "1")]
        runs.append(run_dir)

    before = json.loads((runs[1] / "metrics.json").read_text())
    assert run("evaluate", "--run", runs[1], "--data", dataset) == EXIT_OK
    after = json.loads((runs[1] / "metrics.json").read_text())
    assert after["overall"] == before["overall"]
    assert run("evaluate", "--run", runs[1], "--data", dataset, "--mode", "out_of_fold") == EXIT_OK

    table = tmp_path / "compare.csv"
    assert run("compare", "--runs", runs[1], runs[0], "--out", table) == EXIT_OK
    rows = read_csv(str(table))
    assert list(rows[0]) == COMPARE_COLUMNS
    assert [row["variant"] for row in rows] == ["Baseline", "CHM Block + skip"]
    assert rows[0]["core_dice"] == ""


def test_gen_data_rerun_is_byte_identical(tmp_path):
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(DATA_SPEC))
    for name in ("first", "second"):
        assert run("gen-data", "--spec", spec_path, "--out", tmp_path / name) == EXIT_OK
    written = sorted(name for name in os.listdir(tmp_path / "first") if name != "run_manifest.json")
    assert sorted(name for name in os.listdir(tmp_path / "second") if name != "run_manifest.json") == written
    assert "index.json" in written and len(written) == 5
    for name in written:
        assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes()


def test_gen_data_into_unusable_directory_is_io_error(tmp_path):
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(DATA_SPEC))
    blocker = tmp_path / "f.txt"
    blocker.write_text("not a directory")
    assert run("gen-data", "--spec", spec_path, "--out", blocker / "sub") == EXIT_IO


def fake_run(root, variant, seed=0):
    """A finished run directory holding only metrics.json / metrics.csv"""
    rng = np.random.default_rng(seed)
    truth = rng.integers(0, 4, size=(4, 4, 4))
    pred = np.where(rng.random((4, 4, 4)) < 0.8, truth, rng.integers(0, 4, size=(4, 4, 4)))
    metrics = compute_metrics(pred, truth, 4)
    run_dir = root / variant.value
    run_dir.mkdir()
    write_metrics(str(run_dir), variant.value, {"mode": "ensemble", "overall": metrics, "per_fold": {0: metrics}})
    return run_dir, metrics


def test_compare_orders_rows_by_variant(tmp_path, capsys):
    variants = list(Variant)
    made = {variant: fake_run(tmp_path, variant, seed) for seed, variant in enumerate(variants)}
    shuffled = [made[variants[i]][0] for i in (3, 0, 4, 2, 1)]
    table = tmp_path / "cmp.csv"
    assert run("compare", "--runs", *shuffled, "--out", table) == EXIT_OK

    rows = read_csv(str(table))
    expected = [VARIANTS[variant.value]["display_name"] for variant in variants]
    assert [row["variant"] for row in rows] == expected
    for row, variant in zip(rows, variants):
        regions = made[variant][1].regions
        assert float(row["whole_dice"]) == regions["whole"]["dice"]
        assert float(row["enhancing_sensitivity"]) == regions["enhancing"]["sensitivity"]

    printed = capsys.readouterr().out.strip().splitlines()
    assert [line.split("  ")[0] for line in printed[2:]] == expected


def test_compare_single_run(tmp_path):
    run_dir, _ = fake_run(tmp_path, Variant.NON_LEARNABLE)
    table = tmp_path / "cmp.csv"
    assert run("compare", "--runs", run_dir, "--out", table) == EXIT_OK
    assert [row["variant"] for row in read_csv(str(table))] == ["non-Learnable"]


def test_disabled_variant_is_not_trainable(tmp_path, monkeypatch):
    monkeypatch.setitem(VARIANTS["chm"], "enabled", False)
    assert run("train", "--data", tmp_path, "--variant", "chm", "--out", tmp_path / "run") == EXIT_CONFIG


def test_compare_skips_disabled_variants(tmp_path, monkeypatch):
    baseline, _ = fake_run(tmp_path, Variant.BASELINE)
    chm, _ = fake_run(tmp_path, Variant.CHM, seed=1)
    monkeypatch.setitem(VARIANTS["chm"], "enabled", False)
    table = tmp_path / "cmp.csv"
    assert run("compare", "--runs", chm, baseline, "--out", table) == EXIT_OK
    assert [row["variant"] for row in read_csv(str(table))] == ["Baseline"]
    assert run("compare", "--runs", chm, "--out", table) == EXIT_NUMERICAL
