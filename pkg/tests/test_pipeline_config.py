import json
import pytest
from pathlib import Path
from ptri_camforge.Core.Errors import ConfigurationError
from ptri_camforge.Objectives.LossModeEnum import LossModeEnum
from ptri_camforge.Pipeline.PipelineConfig import PipelineConfig, config_json, flatten, parse_override, resolve_config, unflatten
from ptri_camforge.Pipeline.PresetEnum import PresetEnum

class TestOverrides:

    @pytest.mark.parametrize("text,expected", [
        ("crf.iterations=5", ("crf.iterations", 5)),
        ("cam.prefuse_norm=false", ("cam.prefuse_norm", False)),
        ("cam.scales=[1.0, 2.0]", ("cam.scales", [1.0, 2.0])),
        ("cam.threshold_preset=small-lesion", ("cam.threshold_preset", "small-lesion")),
        ("data.ingest_root=/data/a=b", ("data.ingest_root", "/data/a=b")),
    ])
    def test_parse_override(self, text: str, expected: tuple) -> None:
        assert parse_override(text) == expected

    @pytest.mark.parametrize("text", ["crf.iterations", "=5", ""])
    def test_malformed_override(self, text: str) -> None:
        with pytest.raises(ConfigurationError):
            parse_override(text)

    def test_flatten_and_unflatten(self) -> None:
        tree: dict = {"crf": {"iterations": 5, "w_app": 2.0}, "seed": 3}
        assert flatten(tree) == {"crf.iterations": 5, "crf.w_app": 2.0, "seed": 3}
        assert unflatten(flatten(tree)) == tree
        with pytest.raises(ConfigurationError):
            unflatten({"crf": 1, "crf.iterations": 5})

class TestResolveConfig:

    def test_defaults(self) -> None:
        config: PipelineConfig = resolve_config()
        assert config.preset == PresetEnum.DESK
        assert (config.data.size, config.cls.epochs, config.cls.batch_size) == (64, 30, 4)
        assert config.cam.scales == [0.5, 1.0, 1.5, 2.0]
        assert config.cam.effective_threshold == 0.35
        assert config.crf.theta_beta == pytest.approx(13 / 255)
        assert config.seg.loss_mode == LossModeEnum.COMBINED

    def test_full_preset(self) -> None:
        config: PipelineConfig = resolve_config("full")
        assert (config.data.size, config.cls.epochs, config.cls.batch_size, config.unet.base_channels) == (256, 100, 8, 64)

    def test_layering_order(self, tmp_path: Path) -> None:
        config_file: Path = tmp_path / "config.json"
        config_file.write_text(json.dumps({"cls": {"epochs": 10}, "crf.iterations": 4, "seed": 1}))
        config: PipelineConfig = resolve_config("full", config_file, ["crf.iterations=2"], seed = 8, workers = 3)
        assert config.cls.epochs == 10
        assert config.crf.iterations == 2
        assert config.data.size == 256
        assert (config.seed, config.workers) == (8, 3)

    def test_preset_from_file(self, tmp_path: Path) -> None:
        config_file: Path = tmp_path / "config.json"
        config_file.write_text(json.dumps({"preset": "full"}))
        assert resolve_config(config_file = config_file).preset == PresetEnum.FULL

    @pytest.mark.parametrize("override", [
        "crf.iterationz=3",
        "colour=red",
        "data.size=60",
        "cam.threshold=1.0",
        "cam.scales=[0.5, -1]",
        "augment.rotations=[45]",
        "data.train_fraction=0.9",
        "data.source=directory",
        "seed=-1",
        "preset=huge",
    ])
    def test_invalid_values_are_configuration_errors(self, override: str) -> None:
        with pytest.raises(ConfigurationError):
            resolve_config(overrides = [override])

    def test_unreadable_file(self, tmp_path: Path) -> None:
        with pytest.raises(ConfigurationError):
            resolve_config(config_file = tmp_path / "absent.json")
        (tmp_path / "list.json").write_text("[1, 2]")
        with pytest.raises(ConfigurationError):
            resolve_config(config_file = tmp_path / "list.json")

    def test_threshold_preset_wins(self) -> None:
        config: PipelineConfig = resolve_config(overrides = ["cam.threshold_preset=small-lesion", "cam.threshold=0.2"])
        assert config.cam.effective_threshold == 0.7

    def test_train_configs_derive_from_the_seed(self) -> None:
        config: PipelineConfig = resolve_config(seed = 5)
        assert config.classifier_train_config().augment.seed == 6
        assert config.segmentation_train_config().augment.seed == 7
        assert resolve_config(overrides = ["augment.enabled=false"]).classifier_train_config().augment is None

    def test_crf_params(self) -> None:
        params = resolve_config(overrides = ["crf.iterations=3", "crf.w_smooth=0"]).crf.to_params()
        assert (params.iterations, params.w_smooth, params.w_app) == (3, 0.0, 10.0)

    def test_config_json_is_stable(self) -> None:
        text: str = config_json(resolve_config(seed = 2))
        assert text == config_json(resolve_config(seed = 2))
        assert text.endswith("\n")
        assert PipelineConfig.model_validate(json.loads(text)) == resolve_config(seed = 2)
