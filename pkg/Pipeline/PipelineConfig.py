import json
import logging
from pathlib import Path
from typing import Any, Literal
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from ..Core.AtomicFile import write_text_atomic
from ..Core.Errors import ConfigurationError
from ..CamRefine.Cam import PAPER_SCALES, THRESHOLD_PRESETS
from ..DataSynth.Augmentation import ALLOWED_ROTATIONS, AugmentConfig
from ..DenseCrf.CrfParams import CrfParams
from ..Objectives.LossModeEnum import LossModeEnum
from ..Training.TrainConfig import TrainConfig
from .PresetEnum import PresetEnum

class _Section(BaseModel):
    model_config = ConfigDict(extra = "forbid")

class DataSection(_Section):
    source: Literal["synthetic", "directory"] = "synthetic"
    ingest_root: str | None = None
    class_names: list[str] | None = None
    n_pos: int = Field(default = 120, ge = 0)
    n_neg: int = Field(default = 120, ge = 0)
    size: int = Field(default = 64, ge = 8)
    group_size: int = Field(default = 2, ge = 1)
    train_fraction: float = Field(default = 0.6, ge = 0.0, le = 1.0)
    val_fraction: float = Field(default = 0.2, ge = 0.0, le = 1.0)
    test_fraction: float = Field(default = 0.2, ge = 0.0, le = 1.0)

    @model_validator(mode = "after")
    def _check(self) -> "DataSection":
        if self.size % 8 != 0:
            raise ValueError(f"data.size must be divisible by 8, got {self.size}")
        if abs(self.train_fraction + self.val_fraction + self.test_fraction - 1.0) > 1e-9:
            raise ValueError("data split fractions must sum to 1")
        if self.source == "directory" and not self.ingest_root:
            raise ValueError("data.source = directory needs data.ingest_root")
        return self

    @property
    def fractions(self) -> tuple[float, float, float]:
        return (self.train_fraction, self.val_fraction, self.test_fraction)

class OptimSection(_Section):
    epochs: int = Field(default = 30, ge = 1)
    batch_size: int = Field(default = 4, ge = 1)
    lr_init: float = Field(default = 1e-3, ge = 0.0)
    gamma: float = Field(default = 0.9, gt = 0.0)
    weight_decay: float = Field(default = 1e-4, ge = 0.0)

class ClsSection(OptimSection):
    channels: list[int] = Field(default_factory = lambda: [16, 32, 64, 64], min_length = 1)

class CamSection(_Section):
    scales: list[float] = Field(default_factory = lambda: list(PAPER_SCALES), min_length = 1)
    threshold: float = Field(default = 0.35, gt = 0.0, lt = 1.0)
    threshold_preset: Literal["large-lesion", "small-lesion"] | None = None
    prefuse_norm: bool = True

    @model_validator(mode = "after")
    def _check(self) -> "CamSection":
        if any(scale <= 0 for scale in self.scales):
            raise ValueError("cam.scales must all be positive")
        return self

    @property
    def effective_threshold(self) -> float:
        return THRESHOLD_PRESETS[self.threshold_preset] if self.threshold_preset is not None else self.threshold

class CrfSection(_Section):
    iterations: int = Field(default = 10, ge = 0)
    w_app: float = Field(default = 10.0, ge = 0.0)
    theta_alpha: float = Field(default = 80.0, gt = 0.0)
    theta_beta: float = Field(default = 13.0 / 255.0, gt = 0.0)
    w_smooth: float = Field(default = 3.0, ge = 0.0)
    theta_gamma: float = Field(default = 3.0, gt = 0.0)
    unary_clip: float = Field(default = 0.05, gt = 0.0, lt = 0.5)

    def to_params(self) -> CrfParams:
        return CrfParams.create(self.iterations, self.w_app, self.theta_alpha, self.theta_beta, self.w_smooth, self.theta_gamma, self.unary_clip)

class SeedsSection(_Section):
    bg_threshold: float = Field(default = 0.05, ge = 0.0, le = 1.0)

class UnetSection(_Section):
    base_channels: int = Field(default = 8, ge = 1)
    classes: int = Field(default = 2, ge = 2)
    single_branch: bool = False

class SegSection(OptimSection):
    loss_mode: LossModeEnum = LossModeEnum.COMBINED
    allow_ce_fallback: bool = True

class AugmentSection(_Section):
    enabled: bool = True
    flip: bool = True
    rotations: list[float] = Field(default_factory = lambda: list(ALLOWED_ROTATIONS))
    rotation_probability: float = Field(default = 0.5, ge = 0.0, le = 1.0)
    noise_sigma_min: float = Field(default = 0.3, ge = 0.0, le = 1.0)
    noise_sigma_max: float = Field(default = 0.7, ge = 0.0, le = 1.0)
    noise_probability: float = Field(default = 0.5, ge = 0.0, le = 1.0)

    @model_validator(mode = "after")
    def _check(self) -> "AugmentSection":
        if any(angle not in ALLOWED_ROTATIONS for angle in self.rotations):
            raise ValueError(f"augment.rotations must be drawn from {list(ALLOWED_ROTATIONS)}")
        if self.noise_sigma_min > self.noise_sigma_max:
            raise ValueError("augment.noise_sigma_min exceeds augment.noise_sigma_max")
        return self

class EvalSection(_Section):
    ablation: bool = False
    unet_crf: bool = True

class PipelineConfig(_Section):
    """
    Every knob of a run. Unknown keys are rejected at every level.
    """
    preset: PresetEnum = PresetEnum.DESK
    seed: int = Field(default = 0, ge = 0, lt = 2 ** 64)
    workers: int = Field(default = 1, ge = 1)
    data: DataSection = Field(default_factory = DataSection)
    cls: ClsSection = Field(default_factory = ClsSection)
    cam: CamSection = Field(default_factory = CamSection)
    crf: CrfSection = Field(default_factory = CrfSection)
    seeds: SeedsSection = Field(default_factory = SeedsSection)
    unet: UnetSection = Field(default_factory = UnetSection)
    seg: SegSection = Field(default_factory = SegSection)
    augment: AugmentSection = Field(default_factory = AugmentSection)
    eval: EvalSection = Field(default_factory = EvalSection)

    def augment_config(self, seed_offset: int = 0) -> AugmentConfig | None:
        if not self.augment.enabled:
            return None
        return AugmentConfig.create(
            flip = self.augment.flip,
            rotations = tuple(self.augment.rotations),
            rotation_probability = self.augment.rotation_probability,
            noise_sigma = (self.augment.noise_sigma_min, self.augment.noise_sigma_max),
            noise_probability = self.augment.noise_probability,
            seed = self.seed + seed_offset,
        )

    def classifier_train_config(self) -> TrainConfig:
        return TrainConfig.create(self.cls.epochs, self.cls.batch_size, self.cls.lr_init, self.cls.gamma, self.cls.weight_decay, self.seed, self.augment_config(1))

    def segmentation_train_config(self) -> TrainConfig:
        return TrainConfig.create(self.seg.epochs, self.seg.batch_size, self.seg.lr_init, self.seg.gamma, self.seg.weight_decay, self.seed, self.augment_config(2))

PRESET_DEFAULTS: dict[PresetEnum, dict[str, Any]] = {
    PresetEnum.DESK: {},
    PresetEnum.FULL: {
        "data.size": 256,
        "cls.epochs": 100,
        "cls.batch_size": 8,
        "seg.epochs": 100,
        "seg.batch_size": 8,
        "unet.base_channels": 64,
    },
}

def flatten(tree: dict[str, Any], prefix: str = "") -> dict[str, Any]:
    """
    {"crf": {"iterations": 5}} -> {"crf.iterations": 5}; dotted keys pass through.
    """
    flat: dict[str, Any] = {}
    for key, value in tree.items():
        dotted: str = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(flatten(value, f"{dotted}."))
        else:
            flat[dotted] = value
    return flat

def unflatten(flat: dict[str, Any]) -> dict[str, Any]:
    tree: dict[str, Any] = {}
    for dotted, value in flat.items():
        node: dict[str, Any] = tree
        parts: list[str] = dotted.split(".")
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigurationError(f"config key '{dotted}' conflicts with scalar key '{part}'")
            node = child
        node[parts[-1]] = value
    return tree

def parse_override(text: str) -> tuple[str, Any]:
    """
    "crf.iterations=5" -> ("crf.iterations", 5). Values are parsed as JSON and fall back to plain strings.
    """
    key, separator, raw = text.partition("=")
    if not separator or not key.strip():
        raise ConfigurationError(f"override '{text}' is not of the form key=value")
    try:
        value: Any = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value

def load_config_file(file_path: str | Path) -> dict[str, Any]:

    try:
        content: Any = json.loads(Path(file_path).read_text(encoding = "utf-8"))
    except OSError as e:
        raise ConfigurationError(f"cannot read config file {file_path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"config file {file_path} is not valid JSON: {e}") from e
    if not isinstance(content, dict):
        raise ConfigurationError(f"config file {file_path} must hold a JSON object")
    return flatten(content)

def resolve_config(
    preset: PresetEnum | str | None = None,
    config_file: str | Path | None = None,
    overrides: list[str] | None = None,
    seed: int | None = None,
    workers: int | None = None,
    logger: logging.Logger | None = None,
) -> PipelineConfig:
    """
    Summary:
        Layers preset defaults, the config file, key=value overrides and the global flags,
        in that order, and validates the result.

    Raises:
        ConfigurationError on unknown keys, invalid values or unreadable files.
    """
    logger = logger if logger is not None else logging.getLogger(__name__)

    file_values: dict[str, Any] = load_config_file(config_file) if config_file is not None else {}
    override_values: dict[str, Any] = dict(parse_override(text) for text in (overrides or []))

    chosen: Any = preset if preset is not None else override_values.get("preset", file_values.get("preset", PresetEnum.DESK.value))
    try:
        preset_enum: PresetEnum = chosen if isinstance(chosen, PresetEnum) else PresetEnum(chosen)
    except ValueError as e:
        raise ConfigurationError(f"unknown preset '{chosen}', expected one of {[item.value for item in PresetEnum]}") from e

    merged: dict[str, Any] = dict(PRESET_DEFAULTS[preset_enum])
    merged.update(file_values)
    merged.update(override_values)
    merged["preset"] = preset_enum.value
    if seed is not None:
        merged["seed"] = seed
    if workers is not None:
        merged["workers"] = workers

    try:
        config: PipelineConfig = PipelineConfig.model_validate(unflatten(merged))
    except ValidationError as e:
        raise ConfigurationError(f"invalid configuration: {e}") from e

    logger.debug("Resolved %s preset with %d file keys and %d overrides", preset_enum.value, len(file_values), len(override_values))
    return config

def config_json(config: PipelineConfig) -> str:
    return json.dumps(config.model_dump(mode = "json"), indent = 2, sort_keys = True) + "\n"

def save_resolved_config(config: PipelineConfig, file_path: str | Path) -> None:
    write_text_atomic(file_path, config_json(config))
