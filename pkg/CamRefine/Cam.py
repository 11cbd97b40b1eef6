import numpy as np
from dataclasses import dataclass
from typing import TypeAlias
from ..Core.Errors import ConfigurationError

# 2-D integer class-label grid: pseudo-mask or ground truth
LabelMask: TypeAlias = np.ndarray

PAPER_SCALES: tuple[float, ...] = (0.5, 1.0, 1.5, 2.0)

LARGE_LESION_THRESHOLD: float = 0.35
SMALL_LESION_THRESHOLD: float = 0.7
THRESHOLD_PRESETS: dict[str, float] = {
    "large-lesion": LARGE_LESION_THRESHOLD,
    "small-lesion": SMALL_LESION_THRESHOLD,
}

@dataclass(slots = True)
class Cam:
    """
    Single-class activation map on a 2-D grid, tagged with the input rescale ratio that produced it.
    """
    class_id: int
    values: np.ndarray
    scale: float

    @staticmethod
    def create(class_id: int, values: np.ndarray, scale: float = 1.0) -> "Cam":

        assert isinstance(class_id, (int, np.integer)) and class_id >= 0, "class_id must be a non-negative integer"
        assert isinstance(values, np.ndarray) and values.ndim == 2, "values must be a 2-D numpy array"
        assert np.all(np.isfinite(values)), "CAM values must be finite"
        assert scale > 0, "scale must be positive"
        return Cam(int(class_id), values.astype(np.float64, copy = False), float(scale))

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

@dataclass(slots = True)
class ScaleSet:
    ratios: tuple[float, ...]

    @staticmethod
    def create(ratios: tuple[float, ...] | list[float] = PAPER_SCALES) -> "ScaleSet":

        assert len(ratios) >= 1, "a scale set needs at least one ratio"
        assert all(ratio > 0 for ratio in ratios), "every scale ratio must be positive"
        return ScaleSet(tuple(float(ratio) for ratio in ratios))

    def __len__(self) -> int:
        return len(self.ratios)

@dataclass(slots = True)
class ThresholdConfig:
    t: float

    @staticmethod
    def create(t: float = LARGE_LESION_THRESHOLD) -> "ThresholdConfig":

        assert 0.0 < t < 1.0, "threshold must lie in (0, 1)"
        return ThresholdConfig(float(t))

    @staticmethod
    def from_preset(name: str) -> "ThresholdConfig":
        """
        "large-lesion" -> 0.35, "small-lesion" -> 0.7.
        """
        if name not in THRESHOLD_PRESETS:
            raise ConfigurationError(f"unknown threshold preset '{name}', expected one of {sorted(THRESHOLD_PRESETS)}")
        return ThresholdConfig.create(THRESHOLD_PRESETS[name])
