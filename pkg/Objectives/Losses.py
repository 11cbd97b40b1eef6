import logging
import numpy as np
from dataclasses import dataclass
from ..Core.Tensor import Tensor
from ..Core.Errors import ContractError, EmptySeedError, ShapeError
from ..Core import Functional as F
from ..CamRefine.Cam import Cam, LabelMask

IGNORE_LABEL: int = 255
LOG_FLOOR: float = 1e-12

@dataclass(slots = True)
class SeedRegions:
    """
    Seed labels of a batch: seed_map[n, y, x] is the class whose seed set S_c holds the pixel,
    or IGNORE_LABEL when the pixel is in no seed set. Disjointness holds by construction.
    """
    seed_map: np.ndarray

    @staticmethod
    def create(seed_map: np.ndarray) -> "SeedRegions":

        assert isinstance(seed_map, np.ndarray), "seed_map must be a numpy array"
        if seed_map.ndim == 2:
            seed_map = seed_map[None]
        assert seed_map.ndim == 3, "seed_map must be (h, w) or (n, h, w)"
        return SeedRegions(seed_map.astype(np.uint8, copy = False))

    @staticmethod
    def stack(regions: list["SeedRegions"]) -> "SeedRegions":
        return SeedRegions.create(np.concatenate([region.seed_map for region in regions], axis = 0))

    @property
    def count(self) -> int:
        return int(np.sum(self.seed_map != IGNORE_LABEL))

    def locations(self, c: int) -> np.ndarray:
        """
        (k, 3) array of (n, y, x) positions in S_c.
        """
        return np.argwhere(self.seed_map == c)

def seed_regions_from_masks(refined_mask: LabelMask, fused_cam: Cam | np.ndarray, image_label: int, bg_threshold: float = 0.05) -> SeedRegions:
    """
    Summary:
        Seeds for one image from its Refined_mask. Foreground seeds are the mask pixels;
        background seeds are the pixels whose normalized fused CAM falls below bg_threshold.
        A negative image seeds every pixel as background. Everything else is ignored.
    """
    values: np.ndarray = fused_cam.values if isinstance(fused_cam, Cam) else np.asarray(fused_cam)
    if refined_mask.shape != values.shape:
        raise ShapeError(f"mask {refined_mask.shape} and CAM {values.shape} differ in size")

    if image_label == 0:
        return SeedRegions.create(np.zeros(refined_mask.shape, dtype = np.uint8))

    seed_map: np.ndarray = np.full(refined_mask.shape, IGNORE_LABEL, dtype = np.uint8)
    seed_map[values < bg_threshold] = 0
    seed_map[refined_mask > 0] = 1
    return SeedRegions.create(seed_map)

def _one_hot(labels: np.ndarray, classes: int, dtype: np.dtype) -> np.ndarray:
    """
    (n, h, w) labels -> (n, C, h, w) indicator; IGNORE_LABEL and other out-of-range values map to zeros.
    """
    encoded: np.ndarray = np.zeros((labels.shape[0], classes) + labels.shape[1:], dtype = dtype)
    for label in range(classes):
        encoded[:, label] = labels == label
    return encoded

def _check_distribution(y: Tensor, labels: np.ndarray, op: str) -> None:
    if y.data.ndim != 4:
        raise ShapeError(f"{op} expects an (n, C, h, w) distribution, got shape {y.shape}")
    n, _, h, w = y.shape
    if labels.shape != (n, h, w):
        raise ShapeError(f"{op}: labels of shape {labels.shape} do not match distribution {y.shape}")

def seeding_loss(y: Tensor, seeds: SeedRegions) -> Tensor:
    """
    Summary:
        -(1 / sum_c |S_c|) * sum_c sum_{u in S_c} log Y[u, c]. Unseeded pixels contribute nothing.

    Parameters:
        y: (n, C, h, w) per-pixel class distribution.
        seeds: seed regions of the batch.
    """
    _check_distribution(y, seeds.seed_map, "seeding_loss")
    classes: int = y.shape[1]
    seeded: np.ndarray = seeds.seed_map != IGNORE_LABEL
    if np.any(seeds.seed_map[seeded] >= classes):
        raise ContractError(f"seed labels must lie in [0, {classes})")
    total: int = int(seeded.sum())
    if total == 0:
        raise EmptySeedError("seeding loss needs at least one seeded pixel")

    weights: np.ndarray = _one_hot(seeds.seed_map, classes, y.dtype)
    return (F.log_clamped(y, LOG_FLOOR) * weights).sum() * (-1.0 / total)

def pixel_ce_loss(y: Tensor, target: LabelMask) -> Tensor:
    """
    Summary:
        Mean over all pixels of -log Y[u, target(u)].

    Parameters:
        y: (n, C, h, w) per-pixel class distribution.
        target: (n, h, w) or (h, w) labels, e.g. the CRF pseudo-masks.
    """
    labels: np.ndarray = target[None] if target.ndim == 2 else target
    _check_distribution(y, labels, "pixel_ce_loss")
    classes: int = y.shape[1]
    if labels.min() < 0 or labels.max() >= classes:
        raise ContractError(f"target labels must lie in [0, {classes})")

    weights: np.ndarray = _one_hot(labels, classes, y.dtype)
    return (F.log_clamped(y, LOG_FLOOR) * weights).sum() * (-1.0 / labels.size)

def combined_loss(y: Tensor, seeds: SeedRegions, crf_target: LabelMask, allow_ce_fallback: bool = False, logger: logging.Logger | None = None) -> Tensor:
    """
    Summary:
        seeding_loss(y, seeds) + pixel_ce_loss(y, crf_target).
        A batch without seeds raises EmptySeedError unless allow_ce_fallback is set,
        in which case the cross-entropy term alone is returned and a warning is logged.
    """
    ce: Tensor = pixel_ce_loss(y, crf_target)
    try:
        seed: Tensor = seeding_loss(y, seeds)
    except EmptySeedError:
        if not allow_ce_fallback:
            raise
        logger = logger if logger is not None else logging.getLogger(__name__)
        logger.warning("Batch has no seeded pixels, using the cross-entropy term only")
        return ce
    return seed + ce
