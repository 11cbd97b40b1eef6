"""
Class activation maps: extraction from GAP-head features, multi-scale inference,
fusion, min-max normalization and thresholding into binary seed masks.
"""
import numpy as np
from typing import NamedTuple
from ..Core.Tensor import Tensor, no_grad
from ..Core.Errors import ConfigurationError, ContractError, ShapeError
from ..Core import Functional as F
from ..Classification.ClassifierModel import ClassifierModel
from .Cam import Cam, LabelMask, ScaleSet, ThresholdConfig

NORMALIZED_TOLERANCE: float = 1e-6

class RefinedCams(NamedTuple):
    per_scale: list[Cam]
    fused: Cam

def compute_cam(features: Tensor | np.ndarray, head_weights: np.ndarray, c: int) -> Cam:
    """
    Summary:
        Cam_c = sum_k w[c, k] * A_k, evaluated per pixel. No rectification is applied.

    Parameters:
        features: (K, h, w) maps, or a (1, K, h, w) batch of one.
        head_weights: (C, K) head weights.
        c: class id.
    """
    maps: np.ndarray = features.data if isinstance(features, Tensor) else np.asarray(features)
    if maps.ndim == 4:
        if maps.shape[0] != 1:
            raise ShapeError(f"compute_cam takes a single image, got a batch of {maps.shape[0]}")
        maps = maps[0]
    if maps.ndim != 3:
        raise ShapeError(f"compute_cam expects (K, h, w) features, got shape {maps.shape}")
    if head_weights.ndim != 2:
        raise ShapeError(f"head weights must be (C, K), got shape {head_weights.shape}")
    if not 0 <= c < head_weights.shape[0]:
        raise ContractError(f"unknown class id {c} for a head with {head_weights.shape[0]} classes")
    if head_weights.shape[1] != maps.shape[0]:
        raise ShapeError(f"head weight row has length {head_weights.shape[1]} but features have {maps.shape[0]} channels")

    values: np.ndarray = np.tensordot(head_weights[c].astype(np.float64), maps.astype(np.float64), axes = ([0], [0]))
    return Cam.create(c, values, 1.0)

def _resize(values: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    return F.upsample_bilinear(Tensor(values[None, None].astype(np.float64)), out_h, out_w).data[0, 0]

def multi_scale_cams(model: ClassifierModel, image: np.ndarray, scales: ScaleSet, c: int) -> list[Cam]:
    """
    Summary:
        For every ratio r: resize the image bilinearly by r, classify it, extract the CAM
        of class c and resize the CAM back to the image's own size. Runs without a tape.

    Parameters:
        model: classifier in eval mode.
        image: (h, w) grayscale or (c, h, w) image.
        scales: ratios to sample.
        c: class id.

    Returns:
        One Cam per ratio, all of the image's spatial size, in the order of the scale set.
    """
    if model.training:
        raise ContractError("multi_scale_cams needs the classifier in eval mode")
    planes: np.ndarray = image[None] if image.ndim == 2 else image
    if planes.ndim != 3:
        raise ShapeError(f"expected an (h, w) or (c, h, w) image, got shape {image.shape}")
    h, w = planes.shape[1], planes.shape[2]

    cams: list[Cam] = []
    with no_grad():
        batch: Tensor = Tensor(planes[None].astype(np.float32))
        for ratio in scales.ratios:
            scaled_h: int = int(round(h * ratio))
            scaled_w: int = int(round(w * ratio))
            if min(scaled_h, scaled_w) < model.min_input_size:
                raise ConfigurationError(f"scale {ratio} shrinks a {h}x{w} image to {scaled_h}x{scaled_w}, below the classifier minimum {model.min_input_size}")

            scaled: Tensor = batch if (scaled_h, scaled_w) == (h, w) else F.upsample_bilinear(batch, scaled_h, scaled_w)
            cam: Cam = compute_cam(model.features(scaled), model.head_weights(), c)
            cams.append(Cam.create(c, _resize(cam.values, h, w), ratio))
    return cams

def fuse(cams: list[Cam]) -> Cam:
    """
    Elementwise mean of same-size CAMs of one class.
    """
    if not cams:
        raise ContractError("fuse needs at least one CAM")
    first: Cam = cams[0]
    for cam in cams[1:]:
        if cam.class_id != first.class_id:
            raise ContractError(f"cannot fuse CAMs of classes {first.class_id} and {cam.class_id}")
        if cam.shape != first.shape:
            raise ShapeError(f"cannot fuse CAMs of sizes {first.shape} and {cam.shape}")

    total: np.ndarray = np.zeros(first.shape, dtype = np.float64)
    for cam in cams:
        total += cam.values
    return Cam.create(first.class_id, total / len(cams), 1.0)

def normalize(cam: Cam) -> Cam:
    """
    Summary:
        Min-max normalization to [0, 1]. A constant map becomes all zeros.
    """
    low: float = float(cam.values.min())
    high: float = float(cam.values.max())
    if high - low <= 0.0:
        return Cam.create(cam.class_id, np.zeros_like(cam.values), cam.scale)
    return Cam.create(cam.class_id, (cam.values - low) / (high - low), cam.scale)

def threshold(cam: Cam, cfg: ThresholdConfig) -> LabelMask:
    """
    Summary:
        1 where the normalized value is >= t, else 0.

    Returns:
        (h, w) uint8 mask.
    """
    if cam.values.min() < -NORMALIZED_TOLERANCE or cam.values.max() > 1.0 + NORMALIZED_TOLERANCE:
        raise ContractError(f"threshold expects a normalized CAM, got range [{cam.values.min()}, {cam.values.max()}]")
    return (cam.values >= cfg.t).astype(np.uint8)

def refined_cam(model: ClassifierModel, image: np.ndarray, scales: ScaleSet, c: int, prefuse_norm: bool = True) -> RefinedCams:
    """
    Summary:
        Multi-scale CAMs, each optionally normalized, fused by averaging and normalized again.

    Returns:
        The per-scale CAMs as produced (before normalization) and the normalized fused CAM.
    """
    per_scale: list[Cam] = multi_scale_cams(model, image, scales, c)
    inputs: list[Cam] = [normalize(cam) for cam in per_scale] if prefuse_norm else per_scale
    return RefinedCams(per_scale = per_scale, fused = normalize(fuse(inputs)))

def origin_cam(model: ClassifierModel, image: np.ndarray, c: int) -> Cam:
    """
    Normalized single-scale CAM of the image at its own resolution.
    """
    return normalize(multi_scale_cams(model, image, ScaleSet.create((1.0,)), c)[0])
