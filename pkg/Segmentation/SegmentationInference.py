import time
import numpy as np
from typing import NamedTuple
from ..Core.Tensor import Tensor, no_grad
from ..Core.Errors import ShapeError
from ..DenseCrf.CrfParams import CrfParams
from ..DenseCrf.MeanField import mean_field, unary_from_cam
from .MixedUNet import MixedUNetModel

class ModelReport(NamedTuple):
    parameter_count: int
    latency_seconds: float
    input_size: int

def predict_probabilities(model: MixedUNetModel, images: np.ndarray, batch_size: int = 8) -> np.ndarray:
    """
    Summary:
        Runs the network in eval mode without a tape.

    Parameters:
        images: (n, h, w) grayscale images in [0, 1].

    Returns:
        (n, C, h, w) float32 per-pixel class distributions.
    """
    if images.ndim != 3:
        raise ShapeError(f"expected an (n, h, w) image stack, got shape {images.shape}")

    was_training: bool = model.training
    model.eval()
    outputs: list[np.ndarray] = []
    with no_grad():
        for start in range(0, images.shape[0], batch_size):
            chunk: np.ndarray = images[start:start + batch_size, None].astype(np.float32)
            outputs.append(model.forward(Tensor(chunk)).data)
    if was_training:
        model.train()
    if not outputs:
        return np.zeros((0, model.config.num_classes) + images.shape[1:], dtype = np.float32)
    return np.concatenate(outputs, axis = 0)

def predict_masks(model: MixedUNetModel, images: np.ndarray, crf_params: CrfParams | None = None, batch_size: int = 8) -> np.ndarray:
    """
    Summary:
        Per-pixel argmax of the network output. With crf_params, each image is further refined by
        dense-CRF mean field, using the network's foreground probability as the activation map.

    Returns:
        (n, h, w) uint8 label masks.
    """
    probabilities: np.ndarray = predict_probabilities(model, images, batch_size)
    if crf_params is None:
        return np.argmax(probabilities, axis = 1).astype(np.uint8)

    refined: list[np.ndarray] = []
    for image, probability in zip(images, probabilities):
        foreground: np.ndarray = np.clip(probability[1].astype(np.float64), 0.0, 1.0)
        q: np.ndarray = mean_field(unary_from_cam(foreground, crf_params.unary_clip), image, crf_params)
        refined.append(np.argmax(q, axis = -1).astype(np.uint8))
    return np.stack(refined) if refined else np.zeros(images.shape, dtype = np.uint8)

def model_report(model: MixedUNetModel, input_size: int, repeats: int = 3) -> ModelReport:
    """
    Summary:
        Parameter count and mean single-image inference latency (wall clock, eval mode) on a zero image.
    """
    assert repeats >= 1, "repeats must be positive"
    image: np.ndarray = np.zeros((1, input_size, input_size), dtype = np.float32)
    predict_probabilities(model, image)

    started: float = time.perf_counter()
    for _ in range(repeats):
        predict_probabilities(model, image)
    elapsed: float = (time.perf_counter() - started) / repeats
    return ModelReport(parameter_count = model.parameter_count(), latency_seconds = elapsed, input_size = input_size)
