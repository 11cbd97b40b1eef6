import logging
import numpy as np
from pathlib import Path
from matplotlib import colormaps
from ..Core.Errors import ShapeError
from ..DataSynth.ImageIo import read_png, to_unit_float, write_png_atomic

COLORMAP_NAME: str = "viridis"
OVERLAY_ALPHA: float = 0.5

def overlay_heatmap(cam: np.ndarray, image: np.ndarray) -> np.ndarray:
    """
    Summary:
        Blends the colormapped CAM over the grayscale image at 50% alpha.

    Parameters:
        cam: (h, w) normalized activation map in [0, 1].
        image: (h, w) grayscale image in [0, 1].

    Returns:
        (h, w, 3) uint8 RGB overlay.
    """
    if cam.shape != image.shape:
        raise ShapeError(f"CAM {cam.shape} and image {image.shape} differ in size")

    colored: np.ndarray = colormaps[COLORMAP_NAME](np.clip(cam, 0.0, 1.0))[..., :3]
    gray: np.ndarray = np.repeat(np.clip(image, 0.0, 1.0)[..., None], 3, axis = 2)
    blended: np.ndarray = OVERLAY_ALPHA * colored + (1.0 - OVERLAY_ALPHA) * gray
    return np.round(blended * 255.0).astype(np.uint8)

def export_heatmap(cam_path: str | Path, image_path: str | Path, out_path: str | Path, logger: logging.Logger | None = None) -> Exception | None:
    """
    Summary:
        Reads a CAM PNG (8- or 16-bit) and its source image and writes the color overlay PNG.

    Returns:
        None if successful, otherwise the read or write exception.
    """
    logger = logger if logger is not None else logging.getLogger(__name__)

    cam: np.ndarray | Exception = read_png(cam_path, logger)
    if isinstance(cam, Exception):
        return cam
    image: np.ndarray | Exception = read_png(image_path, logger)
    if isinstance(image, Exception):
        return image

    overlay: np.ndarray = overlay_heatmap(to_unit_float(cam).astype(np.float64), to_unit_float(image).astype(np.float64))
    try:
        write_png_atomic(out_path, overlay)
    except OSError as e:
        logger.error("Error writing heatmap %s: %s", out_path, e)
        return e

    logger.debug("Heatmap written to %s", out_path)
    return None
