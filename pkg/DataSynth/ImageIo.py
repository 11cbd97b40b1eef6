import io
import logging
import numpy as np
import PIL.Image
from pathlib import Path
from ..Core.AtomicFile import write_bytes_atomic
from ..Core.Errors import DataLoadError

def read_png(file_path: str | Path, logger: logging.Logger | None = None) -> np.ndarray | Exception:
    """
    Summary:
        Reads a PNG/JPG as a 2-D grayscale array. 8-bit files come back as uint8, 16-bit as uint16.
        Colour files are converted to 8-bit luminance.

    Returns:
        The array if successful, otherwise a DataLoadError.
    """
    logger = logger if logger is not None else logging.getLogger(__name__)
    try:
        with PIL.Image.open(str(file_path)) as image:
            if image.mode in ("I;16", "I;16B", "I;16L", "I"):
                array: np.ndarray = np.array(image).astype(np.uint16)
            elif image.mode == "L":
                array = np.array(image)
            else:
                array = np.array(image.convert("L"))
    except (OSError, ValueError) as e:
        logger.error("Failed to read image %s: %s", file_path, e)
        return DataLoadError(f"cannot read image {file_path}: {e}")

    return array

def to_unit_float(array: np.ndarray) -> np.ndarray:
    """
    uint8 -> x / 255, uint16 -> x / 65535, as float32 in [0, 1].
    """
    if array.dtype == np.uint16:
        return (array.astype(np.float64) / 65535.0).astype(np.float32)
    return (array.astype(np.float64) / 255.0).astype(np.float32)

def quantize(values: np.ndarray, bits: int = 8) -> np.ndarray:
    """
    [0, 1] floats -> rounded uint8 (bits = 8) or uint16 (bits = 16).
    """
    assert bits in (8, 16), "bits must be 8 or 16"
    scale: float = 255.0 if bits == 8 else 65535.0
    dtype = np.uint8 if bits == 8 else np.uint16
    return np.round(np.clip(values, 0.0, 1.0) * scale).astype(dtype)

def encode_png(array: np.ndarray) -> bytes:

    assert array.ndim in (2, 3), "PNG arrays must be (h, w) grayscale or (h, w, 3) colour"
    assert array.dtype in (np.uint8, np.uint16), "PNG arrays must be uint8 or uint16"

    image: PIL.Image.Image = PIL.Image.fromarray(np.ascontiguousarray(array))
    buffer: io.BytesIO = io.BytesIO()
    image.save(buffer, format = "PNG")
    return buffer.getvalue()

def write_png_atomic(file_path: str | Path, array: np.ndarray) -> None:
    write_bytes_atomic(file_path, encode_png(array))
