"""
CAMFORGE checkpoint format, all integers little-endian:

    magic        8 bytes   b"CAMFORGE"
    version      u32       CHECKPOINT_VERSION
    blob_count   u32
    blob_count times:
        name_length  u32
        name         name_length bytes, UTF-8
        ndim         u32
        dims         ndim x u32
        data         prod(dims) x f32, row-major
"""
import io
import struct
import logging
import numpy as np
from pathlib import Path
from typing import NamedTuple
from .AtomicFile import write_bytes_atomic

CHECKPOINT_MAGIC: bytes = b"CAMFORGE"
CHECKPOINT_VERSION: int = 1

class CheckpointHeader(NamedTuple):
    magic: bytes
    version: int
    blob_count: int

def encode_checkpoint(blobs: list[tuple[str, np.ndarray]]) -> bytes:

    buffer: io.BytesIO = io.BytesIO()
    buffer.write(struct.pack("<8sII", CHECKPOINT_MAGIC, CHECKPOINT_VERSION, len(blobs)))
    for name, array in blobs:
        encoded_name: bytes = name.encode("utf-8")
        buffer.write(struct.pack("<I", len(encoded_name)))
        buffer.write(encoded_name)
        buffer.write(struct.pack("<I", array.ndim))
        buffer.write(struct.pack(f"<{array.ndim}I", *array.shape))
        buffer.write(np.ascontiguousarray(array, dtype = "<f4").tobytes())
    return buffer.getvalue()

def decode_checkpoint(payload: bytes) -> dict[str, np.ndarray]:

    view: memoryview = memoryview(payload)
    offset: int = struct.calcsize("<8sII")
    if len(payload) < offset:
        raise ValueError("checkpoint shorter than its header")

    header: CheckpointHeader = CheckpointHeader(*struct.unpack_from("<8sII", view, 0))
    if header.magic != CHECKPOINT_MAGIC:
        raise ValueError(f"bad checkpoint magic {header.magic!r}")
    if header.version != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {header.version}")

    blobs: dict[str, np.ndarray] = {}
    for _ in range(header.blob_count):
        (name_length,) = struct.unpack_from("<I", view, offset)
        offset += 4
        name: str = bytes(view[offset:offset + name_length]).decode("utf-8")
        offset += name_length
        (ndim,) = struct.unpack_from("<I", view, offset)
        offset += 4
        dims: tuple[int, ...] = struct.unpack_from(f"<{ndim}I", view, offset)
        offset += 4 * ndim
        count: int = int(np.prod(dims)) if ndim > 0 else 1
        if offset + 4 * count > len(payload):
            raise ValueError(f"blob {name} truncated")
        blobs[name] = np.frombuffer(payload, dtype = "<f4", count = count, offset = offset).reshape(dims).astype(np.float32)
        offset += 4 * count

    if offset != len(payload):
        raise ValueError(f"{len(payload) - offset} trailing bytes after the last blob")
    return blobs

def save_checkpoint(file_path: str | Path, blobs: list[tuple[str, np.ndarray]], logger: logging.Logger | None = None) -> Exception | None:
    """
    Summary:
        Atomically writes the named blobs. Returns None on success, otherwise the exception.
    """
    logger = logger if logger is not None else logging.getLogger(__name__)
    try:
        write_bytes_atomic(file_path, encode_checkpoint(blobs))
    except OSError as e:
        logger.error("Error saving checkpoint to %s: %s", file_path, e)
        return e

    logger.info("Checkpoint saved to %s (%d blobs)", file_path, len(blobs))
    return None

def load_checkpoint(file_path: str | Path, logger: logging.Logger | None = None) -> dict[str, np.ndarray] | Exception:

    logger = logger if logger is not None else logging.getLogger(__name__)
    try:
        payload: bytes = Path(file_path).read_bytes()
        return decode_checkpoint(payload)
    except (OSError, ValueError, struct.error, UnicodeDecodeError) as e:
        logger.error("Error loading checkpoint from %s: %s", file_path, e)
        return e
