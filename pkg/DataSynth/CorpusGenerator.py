import logging
import numpy as np
from dataclasses import dataclass
from pathlib import Path
from concurrent.futures import ThreadPoolExecutor
from scipy.ndimage import gaussian_filter
from ..Core.Errors import ConfigurationError
from .SplitEnum import SplitEnum
from .DatasetManifest import DatasetManifest, ManifestEntry, save_manifest, assign_group_splits
from .ImageIo import quantize, write_png_atomic

CLASS_NAMES: list[str] = ["normal", "lesion"]
BORDER_MARGIN: float = 0.15

@dataclass(slots = True)
class SyntheticSample:
    image: np.ndarray
    mask: np.ndarray
    lesion_field: np.ndarray
    lesion_count: int

def entry_rng(seed: int, index: int) -> np.random.Generator:
    """
    Independent stream per (seed, entry index), so generation order never changes the output.
    """
    return np.random.default_rng(np.random.SeedSequence([seed, index]))

def render_sample(rng: np.random.Generator, size: int, positive: bool) -> SyntheticSample:
    """
    Summary:
        Draws one slice: an elliptical "brain" with smooth texture and, for positives,
        1-3 bright Gaussian lesions truncated to discs of radius 3-12% of the width.
        The lesion field is non-zero exactly on the ground-truth mask.
    """
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)

    cy: float = size / 2 + rng.uniform(-0.03, 0.03) * size
    cx: float = size / 2 + rng.uniform(-0.03, 0.03) * size
    semi_x: float = rng.uniform(0.36, 0.42) * size
    semi_y: float = rng.uniform(0.30, 0.38) * size
    ellipse: np.ndarray = ((xx - cx) / semi_x) ** 2 + ((yy - cy) / semi_y) ** 2
    inside: np.ndarray = ellipse <= 1.0

    texture: np.ndarray = gaussian_filter(rng.normal(size = (size, size)), sigma = size / 16.0, mode = "reflect")
    texture /= max(float(texture.std()), 1e-12)
    tissue_level: float = rng.uniform(0.38, 0.48)
    base: np.ndarray = np.where(inside, tissue_level + 0.05 * texture, 0.0)

    lesion_field: np.ndarray = np.zeros((size, size), dtype = np.float64)
    mask: np.ndarray = np.zeros((size, size), dtype = np.uint8)
    lesion_count: int = 0
    if positive:
        wanted: int = int(rng.integers(1, 4))
        attempts: int = 0
        while lesion_count < wanted:
            attempts += 1
            radius: float = rng.uniform(0.03, 0.12) * size
            low: float = BORDER_MARGIN * size + radius
            high: float = (1.0 - BORDER_MARGIN) * size - radius
            if attempts > 200:
                # fallback keeps every positive image positive
                radius, ly, lx = 0.06 * size, cy, cx
            elif low >= high:
                continue
            else:
                ly = rng.uniform(low, high)
                lx = rng.uniform(low, high)
                if ((lx - cx) / semi_x) ** 2 + ((ly - cy) / semi_y) ** 2 > 0.6:
                    continue

            distance_sq: np.ndarray = (xx - lx) ** 2 + (yy - ly) ** 2
            disc: np.ndarray = distance_sq <= radius * radius
            amplitude: float = rng.uniform(0.30, 0.45)
            blob: np.ndarray = amplitude * np.exp(-distance_sq / (2.0 * (radius / 1.5) ** 2))
            lesion_field = np.maximum(lesion_field, np.where(disc, blob, 0.0))
            mask[disc] = 1
            lesion_count += 1

    noise: np.ndarray = rng.normal(0.0, 0.01, size = (size, size))
    image: np.ndarray = np.clip(base + lesion_field + noise * inside, 0.0, 1.0)
    return SyntheticSample(image = image, mask = mask, lesion_field = lesion_field, lesion_count = lesion_count)

def generate_corpus(
    n_pos: int,
    n_neg: int,
    size: int,
    seed: int,
    out_dir: str | Path,
    group_size: int = 2,
    fractions: tuple[float, float, float] = (0.6, 0.2, 0.2),
    workers: int = 1,
    logger: logging.Logger | None = None,
) -> DatasetManifest | Exception:
    """
    Summary:
        Writes images/<stem>.png, masks/<stem>.png and manifest.json under out_dir.
        Consecutive images of one class share a group id (a synthetic "patient") and
        whole groups are assigned to train/val/test so no group spans two splits.
        Masks are ground truth for evaluation only.

    Returns:
        The manifest if successful, otherwise the I/O exception.
    """
    logger = logger if logger is not None else logging.getLogger(__name__)

    if size < 8 or size % 8 != 0:
        raise ConfigurationError(f"image size must be a positive multiple of 8, got {size}")
    if n_pos < 0 or n_neg < 0:
        raise ConfigurationError(f"image counts must be non-negative, got {n_pos} positive / {n_neg} negative")
    if group_size < 1:
        raise ConfigurationError(f"group size must be at least 1, got {group_size}")
    if abs(sum(fractions) - 1.0) > 1e-9 or min(fractions) < 0:
        raise ConfigurationError(f"split fractions must be non-negative and sum to 1, got {fractions}")

    root: Path = Path(out_dir)
    labels: list[int] = [1] * n_pos + [0] * n_neg
    stems: list[str] = [f"{index:05d}_{'pos' if label == 1 else 'neg'}" for index, label in enumerate(labels)]
    groups: list[str] = []
    for index, label in enumerate(labels):
        class_index: int = index if label == 1 else index - n_pos
        groups.append(f"{'pos' if label == 1 else 'neg'}-{class_index // group_size:04d}")

    split_rng: np.random.Generator = np.random.default_rng(np.random.SeedSequence([seed, 0x5EED]))
    assignment: dict[str, SplitEnum] = {}
    for prefix in ("pos", "neg"):
        class_groups: list[str] = sorted({group for group in groups if group.startswith(prefix)})
        assignment.update(assign_group_splits(class_groups, split_rng, fractions))

    def write_entry(index: int) -> ManifestEntry:
        sample: SyntheticSample = render_sample(entry_rng(seed, index), size, labels[index] == 1)
        image_relative: str = f"images/{stems[index]}.png"
        mask_relative: str = f"masks/{stems[index]}.png"
        write_png_atomic(root / image_relative, quantize(sample.image))
        write_png_atomic(root / mask_relative, sample.mask * np.uint8(255))
        logger.debug("Generated %s with %d lesions", stems[index], sample.lesion_count)
        return ManifestEntry(image = image_relative, label = labels[index], mask = mask_relative, split = assignment[groups[index]], group = groups[index])

    try:
        with ThreadPoolExecutor(max_workers = max(1, workers)) as executor:
            entries: list[ManifestEntry] = list(executor.map(write_entry, range(len(labels))))
    except OSError as e:
        logger.error("Failed to write synthetic corpus under %s: %s", root, e)
        return e

    manifest: DatasetManifest = DatasetManifest(classes = list(CLASS_NAMES), seed = seed, entries = entries)
    save_error: Exception | None = save_manifest(manifest, root / "manifest.json", logger)
    if save_error is not None:
        return save_error

    logger.info("Generated %d positive and %d negative %dx%d images under %s", n_pos, n_neg, size, size, root)
    return manifest
