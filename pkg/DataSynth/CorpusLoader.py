import logging
import numpy as np
import PIL.Image
from dataclasses import dataclass, field
from pathlib import Path
from ..Core.Errors import DataLoadError
from .SplitEnum import SplitEnum
from .DatasetManifest import DatasetManifest, load_manifest
from .ImageIo import read_png, to_unit_float

@dataclass(slots = True)
class CorpusSample:
    stem: str
    image: np.ndarray
    label: int
    mask: np.ndarray | None
    split: SplitEnum
    group: str

    @staticmethod
    def create(stem: str, image: np.ndarray, label: int, mask: np.ndarray | None, split: SplitEnum, group: str) -> "CorpusSample":

        assert isinstance(image, np.ndarray) and image.ndim == 2, "image must be a 2-D numpy array"
        assert image.dtype == np.float32, "image must be float32"
        assert mask is None or mask.shape == image.shape, "mask dims must match image dims"
        assert isinstance(split, SplitEnum), "split must be an instance of SplitEnum"
        return CorpusSample(stem, image, label, mask, split, group)

@dataclass(slots = True)
class CorpusDataset:
    classes: list[str]
    samples: list[CorpusSample] = field(default_factory = list)

    def __len__(self) -> int:
        return len(self.samples)

    def in_split(self, split: SplitEnum) -> list[CorpusSample]:
        return [sample for sample in self.samples if sample.split == split]

    def by_stem(self) -> dict[str, CorpusSample]:
        return {sample.stem: sample for sample in self.samples}

def _resize(array: np.ndarray, target_size: int, nearest: bool) -> np.ndarray:
    if array.shape == (target_size, target_size):
        return array
    resample = PIL.Image.Resampling.NEAREST if nearest else PIL.Image.Resampling.BILINEAR
    return np.array(PIL.Image.fromarray(array).resize((target_size, target_size), resample = resample))

def load_corpus(manifest_path: str | Path, target_size: int | None = None, logger: logging.Logger | None = None) -> CorpusDataset | Exception:
    """
    Summary:
        Loads every manifest entry as a float32 grayscale image in [0, 1] (8-bit 255 -> 1.0),
        with its binary ground-truth mask when present, ordered by image path.
        Images of a different size are resized to target_size (bilinear; masks nearest).

    Returns:
        The dataset if successful, otherwise a DataLoadError naming the file.
    """
    logger = logger if logger is not None else logging.getLogger(__name__)

    manifest: DatasetManifest | Exception = load_manifest(manifest_path, check_paths = True, logger = logger)
    if isinstance(manifest, Exception):
        return manifest

    root: Path = Path(manifest_path).parent
    dataset: CorpusDataset = CorpusDataset(classes = list(manifest.classes))

    for entry in sorted(manifest.entries, key = lambda item: item.image):
        raw_image: np.ndarray | Exception = read_png(root / entry.image, logger)
        if isinstance(raw_image, Exception):
            return raw_image

        raw_mask: np.ndarray | None = None
        if entry.mask is not None:
            mask_result: np.ndarray | Exception = read_png(root / entry.mask, logger)
            if isinstance(mask_result, Exception):
                return mask_result
            if mask_result.shape != raw_image.shape:
                logger.error("Mask %s has dims %s but image has %s", entry.mask, mask_result.shape, raw_image.shape)
                return DataLoadError(f"mask {entry.mask} dims {mask_result.shape} do not match image dims {raw_image.shape}")
            raw_mask = mask_result

        if target_size is not None:
            if raw_image.dtype == np.uint16:
                raw_image = (raw_image // 257).astype(np.uint8)
            raw_image = _resize(raw_image, target_size, nearest = False)
            raw_mask = None if raw_mask is None else _resize(raw_mask, target_size, nearest = True)

        dataset.samples.append(CorpusSample.create(
            stem = entry.stem,
            image = to_unit_float(raw_image),
            label = entry.label,
            mask = None if raw_mask is None else (raw_mask > 0).astype(np.uint8),
            split = entry.split,
            group = entry.group,
        ))

    logger.info("Loaded %d samples from %s", len(dataset), manifest_path)
    return dataset
