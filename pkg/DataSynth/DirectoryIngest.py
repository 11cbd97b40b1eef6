import os
import logging
import numpy as np
from pathlib import Path
from typing import Iterable, Iterator
from ..Core.Errors import ConfigurationError, DataLoadError
from .SplitEnum import SplitEnum
from .DatasetManifest import DatasetManifest, ManifestEntry, save_manifest, assign_group_splits

IMAGE_EXTENSIONS: tuple[str, ...] = (".png", ".jpg")
MASK_DIRECTORY: str = "masks"
GROUP_SEPARATOR: str = "__"

def iter_image_files(image_path_root: str | Path, skip_pattern: Iterable[str] | None = None) -> Iterator[Path]:
    """
    Summary:
        Yields paths to ".png" / ".jpg" files below image_path_root, in sorted order.

    Parameters:
        image_path_root: directory to walk.
        skip_pattern: if the path to an image file contains any of these strings, it is not yielded.
    """

    # * skip this entry if its path contains a skip pattern
    patterns: set[str] = set() if skip_pattern is None else set(skip_pattern)
    for root, directories, files in os.walk(image_path_root):
        directories.sort()

        for file in sorted(files):

            file_path: Path = Path(os.path.join(root, file))

            if any(pattern in str(file_path.absolute()) for pattern in patterns):
                continue
            if not file_path.is_file():
                continue
            if file_path.suffix.lower() not in IMAGE_EXTENSIONS:
                continue

            yield file_path

def group_of(stem: str) -> str:
    """
    "<group>__<name>" -> "<group>"; a stem without the separator is its own group.
    """
    prefix, separator, _ = stem.partition(GROUP_SEPARATOR)
    return prefix if separator and prefix else stem

def ingest_directory(
    root: str | Path,
    out_dir: str | Path | None = None,
    seed: int = 0,
    class_names: list[str] | None = None,
    fractions: tuple[float, float, float] = (0.6, 0.2, 0.2),
    logger: logging.Logger | None = None,
) -> DatasetManifest | Exception:
    """
    Summary:
        Builds a manifest for an external corpus laid out as <root>/<class-name>/*.png
        with optional ground truth in <root>/masks/<stem>.png. Class ids follow class_names
        (default: sorted sub-directory names); whole groups are assigned to splits.

    Parameters:
        root: corpus directory.
        out_dir: where manifest.json is written (default: root). Entry paths are relative to it.
        seed: seeds the group-to-split assignment.
        class_names: explicit class order, e.g. ["normal", "lesion"].
        fractions: train/val/test fractions.

    Returns:
        The manifest if successful, otherwise a DataLoadError or the I/O exception.
    """
    logger = logger if logger is not None else logging.getLogger(__name__)

    corpus_root: Path = Path(root)
    manifest_root: Path = corpus_root if out_dir is None else Path(out_dir)
    if not corpus_root.is_dir():
        logger.error("Corpus root %s is not a directory", corpus_root)
        return DataLoadError(f"corpus root {corpus_root} is not a directory")

    if class_names is None:
        class_names = sorted(entry.name for entry in corpus_root.iterdir() if entry.is_dir() and entry.name != MASK_DIRECTORY)
    if len(class_names) < 2:
        raise ConfigurationError(f"an ingested corpus needs at least 2 class directories, found {class_names}")

    samples: list[tuple[Path, int, Path | None]] = []
    for label, class_name in enumerate(class_names):
        class_dir: Path = corpus_root / class_name
        if not class_dir.is_dir():
            logger.error("Class directory %s is missing", class_dir)
            return DataLoadError(f"class directory {class_dir} is missing")

        for image_path in iter_image_files(class_dir):
            mask_path: Path = corpus_root / MASK_DIRECTORY / f"{image_path.stem}.png"
            samples.append((image_path, label, mask_path if mask_path.is_file() else None))

    # a group may hold slices of several classes, so groups are split across classes at once
    split_rng: np.random.Generator = np.random.default_rng(np.random.SeedSequence([seed, 0x5EED]))
    all_groups: list[str] = sorted({group_of(path.stem) for path, _, _ in samples})
    assignment: dict[str, SplitEnum] = assign_group_splits(all_groups, split_rng, fractions)

    def relative(path: Path) -> str:
        return Path(os.path.relpath(path, manifest_root)).as_posix()

    entries: list[ManifestEntry] = []
    for image_path, label, mask_path in samples:
        group: str = group_of(image_path.stem)
        entries.append(ManifestEntry(
            image = relative(image_path),
            label = label,
            mask = None if mask_path is None else relative(mask_path),
            split = assignment[group],
            group = group,
        ))

    manifest: DatasetManifest = DatasetManifest(classes = list(class_names), seed = seed, entries = entries)
    save_error: Exception | None = save_manifest(manifest, manifest_root / "manifest.json", logger)
    if save_error is not None:
        return save_error

    logger.info("Ingested %d images in %d classes from %s", len(entries), len(class_names), corpus_root)
    return manifest
