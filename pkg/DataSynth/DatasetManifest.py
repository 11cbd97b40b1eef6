import json
import logging
import numpy as np
from pathlib import Path
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from ..Core.AtomicFile import write_text_atomic
from ..Core.Errors import DataLoadError
from .SplitEnum import SplitEnum

class ManifestEntry(BaseModel):
    """
    One image. Paths are relative to the manifest's directory.
    """
    model_config = ConfigDict(extra = "forbid")

    image: str
    label: int = Field(ge = 0)
    mask: str | None = None
    split: SplitEnum
    group: str

    @property
    def stem(self) -> str:
        return Path(self.image).stem

class DatasetManifest(BaseModel):
    model_config = ConfigDict(extra = "forbid")

    classes: list[str] = Field(min_length = 2)
    seed: int = 0
    entries: list[ManifestEntry] = Field(default_factory = list)

    def entries_in(self, split: SplitEnum) -> list[ManifestEntry]:
        return [entry for entry in self.entries if entry.split == split]

    def leaked_groups(self) -> list[str]:
        """
        Group ids that appear in more than one split.
        """
        splits_by_group: dict[str, set[SplitEnum]] = {}
        for entry in self.entries:
            splits_by_group.setdefault(entry.group, set()).add(entry.split)
        return sorted(group for group, splits in splits_by_group.items() if len(splits) > 1)

def save_manifest(manifest: DatasetManifest, file_path: str | Path, logger: logging.Logger | None = None) -> Exception | None:

    logger = logger if logger is not None else logging.getLogger(__name__)
    try:
        payload: dict = manifest.model_dump(mode = "json")
        write_text_atomic(file_path, json.dumps(payload, indent = 2, sort_keys = True) + "\n")
    except OSError as e:
        logger.error("Error saving manifest to %s: %s", file_path, e)
        return e

    logger.info("Manifest with %d entries saved to %s", len(manifest.entries), file_path)
    return None

def load_manifest(file_path: str | Path, check_paths: bool = True, logger: logging.Logger | None = None) -> DatasetManifest | Exception:
    """
    Summary:
        Reads and validates manifest.json: schema, label range, split tags, group leakage and,
        when check_paths is set, the existence of every referenced file.

    Returns:
        The manifest if successful, otherwise a DataLoadError naming the problem.
    """
    logger = logger if logger is not None else logging.getLogger(__name__)
    manifest_path: Path = Path(file_path)

    try:
        manifest: DatasetManifest = DatasetManifest.model_validate(json.loads(manifest_path.read_text(encoding = "utf-8")))
    except OSError as e:
        logger.error("Cannot read manifest %s: %s", manifest_path, e)
        return DataLoadError(f"cannot read manifest {manifest_path}: {e}")
    except (json.JSONDecodeError, ValidationError) as e:
        logger.error("Invalid manifest %s: %s", manifest_path, e)
        return DataLoadError(f"invalid manifest {manifest_path}: {e}")

    for entry in manifest.entries:
        if entry.label >= len(manifest.classes):
            return DataLoadError(f"entry {entry.image} has label {entry.label} but only {len(manifest.classes)} classes")

    leaked: list[str] = manifest.leaked_groups()
    if leaked:
        logger.error("Groups %s appear in more than one split", leaked)
        return DataLoadError(f"groups present in more than one split: {', '.join(leaked)}")

    if check_paths:
        root: Path = manifest_path.parent
        for entry in manifest.entries:
            for relative in (entry.image, entry.mask):
                if relative is not None and not (root / relative).is_file():
                    logger.error("Manifest %s references missing file %s", manifest_path, relative)
                    return DataLoadError(f"missing file {root / relative}")

    return manifest

def assign_group_splits(groups: list[str], rng: np.random.Generator, fractions: tuple[float, float, float]) -> dict[str, SplitEnum]:
    """
    Summary:
        Shuffles whole groups and cuts the order into train/val/test by the given fractions,
        so every member of a group lands in the same split.
    """
    order: list[str] = [groups[i] for i in rng.permutation(len(groups))]
    n_train: int = int(round(fractions[0] * len(order)))
    n_val: int = int(round(fractions[1] * len(order)))
    assignment: dict[str, SplitEnum] = {}
    for position, group in enumerate(order):
        if position < n_train:
            assignment[group] = SplitEnum.TRAIN
        elif position < n_train + n_val:
            assignment[group] = SplitEnum.VAL
        else:
            assignment[group] = SplitEnum.TEST
    return assignment
