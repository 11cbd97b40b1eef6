import json
import hashlib
import logging
from pathlib import Path
from pydantic import BaseModel, ConfigDict, ValidationError
from ..Core.AtomicFile import write_text_atomic

HASH_CHUNK_BYTES: int = 1 << 20

class StageRecord(BaseModel):
    """
    Completion record of one stage: the config fingerprint it ran with and the sha256 of
    every input it read and every output it wrote, keyed by path relative to the run root.
    """
    model_config = ConfigDict(extra = "forbid")

    stage: str
    config_hash: str
    inputs: dict[str, str]
    outputs: dict[str, str]

def hash_file(file_path: str | Path) -> str:

    digest = hashlib.sha256()
    with open(file_path, "rb") as handle:
        for chunk in iter(lambda: handle.read(HASH_CHUNK_BYTES), b""):
            digest.update(chunk)
    return digest.hexdigest()

def hash_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()

def _key(path: Path, root: Path) -> str:
    try:
        return path.resolve().relative_to(root.resolve()).as_posix()
    except ValueError:
        return path.resolve().as_posix()

def hash_files(paths: list[Path], root: Path) -> dict[str, str]:
    """
    sha256 per existing file, keyed relative to root (absolute for files outside it).
    """
    return {_key(path, root): hash_file(path) for path in paths if path.is_file()}

def save_record(record: StageRecord, file_path: str | Path, logger: logging.Logger | None = None) -> Exception | None:

    logger = logger if logger is not None else logging.getLogger(__name__)
    try:
        write_text_atomic(file_path, json.dumps(record.model_dump(mode = "json"), indent = 2, sort_keys = True) + "\n")
    except OSError as e:
        logger.error("Error saving stage record %s: %s", file_path, e)
        return e
    return None

def load_record(file_path: str | Path, logger: logging.Logger | None = None) -> StageRecord | None:
    """
    The stored record, or None when it is missing or unreadable (the stage then simply reruns).
    """
    logger = logger if logger is not None else logging.getLogger(__name__)
    path: Path = Path(file_path)
    if not path.is_file():
        return None
    try:
        return StageRecord.model_validate_json(path.read_text(encoding = "utf-8"))
    except (OSError, ValidationError) as e:
        logger.warning("Ignoring unreadable stage record %s: %s", path, e)
        return None

def is_up_to_date(record: StageRecord | None, config_hash: str, inputs: dict[str, str], outputs: dict[str, str]) -> bool:
    """
    True when the record matches the current config, inputs and outputs exactly.
    """
    if record is None:
        return False
    return record.config_hash == config_hash and record.inputs == inputs and record.outputs == outputs
