import os
import tempfile
from pathlib import Path

def write_bytes_atomic(file_path: str | Path, payload: bytes) -> None:
    """
    Summary:
        Write to a temporary file in the destination directory, then rename over the target,
        so readers never observe a partially written file.
    """
    target: Path = Path(file_path)
    target.parent.mkdir(parents = True, exist_ok = True)
    descriptor, temp_name = tempfile.mkstemp(prefix = f".{target.name}.", suffix = ".tmp", dir = target.parent)
    try:
        with os.fdopen(descriptor, "wb") as handle:
            handle.write(payload)
        os.replace(temp_name, target)
    except BaseException:
        if os.path.exists(temp_name):
            os.remove(temp_name)
        raise

def write_text_atomic(file_path: str | Path, text: str) -> None:
    write_bytes_atomic(file_path, text.encode("utf-8"))
