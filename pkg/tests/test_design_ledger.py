import re
import pytest
from pathlib import Path

ROOT: Path = Path(__file__).parent.parent
CITATION: re.Pattern = re.compile(r"`(examples/[^`]+)`")

def test_cited_sources_resolve() -> None:
    if not (ROOT / "examples").is_dir():
        pytest.skip("reference sources are not checked out")
    cited: list[str] = CITATION.findall((ROOT / "DESIGN.md").read_text(encoding = "utf-8"))
    assert cited
    assert [path for path in cited if not (ROOT / path).exists()] == []
