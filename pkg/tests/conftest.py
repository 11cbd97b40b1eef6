import sys
import importlib.util
from pathlib import Path
import numpy as np
import pytest

__project_root: Path = Path(__file__).parent.parent

# * the repository root is the package; register it under its import name when not installed
if "ptri_camforge" not in sys.modules and importlib.util.find_spec("ptri_camforge") is None:
    spec = importlib.util.spec_from_file_location("ptri_camforge", __project_root / "__init__.py", submodule_search_locations = [str(__project_root)])
    module = importlib.util.module_from_spec(spec)
    sys.modules["ptri_camforge"] = module
    spec.loader.exec_module(module)

sys.path.insert(0, str(Path(__file__).parent))

@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
