import csv
import numpy as np
import pytest
from pathlib import Path
from ptri_camforge.Pipeline.PipelineConfig import resolve_config
from ptri_camforge.Pipeline.PipelineRunner import run_pipeline
from ptri_camforge.Pipeline.RunLayout import RunLayout

# Desk preset end to end, once per seed; each run takes minutes on a CPU.
pytestmark = pytest.mark.slow

SEEDS: tuple[int, ...] = (7, 8, 9)

def read_rows(path: Path, key: str) -> dict[str, dict[str, str]]:
    with open(path, newline = "") as handle:
        return {row[key]: row for row in csv.DictReader(handle)}

@pytest.fixture(scope = "module")
def desk_runs(tmp_path_factory: pytest.TempPathFactory) -> list[RunLayout]:
    layouts: list[RunLayout] = []
    for seed in SEEDS:
        out_dir: Path = tmp_path_factory.mktemp(f"desk{seed}")
        assert run_pipeline(resolve_config(overrides = ["eval.ablation=true"], seed = seed), out_dir) is None
        layouts.append(RunLayout(out_dir))
    return layouts

def mean_over_runs(layouts: list[RunLayout], variant: str, column: str) -> float:
    return float(np.mean([float(read_rows(layout.eval_table("summary"), "variant")[variant][column]) for layout in layouts]))

class TestDeskScaleAcceptance:

    def test_classifier_accuracy(self, desk_runs: list[RunLayout]) -> None:
        for layout in desk_runs:
            accuracy: float = float(read_rows(layout.eval_table("classifier"), "split")["test"]["accuracy"])
            assert accuracy >= 0.95, layout.root

    def test_crf_masks_beat_refined_masks_beat_origin_masks(self, desk_runs: list[RunLayout]) -> None:
        origin: float = mean_over_runs(desk_runs, "origin_mask", "miou")
        refined: float = mean_over_runs(desk_runs, "refined_mask", "miou")
        crf: float = mean_over_runs(desk_runs, "crf_mask", "miou")
        assert crf > refined > origin

    def test_two_branches_beat_one(self, desk_runs: list[RunLayout]) -> None:
        mixed: float = mean_over_runs(desk_runs, "mixed_unet", "dice")
        assert mixed >= mean_over_runs(desk_runs, "single_branch", "dice")
        assert mixed >= 0.60
