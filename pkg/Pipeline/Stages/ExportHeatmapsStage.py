import numpy as np
from pathlib import Path
from overrides import override
from ...DataSynth.CorpusLoader import CorpusDataset, CorpusSample
from ...DataSynth.ImageIo import read_png, to_unit_float, write_png_atomic
from ..Heatmap import overlay_heatmap
from ..RunLayout import RunLayout, scale_tag
from ..StageAbc import StageAbc
from ..StageEnum import StageEnum

class ExportHeatmapsStage(StageAbc):
    """
    Colour overlays of the fused CAM and of every per-scale CAM, <stem>.fused.png and <stem>.scale<r>.png.
    """

    config_sections = ("data", "cam.scales")

    @property
    @override
    def stage(self) -> StageEnum:
        return StageEnum.EXPORT_HEATMAPS

    def _sources(self, stem: str) -> list[tuple[str, Path]]:
        layout: RunLayout = self._context.layout
        sources: list[tuple[str, Path]] = [("fused", layout.fused_cam(stem))]
        sources.extend((f"scale{scale_tag(ratio)}", layout.scale_cam(stem, ratio)) for ratio in self._context.config.cam.scales)
        return sources

    @override
    def input_paths(self) -> list[Path]:
        paths: list[Path] = self._context.layout.corpus_files()
        for stem in self._context.layout.stems():
            paths.extend(path for _, path in self._sources(stem))
        return paths

    @override
    def output_paths(self) -> list[Path]:
        layout: RunLayout = self._context.layout
        return [layout.heatmap(stem, tag) for stem in layout.stems() for tag, _ in self._sources(stem)]

    def _export_sample(self, sample: CorpusSample) -> Exception | None:
        for tag, cam_path in self._sources(sample.stem):
            cam: np.ndarray | Exception = read_png(cam_path, self._logger)
            if isinstance(cam, Exception):
                return cam
            overlay: np.ndarray = overlay_heatmap(to_unit_float(cam).astype(np.float64), sample.image.astype(np.float64))
            write_png_atomic(self._context.layout.heatmap(sample.stem, tag), overlay)
        return None

    @override
    def run(self) -> Exception | None:
        dataset: CorpusDataset | Exception = self._context.load_corpus()
        if isinstance(dataset, Exception):
            return dataset

        results: list[Exception | None] = self._context.map_images(self._export_sample, dataset.samples)
        errors: list[Exception] = [result for result in results if result is not None]
        return errors[0] if errors else None
