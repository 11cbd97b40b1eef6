import logging
import numpy as np
from pathlib import Path
from overrides import override
from ...DataSynth.CorpusLoader import CorpusDataset, CorpusSample
from ...DataSynth.ImageIo import read_png, to_unit_float, write_png_atomic
from ...DenseCrf.CrfParams import CrfParams
from ...DenseCrf.MeanField import refine_mask
from ..StageAbc import StageAbc
from ..StageEnum import StageEnum
from .CamStage import binary_png

def refine_files(
    seed_path: str | Path,
    image_path: str | Path,
    out_path: str | Path,
    params: CrfParams,
    cam_path: str | Path | None = None,
    logger: logging.Logger | None = None,
) -> Exception | None:
    """
    Summary:
        Refines one seed PNG against its source image outside a run directory and writes the
        binary CRF mask PNG. Without a CAM the seed itself stands in for it.

    Returns:
        None if successful, otherwise the read or write exception.
    """
    logger = logger if logger is not None else logging.getLogger(__name__)

    seed: np.ndarray | Exception = read_png(seed_path, logger)
    if isinstance(seed, Exception):
        return seed
    image: np.ndarray | Exception = read_png(image_path, logger)
    if isinstance(image, Exception):
        return image
    binary: np.ndarray = (seed > 0).astype(np.uint8)
    cam: np.ndarray = binary.astype(np.float64)
    if cam_path is not None:
        cam_png: np.ndarray | Exception = read_png(cam_path, logger)
        if isinstance(cam_png, Exception):
            return cam_png
        cam = to_unit_float(cam_png).astype(np.float64)

    mask: np.ndarray = refine_mask(binary, cam, to_unit_float(image).astype(np.float64), params)
    try:
        write_png_atomic(out_path, binary_png(mask))
    except OSError as e:
        logger.error("Error writing CRF mask %s: %s", out_path, e)
        return e

    logger.info("CRF mask for %s written to %s", seed_path, out_path)
    return None

class RefineStage(StageAbc):
    """
    Dense-CRF refinement of every Refined_mask into the CRF_mask, <stem>.crf.png.
    """

    config_sections = ("data", "crf")

    @property
    @override
    def stage(self) -> StageEnum:
        return StageEnum.REFINE

    @override
    def input_paths(self) -> list[Path]:
        layout = self._context.layout
        paths: list[Path] = layout.corpus_files()
        for stem in layout.stems():
            paths.extend([layout.fused_cam(stem), layout.seed_mask(stem)])
        return paths

    @override
    def output_paths(self) -> list[Path]:
        return [self._context.layout.crf_mask(stem) for stem in self._context.layout.stems()]

    def _refine_sample(self, sample: CorpusSample, params: CrfParams) -> Exception | None:
        layout = self._context.layout
        if sample.label == 0:
            write_png_atomic(layout.crf_mask(sample.stem), np.zeros(sample.image.shape, dtype = np.uint8))
            return None

        seed: np.ndarray | Exception = read_png(layout.seed_mask(sample.stem), self._logger)
        if isinstance(seed, Exception):
            return seed
        fused: np.ndarray | Exception = read_png(layout.fused_cam(sample.stem), self._logger)
        if isinstance(fused, Exception):
            return fused

        mask: np.ndarray = refine_mask((seed > 0).astype(np.uint8), to_unit_float(fused).astype(np.float64), sample.image.astype(np.float64), params)
        write_png_atomic(layout.crf_mask(sample.stem), binary_png(mask))
        self._logger.debug("CRF mask written for %s", sample.stem)
        return None

    @override
    def run(self) -> Exception | None:
        dataset: CorpusDataset | Exception = self._context.load_corpus()
        if isinstance(dataset, Exception):
            return dataset

        params: CrfParams = self._context.config.crf.to_params()
        results: list[Exception | None] = self._context.map_images(lambda sample: self._refine_sample(sample, params), dataset.samples)
        errors: list[Exception] = [result for result in results if result is not None]
        return errors[0] if errors else None
