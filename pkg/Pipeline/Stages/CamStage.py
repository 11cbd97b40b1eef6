import numpy as np
from pathlib import Path
from overrides import override
from ...Core.Errors import ConfigurationError
from ...CamRefine.Cam import Cam, ScaleSet, ThresholdConfig
from ...CamRefine.CamOps import RefinedCams, normalize, origin_cam, refined_cam, threshold
from ...Classification.ClassifierModel import ClassifierModel
from ...DataSynth.CorpusLoader import CorpusDataset, CorpusSample
from ...DataSynth.ImageIo import quantize, write_png_atomic
from ..StageAbc import StageAbc
from ..StageEnum import StageEnum
from .TrainClassifierStage import build_classifier

FOREGROUND_CLASS: int = 1

def binary_png(mask: np.ndarray) -> np.ndarray:
    return (mask > 0).astype(np.uint8) * np.uint8(255)

class CamStage(StageAbc):
    """
    Per image: the normalized CAM of every scale and the fused CAM as 16-bit PNGs, the
    Refined_mask (threshold of the fused CAM) as <stem>.seed.png and the Origin_mask
    (threshold of the single-scale CAM) as <stem>.origin.png. Negative images get empty masks.
    """

    config_sections = ("data", "cls", "cam")

    @property
    @override
    def stage(self) -> StageEnum:
        return StageEnum.CAMS

    @override
    def input_paths(self) -> list[Path]:
        return self._context.layout.corpus_files() + [self._context.layout.classifier_checkpoint]

    @override
    def output_paths(self) -> list[Path]:
        layout = self._context.layout
        paths: list[Path] = []
        for stem in layout.stems():
            paths.extend(layout.scale_cam(stem, ratio) for ratio in self._context.config.cam.scales)
            paths.extend([layout.fused_cam(stem), layout.seed_mask(stem), layout.origin_mask(stem)])
        return paths

    def _write_sample(self, model: ClassifierModel, sample: CorpusSample, scales: ScaleSet, cfg: ThresholdConfig) -> None:
        layout = self._context.layout
        refined: RefinedCams = refined_cam(model, sample.image, scales, FOREGROUND_CLASS, self._context.config.cam.prefuse_norm)

        single_scale: list[Cam] = [cam for cam in refined.per_scale if cam.scale == 1.0]
        origin: Cam = normalize(single_scale[0]) if single_scale else origin_cam(model, sample.image, FOREGROUND_CLASS)

        for cam in refined.per_scale:
            write_png_atomic(layout.scale_cam(sample.stem, cam.scale), quantize(normalize(cam).values, bits = 16))
        write_png_atomic(layout.fused_cam(sample.stem), quantize(refined.fused.values, bits = 16))

        if sample.label == 0:
            empty: np.ndarray = np.zeros(sample.image.shape, dtype = np.uint8)
            write_png_atomic(layout.seed_mask(sample.stem), empty)
            write_png_atomic(layout.origin_mask(sample.stem), empty)
        else:
            write_png_atomic(layout.seed_mask(sample.stem), binary_png(threshold(refined.fused, cfg)))
            write_png_atomic(layout.origin_mask(sample.stem), binary_png(threshold(origin, cfg)))
        self._logger.debug("CAMs written for %s", sample.stem)

    @override
    def run(self) -> Exception | None:
        config = self._context.config
        dataset: CorpusDataset | Exception = self._context.load_corpus()
        if isinstance(dataset, Exception):
            return dataset
        if len(dataset.classes) != 2:
            raise ConfigurationError(f"CAM pseudo-masks need exactly one background and one foreground class, got {dataset.classes}")

        model: ClassifierModel = build_classifier(config, len(dataset.classes), self._logger)
        load_error: Exception | None = model.load_checkpoint_from_file(self._context.layout.classifier_checkpoint)
        if load_error is not None:
            return load_error
        model.eval()

        scales: ScaleSet = ScaleSet.create(config.cam.scales)
        cfg: ThresholdConfig = ThresholdConfig.create(config.cam.effective_threshold)
        self._context.map_images(lambda sample: self._write_sample(model, sample, scales, cfg), dataset.samples)
        self._logger.info("CAMs written for %d images at scales %s", len(dataset), list(scales.ratios))
        return None
