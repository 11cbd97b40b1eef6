import logging
import numpy as np
from pathlib import Path
from overrides import override
from ...DataSynth.CorpusLoader import CorpusDataset, CorpusSample
from ...DataSynth.ImageIo import read_png, to_unit_float
from ...DataSynth.SplitEnum import SplitEnum
from ...Objectives.Losses import seed_regions_from_masks
from ...Segmentation.MixedUNet import MixedUNetConfig, MixedUNetModel
from ...Segmentation.SegmentationTrainer import SegmentationTarget, SegmentationTrainConfig, train_segmentation
from ..PipelineConfig import PipelineConfig
from ..RunLayout import RunLayout
from ..StageAbc import StageAbc
from ..StageEnum import StageEnum

MIXED_UNET: str = "mixed_unet"
SINGLE_BRANCH: str = "single_branch"

def segmentation_variants(config: PipelineConfig) -> list[str]:
    """
    The two-branch network, plus the single-branch ablation when enabled.
    unet.single_branch swaps the main network itself for the single-branch form.
    """
    variants: list[str] = [MIXED_UNET]
    if config.eval.ablation and not config.unet.single_branch:
        variants.append(SINGLE_BRANCH)
    return variants

def build_segmentation_model(config: PipelineConfig, variant: str, logger: logging.Logger | None = None) -> MixedUNetModel:
    unet_config: MixedUNetConfig = MixedUNetConfig.create(
        in_channels = 1,
        num_classes = config.unet.classes,
        base_channels = config.unet.base_channels,
        single_branch = config.unet.single_branch or variant == SINGLE_BRANCH,
        seed = config.seed,
    )
    return MixedUNetModel(unet_config, logger)

def load_target(layout: RunLayout, sample: CorpusSample, bg_threshold: float, logger: logging.Logger) -> SegmentationTarget | Exception:
    """
    Seeds from the Refined_mask and fused CAM, plus the CRF_mask, of one image.
    """
    arrays: list[np.ndarray] = []
    for path in (layout.seed_mask(sample.stem), layout.fused_cam(sample.stem), layout.crf_mask(sample.stem)):
        array: np.ndarray | Exception = read_png(path, logger)
        if isinstance(array, Exception):
            return array
        arrays.append(array)
    seed_png, fused_png, crf_png = arrays

    seeds = seed_regions_from_masks((seed_png > 0).astype(np.uint8), to_unit_float(fused_png).astype(np.float64), min(sample.label, 1), bg_threshold)
    return SegmentationTarget.create(seeds.seed_map[0], (crf_png > 0).astype(np.uint8))

class TrainSegmentationStage(StageAbc):
    """
    Trains the Mixed-UNet (and the single-branch ablation when enabled) on the pseudo
    supervision of the train split, scoring the val split every epoch.
    """

    config_sections = ("data", "unet", "seg", "seeds", "augment", "eval.ablation")

    @property
    @override
    def stage(self) -> StageEnum:
        return StageEnum.TRAIN_SEG

    @override
    def input_paths(self) -> list[Path]:
        layout = self._context.layout
        paths: list[Path] = layout.corpus_files()
        for stem in layout.stems():
            paths.extend([layout.seed_mask(stem), layout.fused_cam(stem), layout.crf_mask(stem)])
        return paths

    @override
    def output_paths(self) -> list[Path]:
        layout = self._context.layout
        paths: list[Path] = []
        for variant in segmentation_variants(self._context.config):
            paths.extend([layout.segmentation_checkpoint(variant), layout.segmentation_history(variant)])
        return paths

    @override
    def run(self) -> Exception | None:
        config: PipelineConfig = self._context.config
        layout: RunLayout = self._context.layout
        dataset: CorpusDataset | Exception = self._context.load_corpus()
        if isinstance(dataset, Exception):
            return dataset

        train_samples: list[CorpusSample] = dataset.in_split(SplitEnum.TRAIN)
        val_samples: list[CorpusSample] = dataset.in_split(SplitEnum.VAL)
        targets: dict[str, SegmentationTarget] = {}
        for sample in train_samples + val_samples:
            target: SegmentationTarget | Exception = load_target(layout, sample, config.seeds.bg_threshold, self._logger)
            if isinstance(target, Exception):
                return target
            targets[sample.stem] = target

        train_cfg: SegmentationTrainConfig = SegmentationTrainConfig.create(config.segmentation_train_config(), config.seg.loss_mode, config.seg.allow_ce_fallback)
        for variant in segmentation_variants(config):
            model: MixedUNetModel = build_segmentation_model(config, variant, self._logger)
            self._logger.info("Training %s with %d parameters on %d images", variant, model.parameter_count(), len(train_samples))
            train_segmentation(model, train_samples, targets, train_cfg, val_samples, layout.segmentation_history(variant), self._logger)
            save_error: Exception | None = model.save_checkpoint(layout.segmentation_checkpoint(variant))
            if save_error is not None:
                return save_error
        return None
