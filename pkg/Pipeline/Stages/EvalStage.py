import io
import csv
import json
import numpy as np
from pathlib import Path
from overrides import override
from ...Core.AtomicFile import write_text_atomic
from ...Core.Errors import DataLoadError
from ...Classification.ClassifierModel import ClassifierModel
from ...Classification.ClassifierTrainer import evaluate_classifier
from ...DataSynth.CorpusLoader import CorpusDataset, CorpusSample
from ...DataSynth.DatasetManifest import DatasetManifest
from ...DataSynth.ImageIo import read_png
from ...DataSynth.SplitEnum import SplitEnum
from ...Objectives.Metrics import MetricsReport, evaluate, mean_report
from ...Segmentation.MixedUNet import MixedUNetModel
from ...Segmentation.SegmentationInference import ModelReport, model_report, predict_masks
from ..PipelineConfig import PipelineConfig
from ..RunLayout import RunLayout
from ..StageAbc import StageAbc
from ..StageEnum import StageEnum
from .TrainClassifierStage import build_classifier
from .TrainSegmentationStage import build_segmentation_model, segmentation_variants

AGGREGATE_ROW: str = "__aggregate__"
MASK_FAMILIES: tuple[str, ...] = ("origin_mask", "refined_mask", "crf_mask")

def metrics_table(rows: list[tuple[str, MetricsReport]], aggregate: MetricsReport) -> str:
    """
    CSV with header image,pa,miou,dice, one row per image and a final aggregate row.
    """
    buffer: io.StringIO = io.StringIO()
    writer = csv.writer(buffer, lineterminator = "\n")
    writer.writerow(["image", "pa", "miou", "dice"])
    for stem, report in rows + [(AGGREGATE_ROW, aggregate)]:
        writer.writerow([stem, f"{report.pa:.6f}", f"{report.miou:.6f}", f"{report.dice:.6f}"])
    return buffer.getvalue()

def summary_table(rows: list[tuple[str, int, MetricsReport]]) -> str:

    buffer: io.StringIO = io.StringIO()
    writer = csv.writer(buffer, lineterminator = "\n")
    writer.writerow(["variant", "images", "pa", "miou", "dice"])
    for variant, count, report in rows:
        writer.writerow([variant, count, f"{report.pa:.6f}", f"{report.miou:.6f}", f"{report.dice:.6f}"])
    return buffer.getvalue()

def _has_positive_masks(manifest: DatasetManifest) -> bool:
    return any(entry.mask is not None and entry.label > 0 for entry in manifest.entries)

def _has_test_masks(manifest: DatasetManifest) -> bool:
    return any(entry.mask is not None and entry.split == SplitEnum.TEST for entry in manifest.entries)

class EvalStage(StageAbc):
    """
    Scores the three pseudo-mask families over every positive image with ground truth, and the
    segmentation networks (with and without CRF post-processing) over the test split.
    Writes one per-image CSV per variant, eval/summary.csv, the classifier's accuracy per split
    and eval/model_report.json (parameter count and wall-clock latency).
    """

    config_sections = ("data", "cls", "unet", "crf", "eval")

    @property
    @override
    def stage(self) -> StageEnum:
        return StageEnum.EVAL

    def _network_variants(self) -> list[str]:
        variants: list[str] = []
        for variant in segmentation_variants(self._context.config):
            variants.append(variant)
            if self._context.config.eval.unet_crf:
                variants.append(f"{variant}_crf")
        return variants

    @override
    def input_paths(self) -> list[Path]:
        layout: RunLayout = self._context.layout
        paths: list[Path] = layout.corpus_files() + [layout.classifier_checkpoint]
        for stem in layout.stems():
            paths.extend([layout.origin_mask(stem), layout.seed_mask(stem), layout.crf_mask(stem)])
        paths.extend(layout.segmentation_checkpoint(variant) for variant in segmentation_variants(self._context.config))
        return paths

    @override
    def output_paths(self) -> list[Path]:
        layout: RunLayout = self._context.layout
        manifest: DatasetManifest | None = layout.read_manifest()
        names: list[str] = ["classifier", "summary"]
        if manifest is not None and _has_positive_masks(manifest):
            names.extend(MASK_FAMILIES)
        if manifest is not None and _has_test_masks(manifest):
            names.extend(self._network_variants())
        return [layout.eval_table(name) for name in names] + [layout.model_report]

    def _mask_path(self, family: str, stem: str) -> Path:
        layout: RunLayout = self._context.layout
        if family == "origin_mask":
            return layout.origin_mask(stem)
        if family == "refined_mask":
            return layout.seed_mask(stem)
        return layout.crf_mask(stem)

    def _score_family(self, family: str, samples: list[CorpusSample]) -> list[tuple[str, MetricsReport]] | Exception:
        rows: list[tuple[str, MetricsReport]] = []
        for sample in samples:
            mask: np.ndarray | Exception = read_png(self._mask_path(family, sample.stem), self._logger)
            if isinstance(mask, Exception):
                return mask
            rows.append((sample.stem, evaluate((mask > 0).astype(np.uint8), sample.mask)))
        return rows

    def _classifier_table(self, dataset: CorpusDataset) -> str | Exception:
        config: PipelineConfig = self._context.config
        model: ClassifierModel = build_classifier(config, len(dataset.classes), self._logger)
        load_error: Exception | None = model.load_checkpoint_from_file(self._context.layout.classifier_checkpoint)
        if load_error is not None:
            return load_error
        model.eval()

        buffer: io.StringIO = io.StringIO()
        writer = csv.writer(buffer, lineterminator = "\n")
        writer.writerow(["split", "images", "loss", "accuracy"])
        for split in SplitEnum:
            samples: list[CorpusSample] = dataset.in_split(split)
            if samples:
                loss, accuracy = evaluate_classifier(model, samples)
                writer.writerow([split.value, len(samples), f"{loss:.6f}", f"{accuracy:.6f}"])
        return buffer.getvalue()

    @override
    def run(self) -> Exception | None:
        config: PipelineConfig = self._context.config
        layout: RunLayout = self._context.layout
        dataset: CorpusDataset | Exception = self._context.load_corpus()
        if isinstance(dataset, Exception):
            return dataset

        positives: list[CorpusSample] = [sample for sample in dataset.samples if sample.label > 0 and sample.mask is not None]
        test_samples: list[CorpusSample] = [sample for sample in dataset.in_split(SplitEnum.TEST) if sample.mask is not None]
        if not positives and not test_samples:
            return DataLoadError("the corpus has no ground-truth masks to evaluate against")

        classifier_table: str | Exception = self._classifier_table(dataset)
        if isinstance(classifier_table, Exception):
            return classifier_table
        write_text_atomic(layout.eval_table("classifier"), classifier_table)

        summary: list[tuple[str, int, MetricsReport]] = []
        if positives:
            for family in MASK_FAMILIES:
                rows: list[tuple[str, MetricsReport]] | Exception = self._score_family(family, positives)
                if isinstance(rows, Exception):
                    return rows
                aggregate: MetricsReport = mean_report([report for _, report in rows])
                write_text_atomic(layout.eval_table(family), metrics_table(rows, aggregate))
                summary.append((family, len(rows), aggregate))
                self._logger.info("%s over %d positive images: PA %.4f MIoU %.4f Dice %.4f", family, len(rows), aggregate.pa, aggregate.miou, aggregate.dice)

        reports: dict[str, dict[str, float | int]] = {}
        for variant in segmentation_variants(config):
            model: MixedUNetModel = build_segmentation_model(config, variant, self._logger)
            load_error: Exception | None = model.load_checkpoint_from_file(layout.segmentation_checkpoint(variant))
            if load_error is not None:
                return load_error
            model.eval()

            report: ModelReport = model_report(model, config.data.size)
            reports[variant] = report._asdict()
            if not test_samples:
                continue

            images: np.ndarray = np.stack([sample.image for sample in test_samples])
            predictions: dict[str, np.ndarray] = {variant: predict_masks(model, images)}
            if config.eval.unet_crf:
                predictions[f"{variant}_crf"] = predict_masks(model, images, config.crf.to_params())

            for name, masks in predictions.items():
                rows = [(sample.stem, evaluate(mask, sample.mask, config.unet.classes)) for sample, mask in zip(test_samples, masks)]
                aggregate = mean_report([row_report for _, row_report in rows])
                write_text_atomic(layout.eval_table(name), metrics_table(rows, aggregate))
                summary.append((name, len(rows), aggregate))
                self._logger.info("%s over %d test images: PA %.4f MIoU %.4f Dice %.4f", name, len(rows), aggregate.pa, aggregate.miou, aggregate.dice)

        write_text_atomic(layout.eval_table("summary"), summary_table(summary))
        write_text_atomic(layout.model_report, json.dumps(reports, indent = 2, sort_keys = True) + "\n")
        return None
