import logging
from pathlib import Path
from overrides import override
from ...Classification.ClassifierModel import ClassifierModel
from ...Classification.ClassifierTrainer import train_classifier
from ...DataSynth.CorpusLoader import CorpusDataset
from ..PipelineConfig import PipelineConfig
from ..StageAbc import StageAbc
from ..StageEnum import StageEnum

def build_classifier(config: PipelineConfig, num_classes: int, logger: logging.Logger | None = None) -> ClassifierModel:
    return ClassifierModel(in_channels = 1, num_classes = num_classes, channels = tuple(config.cls.channels), seed = config.seed, logger = logger)

class TrainClassifierStage(StageAbc):

    config_sections = ("data", "cls", "augment")

    @property
    @override
    def stage(self) -> StageEnum:
        return StageEnum.TRAIN_CLS

    @override
    def input_paths(self) -> list[Path]:
        return self._context.layout.corpus_files()

    @override
    def output_paths(self) -> list[Path]:
        return [self._context.layout.classifier_checkpoint, self._context.layout.classifier_history]

    @override
    def run(self) -> Exception | None:
        dataset: CorpusDataset | Exception = self._context.load_corpus()
        if isinstance(dataset, Exception):
            return dataset

        model: ClassifierModel = build_classifier(self._context.config, len(dataset.classes), self._logger)
        train_classifier(model, dataset, self._context.config.classifier_train_config(), self._context.layout.classifier_history, self._logger)
        return model.save_checkpoint(self._context.layout.classifier_checkpoint)
