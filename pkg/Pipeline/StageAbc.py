import json
import logging
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, TypeVar
from ..Core.Errors import DataLoadError, StageError
from ..DataSynth.CorpusLoader import CorpusDataset, load_corpus
from .PipelineConfig import PipelineConfig, flatten
from .RunLayout import RunLayout
from .StageEnum import StageEnum
from .StageRecord import StageRecord, hash_files, hash_text, is_up_to_date, load_record, save_record

T = TypeVar("T")
R = TypeVar("R")

@dataclass(slots = True)
class StageContext:
    config: PipelineConfig
    layout: RunLayout
    logger: logging.Logger

    @staticmethod
    def create(config: PipelineConfig, out_dir: str | Path, logger: logging.Logger | None = None) -> "StageContext":

        assert isinstance(config, PipelineConfig), "config must be an instance of PipelineConfig"
        return StageContext(config, RunLayout(out_dir), logger if logger is not None else logging.getLogger(__name__))

    def load_corpus(self) -> CorpusDataset | Exception:
        return load_corpus(self.layout.manifest, target_size = self.config.data.size, logger = self.logger)

    def map_images(self, work: Callable[[T], R], items: list[T]) -> list[R]:
        """
        Runs work over items on the configured worker pool, preserving order.
        """
        if self.config.workers <= 1:
            return [work(item) for item in items]
        with ThreadPoolExecutor(max_workers = self.config.workers) as executor:
            return list(executor.map(work, items))

class StageAbc(ABC):
    """
    One step of the pipeline. A stage is skipped when its completion record matches the
    current config sections it depends on, the hashes of its inputs and the hashes of its outputs.
    """

    # config sections (or dotted keys) whose values change this stage's outputs
    config_sections: tuple[str, ...] = ()

    def __init__(self, context: StageContext):
        self._context: StageContext = context
        self._logger: logging.Logger = context.logger

    @property
    @abstractmethod
    def stage(self) -> StageEnum:
        pass

    @abstractmethod
    def input_paths(self) -> list[Path]:
        """
        Files the stage reads. All must exist before it runs.
        """

    @abstractmethod
    def output_paths(self) -> list[Path]:
        """
        Files the stage writes.
        """

    @abstractmethod
    def run(self) -> Exception | None:
        """
        Summary:
            Produces the outputs.

        Returns:
            None if successful, otherwise the exception.
        """

    def config_hash(self) -> str:
        flat: dict[str, Any] = flatten(self._context.config.model_dump(mode = "json"))
        relevant: dict[str, Any] = {"seed": flat["seed"]}
        for key in self.config_sections:
            relevant.update({name: value for name, value in flat.items() if name == key or name.startswith(f"{key}.")})
        return hash_text(json.dumps(relevant, sort_keys = True))

    def execute(self, force: bool = False) -> Exception | None:
        """
        Summary:
            Runs the stage unless it is up to date, then writes its completion record.

        Returns:
            None if the stage ran or was skipped, otherwise a StageError whose cause is the failure.
        """
        layout: RunLayout = self._context.layout
        name: str = self.stage.value

        inputs: list[Path] = self.input_paths()
        missing: list[Path] = [path for path in inputs if not path.is_file()]
        if missing:
            self._logger.error("Stage %s is missing %d inputs, e.g. %s", name, len(missing), missing[0])
            error: StageError = StageError(name, f"missing input {missing[0]}")
            error.__cause__ = DataLoadError(f"missing input {missing[0]}")
            return error

        config_hash: str = self.config_hash()
        input_hashes: dict[str, str] = hash_files(inputs, layout.root)
        record_path: Path = layout.stage_record(self.stage)
        if not force and is_up_to_date(load_record(record_path, self._logger), config_hash, input_hashes, hash_files(self.output_paths(), layout.root)):
            self._logger.info("Stage %s is up to date, skipped", name)
            return None

        self._logger.info("Stage %s started", name)
        try:
            result: Exception | None = self.run()
        except Exception as e:
            result = e
        if result is not None:
            self._logger.error("Stage %s failed: %s", name, result)
            error = StageError(name, str(result))
            error.__cause__ = result
            return error

        record: StageRecord = StageRecord(stage = name, config_hash = config_hash, inputs = input_hashes, outputs = hash_files(self.output_paths(), layout.root))
        save_error: Exception | None = save_record(record, record_path, self._logger)
        if save_error is not None:
            error = StageError(name, str(save_error))
            error.__cause__ = save_error
            return error

        self._logger.info("Stage %s finished with %d outputs", name, len(record.outputs))
        return None
