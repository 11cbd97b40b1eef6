from pathlib import Path
from overrides import override
from ...DataSynth.CorpusGenerator import generate_corpus
from ...DataSynth.DatasetManifest import DatasetManifest
from ...DataSynth.DirectoryIngest import ingest_directory
from ..StageAbc import StageAbc
from ..StageEnum import StageEnum

class GenDataStage(StageAbc):
    """
    Writes the synthetic corpus, or a manifest over an ingested directory, into <run>/data.
    """

    config_sections = ("data",)

    @property
    @override
    def stage(self) -> StageEnum:
        return StageEnum.GEN_DATA

    @override
    def input_paths(self) -> list[Path]:
        data = self._context.config.data
        if data.source == "synthetic":
            return []
        return sorted(path for path in Path(data.ingest_root).rglob("*") if path.is_file())

    @override
    def output_paths(self) -> list[Path]:
        if self._context.config.data.source == "synthetic":
            return self._context.layout.corpus_files()
        return [self._context.layout.manifest]

    @override
    def run(self) -> Exception | None:
        config = self._context.config
        result: DatasetManifest | Exception
        if config.data.source == "synthetic":
            result = generate_corpus(
                n_pos = config.data.n_pos,
                n_neg = config.data.n_neg,
                size = config.data.size,
                seed = config.seed,
                out_dir = self._context.layout.data_dir,
                group_size = config.data.group_size,
                fractions = config.data.fractions,
                workers = config.workers,
                logger = self._logger,
            )
        else:
            result = ingest_directory(
                root = config.data.ingest_root,
                out_dir = self._context.layout.data_dir,
                seed = config.seed,
                class_names = config.data.class_names,
                fractions = config.data.fractions,
                logger = self._logger,
            )
        return result if isinstance(result, Exception) else None
