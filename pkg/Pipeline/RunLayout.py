from pathlib import Path
from ..DataSynth.DatasetManifest import DatasetManifest, ManifestEntry, load_manifest
from .StageEnum import StageEnum

def scale_tag(ratio: float) -> str:
    """
    0.5 -> "0.5", 1.0 -> "1", 2.0 -> "2".
    """
    return f"{ratio:g}"

class RunLayout:
    """
    Fixed file naming under a run directory. Every stage reads and writes through it.
    """

    def __init__(self, root: str | Path):
        self.__root: Path = Path(root)

    @property
    def root(self) -> Path:
        return self.__root

    @property
    def resolved_config(self) -> Path:
        return self.__root / "config.resolved.json"

    @property
    def data_dir(self) -> Path:
        return self.__root / "data"

    @property
    def manifest(self) -> Path:
        return self.data_dir / "manifest.json"

    @property
    def classifier_dir(self) -> Path:
        return self.__root / "classifier"

    @property
    def classifier_checkpoint(self) -> Path:
        return self.classifier_dir / "classifier.ckpt"

    @property
    def classifier_history(self) -> Path:
        return self.classifier_dir / "history.csv"

    @property
    def cams_dir(self) -> Path:
        return self.__root / "cams"

    def scale_cam(self, stem: str, ratio: float) -> Path:
        return self.cams_dir / f"{stem}.scale{scale_tag(ratio)}.png"

    def fused_cam(self, stem: str) -> Path:
        return self.cams_dir / f"{stem}.fused.png"

    def seed_mask(self, stem: str) -> Path:
        return self.cams_dir / f"{stem}.seed.png"

    def origin_mask(self, stem: str) -> Path:
        return self.cams_dir / f"{stem}.origin.png"

    @property
    def refine_dir(self) -> Path:
        return self.__root / "refine"

    def crf_mask(self, stem: str) -> Path:
        return self.refine_dir / f"{stem}.crf.png"

    @property
    def segmentation_dir(self) -> Path:
        return self.__root / "segmentation"

    def segmentation_checkpoint(self, variant: str) -> Path:
        return self.segmentation_dir / f"{variant}.ckpt"

    def segmentation_history(self, variant: str) -> Path:
        return self.segmentation_dir / f"{variant}_history.csv"

    @property
    def eval_dir(self) -> Path:
        return self.__root / "eval"

    def eval_table(self, name: str) -> Path:
        return self.eval_dir / f"{name}.csv"

    @property
    def model_report(self) -> Path:
        return self.eval_dir / "model_report.json"

    @property
    def heatmaps_dir(self) -> Path:
        return self.__root / "heatmaps"

    def heatmap(self, stem: str, tag: str) -> Path:
        return self.heatmaps_dir / f"{stem}.{tag}.png"

    @property
    def stages_dir(self) -> Path:
        return self.__root / "stages"

    def stage_record(self, stage: StageEnum) -> Path:
        return self.stages_dir / f"{stage.value}.done.json"

    def read_manifest(self) -> DatasetManifest | None:
        """
        The run's manifest without touching the image files, or None before gen-data has run.
        """
        if not self.manifest.is_file():
            return None
        manifest: DatasetManifest | Exception = load_manifest(self.manifest, check_paths = False)
        return None if isinstance(manifest, Exception) else manifest

    def entry_files(self, entry: ManifestEntry) -> list[Path]:
        files: list[Path] = [self.data_dir / entry.image]
        if entry.mask is not None:
            files.append(self.data_dir / entry.mask)
        return files

    def corpus_files(self) -> list[Path]:
        """
        The manifest and every image and mask it references.
        """
        manifest: DatasetManifest | None = self.read_manifest()
        if manifest is None:
            return [self.manifest]
        files: list[Path] = [self.manifest]
        for entry in manifest.entries:
            files.extend(self.entry_files(entry))
        return files

    def stems(self) -> list[str]:
        manifest: DatasetManifest | None = self.read_manifest()
        return [] if manifest is None else sorted(entry.stem for entry in manifest.entries)
