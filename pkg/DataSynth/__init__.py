from .SplitEnum import SplitEnum
from .DatasetManifest import DatasetManifest, ManifestEntry, load_manifest, save_manifest, assign_group_splits
from .ImageIo import read_png, write_png_atomic, encode_png, to_unit_float, quantize
from .CorpusGenerator import generate_corpus, render_sample, SyntheticSample, CLASS_NAMES
from .CorpusLoader import CorpusDataset, CorpusSample, load_corpus
from .Augmentation import AugmentConfig, augment, ALLOWED_ROTATIONS
from .DirectoryIngest import ingest_directory, iter_image_files

__all__ = [
    'SplitEnum',
    'DatasetManifest',
    'ManifestEntry',
    'load_manifest',
    'save_manifest',
    'assign_group_splits',
    'read_png',
    'write_png_atomic',
    'encode_png',
    'to_unit_float',
    'quantize',
    'generate_corpus',
    'render_sample',
    'SyntheticSample',
    'CLASS_NAMES',
    'CorpusDataset',
    'CorpusSample',
    'load_corpus',
    'AugmentConfig',
    'augment',
    'ALLOWED_ROTATIONS',
    'ingest_directory',
    'iter_image_files',
]
