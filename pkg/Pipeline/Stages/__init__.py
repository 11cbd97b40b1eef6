from .GenDataStage import GenDataStage
from .TrainClassifierStage import TrainClassifierStage, build_classifier
from .CamStage import CamStage, FOREGROUND_CLASS
from .RefineStage import RefineStage, refine_files
from .TrainSegmentationStage import TrainSegmentationStage, build_segmentation_model, segmentation_variants, load_target, MIXED_UNET, SINGLE_BRANCH
from .EvalStage import EvalStage, metrics_table, summary_table, AGGREGATE_ROW, MASK_FAMILIES
from .ExportHeatmapsStage import ExportHeatmapsStage

__all__ = [
    'GenDataStage',
    'TrainClassifierStage',
    'build_classifier',
    'CamStage',
    'FOREGROUND_CLASS',
    'RefineStage',
    'refine_files',
    'TrainSegmentationStage',
    'build_segmentation_model',
    'segmentation_variants',
    'load_target',
    'MIXED_UNET',
    'SINGLE_BRANCH',
    'EvalStage',
    'metrics_table',
    'summary_table',
    'AGGREGATE_ROW',
    'MASK_FAMILIES',
    'ExportHeatmapsStage',
]
