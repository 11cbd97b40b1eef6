from .PresetEnum import PresetEnum
from .StageEnum import StageEnum
from .PipelineConfig import PipelineConfig, PRESET_DEFAULTS, resolve_config, save_resolved_config, config_json, parse_override, flatten, unflatten, load_config_file
from .RunLayout import RunLayout, scale_tag
from .StageRecord import StageRecord, hash_file, hash_files, is_up_to_date, load_record, save_record
from .StageAbc import StageAbc, StageContext
from .Heatmap import overlay_heatmap, export_heatmap, COLORMAP_NAME, OVERLAY_ALPHA
from .PipelineRunner import run_pipeline, build_stage, STAGE_CLASSES

__all__ = [
    'PresetEnum',
    'StageEnum',
    'PipelineConfig',
    'PRESET_DEFAULTS',
    'resolve_config',
    'save_resolved_config',
    'config_json',
    'parse_override',
    'flatten',
    'unflatten',
    'load_config_file',
    'RunLayout',
    'scale_tag',
    'StageRecord',
    'hash_file',
    'hash_files',
    'is_up_to_date',
    'load_record',
    'save_record',
    'StageAbc',
    'StageContext',
    'overlay_heatmap',
    'export_heatmap',
    'COLORMAP_NAME',
    'OVERLAY_ALPHA',
    'run_pipeline',
    'build_stage',
    'STAGE_CLASSES',
]
