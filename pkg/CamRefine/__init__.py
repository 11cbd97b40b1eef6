from .Cam import Cam, ScaleSet, ThresholdConfig, LabelMask, PAPER_SCALES, THRESHOLD_PRESETS, LARGE_LESION_THRESHOLD, SMALL_LESION_THRESHOLD
from .CamOps import compute_cam, multi_scale_cams, fuse, normalize, threshold, refined_cam, origin_cam, RefinedCams

__all__ = [
    'Cam',
    'ScaleSet',
    'ThresholdConfig',
    'LabelMask',
    'PAPER_SCALES',
    'THRESHOLD_PRESETS',
    'LARGE_LESION_THRESHOLD',
    'SMALL_LESION_THRESHOLD',
    'compute_cam',
    'multi_scale_cams',
    'fuse',
    'normalize',
    'threshold',
    'refined_cam',
    'origin_cam',
    'RefinedCams',
]
