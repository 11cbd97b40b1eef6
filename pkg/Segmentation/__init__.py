from .MixedUNet import MixedUNetConfig, MixedUNetModel, param_count, single_branch_ablation, DEPTH
from .DecoderBranch import DecoderBranch
from .SegmentationInference import predict_masks, predict_probabilities, model_report, ModelReport
from .SegmentationTrainer import train_segmentation, score_segmentation, SegmentationTarget, SegmentationTrainConfig

__all__ = [
    'MixedUNetConfig',
    'MixedUNetModel',
    'param_count',
    'single_branch_ablation',
    'DEPTH',
    'DecoderBranch',
    'predict_masks',
    'predict_probabilities',
    'model_report',
    'ModelReport',
    'train_segmentation',
    'score_segmentation',
    'SegmentationTarget',
    'SegmentationTrainConfig',
]
