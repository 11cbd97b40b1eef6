from .Pipeline.StageEnum import StageEnum
from .Pipeline.PresetEnum import PresetEnum

__all__ = ['StageEnum', 'PresetEnum', 'Core', 'DataSynth', 'Training', 'Classification', 'CamRefine', 'DenseCrf', 'Objectives', 'Segmentation', 'Pipeline']
