from .ClassifierModel import ClassifierModel, ClassifierOutput, classify, DEFAULT_CHANNELS
from .ClassifierTrainer import train_classifier, evaluate_classifier

__all__ = [
    'ClassifierModel',
    'ClassifierOutput',
    'classify',
    'DEFAULT_CHANNELS',
    'train_classifier',
    'evaluate_classifier',
]
