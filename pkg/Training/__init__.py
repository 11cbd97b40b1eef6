from .TrainConfig import TrainConfig, iterate_batches
from .TrainingHistory import TrainingHistory, HistoryRecord

__all__ = [
    'TrainConfig',
    'iterate_batches',
    'TrainingHistory',
    'HistoryRecord',
]
