from .Errors import ShapeError, ContractError, EmptySeedError, ConfigurationError, DataLoadError, StageError
from .LayerKindEnum import LayerKindEnum
from .Tensor import Tensor, no_grad, is_grad_enabled
from .LayerParams import LayerParams, BatchNormState
from .ModuleAbc import ModuleAbc
from .CheckpointPersistentAbc import CheckpointPersistentAbc
from .AdamOptimizer import AdamOptimizer, AdamState, adam_step
from .PolyScheduler import Scheduler, poly_lr
from .DoubleConvBlock import DoubleConvBlock
from . import Functional

__all__ = [
    'ShapeError',
    'ContractError',
    'EmptySeedError',
    'ConfigurationError',
    'DataLoadError',
    'StageError',
    'LayerKindEnum',
    'Tensor',
    'no_grad',
    'is_grad_enabled',
    'LayerParams',
    'BatchNormState',
    'ModuleAbc',
    'CheckpointPersistentAbc',
    'AdamOptimizer',
    'AdamState',
    'adam_step',
    'Scheduler',
    'poly_lr',
    'DoubleConvBlock',
    'Functional',
]
