from enum import Enum

class LayerKindEnum(Enum):

    CONV2D = 0
    TRANSPOSED_CONV2D = 1
    BATCHNORM = 2
    LINEAR = 3
