from enum import Enum

class SplitEnum(Enum):
    TRAIN = "train"
    VAL = "val"
    TEST = "test"
