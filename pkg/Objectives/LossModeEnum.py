from enum import Enum

class LossModeEnum(Enum):
    COMBINED = "combined"
    SEED = "seed"
    CE = "ce"
