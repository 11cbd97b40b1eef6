from enum import Enum

class PresetEnum(Enum):
    DESK = "desk"
    FULL = "full"
