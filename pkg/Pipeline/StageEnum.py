from enum import Enum

class StageEnum(Enum):
    """
    Pipeline stages in execution order; values double as CLI subcommand names.
    """
    GEN_DATA = "gen-data"
    TRAIN_CLS = "train-cls"
    CAMS = "cams"
    REFINE = "refine"
    TRAIN_SEG = "train-seg"
    EVAL = "eval"
    EXPORT_HEATMAPS = "export-heatmaps"

    @staticmethod
    def ordered() -> list["StageEnum"]:
        return list(StageEnum)
