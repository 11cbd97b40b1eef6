import logging
from pathlib import Path
from ..Core.Errors import StageError
from .PipelineConfig import PipelineConfig, save_resolved_config
from .StageAbc import StageAbc, StageContext
from .StageEnum import StageEnum
from .Stages import GenDataStage, TrainClassifierStage, CamStage, RefineStage, TrainSegmentationStage, EvalStage, ExportHeatmapsStage

STAGE_CLASSES: dict[StageEnum, type[StageAbc]] = {
    StageEnum.GEN_DATA: GenDataStage,
    StageEnum.TRAIN_CLS: TrainClassifierStage,
    StageEnum.CAMS: CamStage,
    StageEnum.REFINE: RefineStage,
    StageEnum.TRAIN_SEG: TrainSegmentationStage,
    StageEnum.EVAL: EvalStage,
    StageEnum.EXPORT_HEATMAPS: ExportHeatmapsStage,
}

def build_stage(stage: StageEnum, context: StageContext) -> StageAbc:
    return STAGE_CLASSES[stage](context)

def run_pipeline(
    config: PipelineConfig,
    out_dir: str | Path,
    stages: list[StageEnum] | None = None,
    force: bool = False,
    logger: logging.Logger | None = None,
) -> Exception | None:
    """
    Summary:
        Echoes the resolved config to <out_dir>/config.resolved.json and runs the requested
        stages (default: all) in pipeline order. Completed, unchanged stages are skipped.
        The first failure aborts the run; outputs of earlier stages stay in place.

    Returns:
        None if successful, otherwise the failing stage's StageError.
    """
    logger = logger if logger is not None else logging.getLogger(__name__)

    context: StageContext = StageContext.create(config, out_dir, logger)
    try:
        save_resolved_config(config, context.layout.resolved_config)
    except OSError as e:
        logger.error("Cannot write the resolved config under %s: %s", out_dir, e)
        error: StageError = StageError("config", str(e))
        error.__cause__ = e
        return error

    selected: set[StageEnum] = set(StageEnum.ordered() if stages is None else stages)
    for stage in StageEnum.ordered():
        if stage not in selected:
            continue
        result: Exception | None = build_stage(stage, context).execute(force)
        if result is not None:
            return result

    logger.info("Run directory %s is complete", context.layout.root)
    return None
