import sys
from pathlib import Path

__project_root: Path = Path(__file__).parent.parent.parent
if str(__project_root) not in sys.path:
    sys.path.insert(0, str(__project_root))

import argparse
import logging
from logging import Logger
from argparse import Namespace, ArgumentParser
from ptri_camforge.Core.Errors import ConfigurationError, DataLoadError, ShapeError, StageError
from ptri_camforge.Pipeline.PipelineConfig import PipelineConfig, resolve_config
from ptri_camforge.Pipeline.PipelineRunner import run_pipeline
from ptri_camforge.Pipeline.StageEnum import StageEnum
from ptri_camforge.Pipeline.Heatmap import export_heatmap
from ptri_camforge.Pipeline.Stages.RefineStage import refine_files

EXIT_OK: int = 0
EXIT_CONFIG: int = 2
EXIT_DATA: int = 3
EXIT_STAGE: int = 4

def _str2bool(v: str) -> bool:
    if v.lower() in ('yes', 'true', 't', 'y', '1'):
        return True
    elif v.lower() in ('no', 'false', 'f', 'n', '0'):
        return False
    else:
        raise argparse.ArgumentTypeError('Boolean value expected.')

def _global_options() -> ArgumentParser:

    parser = ArgumentParser(add_help = False)
    parser.add_argument("--config", help = "JSON config file, nested or dotted keys", type = Path, default = None)
    parser.add_argument("--seed", help = "global seed; every random draw of the run derives from it", type = int, default = None)
    parser.add_argument("--out", help = "run directory", type = Path, default = Path("runs/camforge"))
    parser.add_argument("--workers", help = "size of the per-image worker pool", type = int, default = None)
    parser.add_argument("--preset", help = "default set", choices = ["desk", "full"], default = None)
    parser.add_argument("--set", help = "override one config key, e.g. --set crf.iterations=5 (repeatable)", action = "append", default = [], dest = "overrides", metavar = "KEY=VALUE")
    parser.add_argument("--prefuse-norm", help = "min-max normalize every per-scale CAM before fusion", type = _str2bool, default = None)
    parser.add_argument("--force", help = "rerun stages even when their completion record is current", action = "store_true")
    parser.add_argument("--log-level", help = "log level", type = int, default = logging.INFO)
    return parser

def parse_commandline_args(argv: list[str] | None = None) -> Namespace:

    common: ArgumentParser = _global_options()
    parser = ArgumentParser(prog = "camforge", description = "Weakly supervised lesion segmentation from image-level labels.", formatter_class = argparse.ArgumentDefaultsHelpFormatter)
    commands = parser.add_subparsers(dest = "command", required = True)

    for stage in StageEnum.ordered():
        command: ArgumentParser = commands.add_parser(stage.value, parents = [common], help = f"run the {stage.value} stage", formatter_class = argparse.ArgumentDefaultsHelpFormatter)
        if stage == StageEnum.EXPORT_HEATMAPS:
            command.add_argument("--cam", help = "export a single CAM PNG instead of the run's CAMs", type = Path, default = None)
            command.add_argument("--image", help = "source image of --cam", type = Path, default = None)
            command.add_argument("--output", help = "overlay PNG written for --cam", type = Path, default = None)
        if stage == StageEnum.REFINE:
            command.add_argument("--seed-mask", help = "refine a single seed PNG instead of the run's masks", type = Path, default = None)
            command.add_argument("--image", help = "source image of --seed-mask", type = Path, default = None)
            command.add_argument("--cam", help = "CAM PNG of --seed-mask; the seed stands in when absent", type = Path, default = None)
            command.add_argument("--output", help = "CRF mask written for --seed-mask, default <stem>.crf.png beside it", type = Path, default = None)

    pipeline: ArgumentParser = commands.add_parser("pipeline", parents = [common], help = "run every stage in order", formatter_class = argparse.ArgumentDefaultsHelpFormatter)
    pipeline.add_argument("--stage", help = "run only this stage (repeatable)", choices = [stage.value for stage in StageEnum], action = "append", default = None)

    return parser.parse_args(argv)

def exit_code_for(error: Exception) -> int:
    """
    ConfigurationError -> 2, DataLoadError -> 3, any other stage failure -> 4.
    """
    cause: BaseException | None = error.__cause__ if isinstance(error, StageError) else error
    if isinstance(cause, ConfigurationError):
        return EXIT_CONFIG
    if isinstance(cause, DataLoadError):
        return EXIT_DATA
    return EXIT_STAGE

def _selected_stages(arguments: Namespace) -> list[StageEnum] | None:
    if arguments.command == "pipeline":
        return None if arguments.stage is None else [StageEnum(value) for value in arguments.stage]
    return [StageEnum(arguments.command)]

def _refine_single(arguments: Namespace, config: PipelineConfig, logger: Logger) -> int:

    if arguments.image is None:
        logger.error("--seed-mask needs --image")
        return EXIT_CONFIG
    seed_path: Path = arguments.seed_mask
    out_path: Path = arguments.output if arguments.output is not None else seed_path.parent / f"{seed_path.name.split('.')[0]}.crf.png"
    try:
        result: Exception | None = refine_files(seed_path, arguments.image, out_path, config.crf.to_params(), arguments.cam, logger)
    except ShapeError as e:
        logger.error("Cannot refine %s against %s: %s", seed_path, arguments.image, e)
        return EXIT_DATA
    if result is None:
        return EXIT_OK
    return EXIT_DATA if isinstance(result, (DataLoadError, OSError)) else EXIT_STAGE

def run(arguments: Namespace, logger: Logger) -> int:

    if arguments.command == StageEnum.EXPORT_HEATMAPS.value and arguments.cam is not None:
        if arguments.image is None or arguments.output is None:
            logger.error("--cam needs --image and --output")
            return EXIT_CONFIG
        try:
            result: Exception | None = export_heatmap(arguments.cam, arguments.image, arguments.output, logger)
        except ShapeError as e:
            logger.error("Cannot overlay %s on %s: %s", arguments.cam, arguments.image, e)
            return EXIT_DATA
        if result is None:
            return EXIT_OK
        return EXIT_DATA if isinstance(result, OSError) else EXIT_STAGE

    overrides: list[str] = list(arguments.overrides)
    if arguments.prefuse_norm is not None:
        overrides.append(f"cam.prefuse_norm={'true' if arguments.prefuse_norm else 'false'}")
    try:
        config: PipelineConfig = resolve_config(arguments.preset, arguments.config, overrides, arguments.seed, arguments.workers, logger)
    except ConfigurationError as e:
        logger.error("Configuration error: %s", e)
        return EXIT_CONFIG

    if arguments.command == StageEnum.REFINE.value and arguments.seed_mask is not None:
        return _refine_single(arguments, config, logger)

    logger.info("Run directory set to: %s", arguments.out)
    logger.debug("Preset %s, seed %d, %d workers", config.preset.value, config.seed, config.workers)

    error: Exception | None = run_pipeline(config, arguments.out, _selected_stages(arguments), arguments.force, logger)
    if error is None:
        return EXIT_OK
    logger.error("%s", error)
    return exit_code_for(error)

def main(argv: list[str] | None = None) -> int:
    arguments: Namespace = parse_commandline_args(argv)
    logger: Logger = logging.getLogger("camforge")
    logger.setLevel(arguments.log_level)
    logger.handlers.clear()
    console_handler: logging.StreamHandler = logging.StreamHandler()
    console_handler.setLevel(arguments.log_level)
    logger.addHandler(console_handler)
    return run(arguments, logger)

if __name__ == "__main__":
    sys.exit(main())
