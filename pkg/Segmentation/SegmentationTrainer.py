import logging
import numpy as np
from dataclasses import dataclass
from pathlib import Path
from ..Core.Tensor import Tensor, no_grad
from ..Core.AdamOptimizer import AdamOptimizer
from ..Core.PolyScheduler import Scheduler, poly_lr
from ..Core.Errors import ConfigurationError, EmptySeedError
from ..DataSynth.CorpusLoader import CorpusSample
from ..DataSynth.Augmentation import augment
from ..Objectives.LossModeEnum import LossModeEnum
from ..Objectives.Losses import SeedRegions, seeding_loss, pixel_ce_loss, combined_loss
from ..Objectives.Metrics import evaluate
from ..Training.TrainConfig import TrainConfig, iterate_batches
from ..Training.TrainingHistory import TrainingHistory
from .MixedUNet import MixedUNetModel
from .SegmentationInference import predict_probabilities

@dataclass(slots = True)
class SegmentationTarget:
    """
    Pseudo supervision of one image: seed labels (IGNORE_LABEL outside the seeds) and the CRF mask.
    """
    seed_map: np.ndarray
    crf_mask: np.ndarray

    @staticmethod
    def create(seed_map: np.ndarray, crf_mask: np.ndarray) -> "SegmentationTarget":

        assert seed_map.ndim == 2 and seed_map.shape == crf_mask.shape, "seed map and CRF mask must be same-size 2-D arrays"
        return SegmentationTarget(seed_map.astype(np.uint8), crf_mask.astype(np.uint8))

@dataclass(slots = True)
class SegmentationTrainConfig:
    train: TrainConfig
    loss_mode: LossModeEnum
    allow_ce_fallback: bool

    @staticmethod
    def create(train: TrainConfig, loss_mode: LossModeEnum = LossModeEnum.COMBINED, allow_ce_fallback: bool = True) -> "SegmentationTrainConfig":

        assert isinstance(train, TrainConfig), "train must be an instance of TrainConfig"
        assert isinstance(loss_mode, LossModeEnum), "loss_mode must be an instance of LossModeEnum"
        return SegmentationTrainConfig(train, loss_mode, bool(allow_ce_fallback))

def _augment_with_targets(image: np.ndarray, target: SegmentationTarget, cfg: TrainConfig, rng: np.random.Generator) -> tuple[np.ndarray, SegmentationTarget]:
    if cfg.augment is None:
        return image, target
    # both label grids ride through one nearest-neighbour geometric transform
    packed: np.ndarray = target.seed_map.astype(np.int32) * 256 + target.crf_mask.astype(np.int32)
    out_image, out_packed = augment(image, packed, cfg.augment, rng)
    assert out_packed is not None
    return out_image, SegmentationTarget(seed_map = (out_packed // 256).astype(np.uint8), crf_mask = (out_packed % 256).astype(np.uint8))

def _batch_loss(y: Tensor, seeds: SeedRegions, crf_masks: np.ndarray, cfg: SegmentationTrainConfig, logger: logging.Logger) -> Tensor | None:
    if cfg.loss_mode == LossModeEnum.CE:
        return pixel_ce_loss(y, crf_masks)
    if cfg.loss_mode == LossModeEnum.COMBINED:
        return combined_loss(y, seeds, crf_masks, allow_ce_fallback = cfg.allow_ce_fallback, logger = logger)
    try:
        return seeding_loss(y, seeds)
    except EmptySeedError:
        if not cfg.allow_ce_fallback:
            raise
        logger.warning("Batch has no seeded pixels, skipped")
        return None

def score_segmentation(
    model: MixedUNetModel,
    samples: list[CorpusSample],
    targets: dict[str, SegmentationTarget],
    cfg: SegmentationTrainConfig,
    logger: logging.Logger | None = None,
) -> tuple[float, float]:
    """
    Summary:
        Mean loss and mean Dice against the CRF pseudo-masks, in eval mode. The network runs in
        chunks of cfg.train.batch_size images; one set of probabilities feeds both the loss and the masks.

    Returns:
        (loss, dice); (0.0, 0.0) for an empty split.
    """
    logger = logger if logger is not None else logging.getLogger(__name__)
    if not samples:
        return 0.0, 0.0
    images: np.ndarray = np.stack([sample.image for sample in samples])
    crf_masks: np.ndarray = np.stack([targets[sample.stem].crf_mask for sample in samples])
    seeds: SeedRegions = SeedRegions.create(np.stack([targets[sample.stem].seed_map for sample in samples]))

    probabilities: np.ndarray = predict_probabilities(model, images, cfg.train.batch_size)
    with no_grad():
        loss: Tensor | None = _batch_loss(Tensor(probabilities), seeds, crf_masks, cfg, logger)

    predictions: np.ndarray = np.argmax(probabilities, axis = 1).astype(np.uint8)
    dice: float = float(np.mean([evaluate(prediction, truth, model.config.num_classes).dice for prediction, truth in zip(predictions, crf_masks)]))
    return (0.0 if loss is None else loss.item()), dice

def train_segmentation(
    model: MixedUNetModel,
    samples: list[CorpusSample],
    targets: dict[str, SegmentationTarget],
    cfg: SegmentationTrainConfig,
    val_samples: list[CorpusSample] | None = None,
    history_path: str | Path | None = None,
    logger: logging.Logger | None = None,
) -> TrainingHistory:
    """
    Summary:
        Trains the Mixed-UNet on pseudo supervision only: seeds derived from Refined_mask and the
        CRF_mask, combined according to cfg.loss_mode. Adam with decoupled weight decay and poly
        learning-rate decay; image, seeds and CRF mask share every geometric augmentation.
        Ground-truth masks are never read.

    Parameters:
        model: the network, updated in place.
        samples: training images.
        targets: pseudo supervision keyed by sample stem; must cover samples and val_samples.
        cfg: optimizer, schedule, augmentation and loss settings.
        val_samples: optional images scored after every epoch.
        history_path: when given, the history CSV (epoch,split,loss,dice) is written after every epoch.

    Returns:
        The training history.
    """
    logger = logger if logger is not None else logging.getLogger(__name__)
    val_samples = [] if val_samples is None else val_samples

    if not samples:
        raise ConfigurationError("segmentation training needs at least one training image")
    missing: list[str] = [sample.stem for sample in samples + val_samples if sample.stem not in targets]
    if missing:
        raise ConfigurationError(f"no pseudo-masks for {len(missing)} images, e.g. {missing[0]}")

    train_cfg: TrainConfig = cfg.train
    rng: np.random.Generator = np.random.default_rng(np.random.SeedSequence([train_cfg.seed, 0x5E6]))
    optimizer: AdamOptimizer = AdamOptimizer(model.optimizer_groups(), weight_decay = train_cfg.weight_decay)
    total_steps: int = train_cfg.epochs * train_cfg.batches_per_epoch(len(samples))
    scheduler: Scheduler | None = Scheduler.create(train_cfg.lr_init, train_cfg.gamma, total_steps) if train_cfg.lr_init > 0 else None
    history: TrainingHistory = TrainingHistory("dice")

    for epoch in range(1, train_cfg.epochs + 1):
        model.train()
        for batch_indices in iterate_batches(len(samples), train_cfg.batch_size, rng):
            images: list[np.ndarray] = []
            batch_targets: list[SegmentationTarget] = []
            for index in batch_indices:
                image, target = _augment_with_targets(samples[index].image, targets[samples[index].stem], train_cfg, rng)
                images.append(image)
                batch_targets.append(target)

            seeds: SeedRegions = SeedRegions.create(np.stack([target.seed_map for target in batch_targets]))
            crf_masks: np.ndarray = np.stack([target.crf_mask for target in batch_targets])

            optimizer.zero_grad()
            y: Tensor = model.forward(Tensor(np.stack(images)[:, None].astype(np.float32)))
            loss: Tensor | None = _batch_loss(y, seeds, crf_masks, cfg, logger)
            if loss is not None:
                loss.backward()

            learning_rate: float = poly_lr(scheduler) if scheduler is not None else 0.0
            if loss is not None:
                optimizer.step(learning_rate)
            if scheduler is not None:
                scheduler.advance()

        train_loss, train_dice = score_segmentation(model, samples, targets, cfg, logger)
        history.append(epoch, "train", train_loss, train_dice)
        if val_samples:
            val_loss, val_dice = score_segmentation(model, val_samples, targets, cfg, logger)
            history.append(epoch, "val", val_loss, val_dice)
            logger.info("Segmentation epoch %d/%d: train loss %.4f dice %.3f, val loss %.4f dice %.3f", epoch, train_cfg.epochs, train_loss, train_dice, val_loss, val_dice)
        else:
            logger.info("Segmentation epoch %d/%d: train loss %.4f dice %.3f", epoch, train_cfg.epochs, train_loss, train_dice)

        if history_path is not None:
            history.save(history_path, logger)

    model.eval()
    return history
