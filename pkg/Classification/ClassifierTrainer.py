import logging
import numpy as np
from pathlib import Path
from ..Core.Tensor import Tensor, no_grad
from ..Core.AdamOptimizer import AdamOptimizer
from ..Core.PolyScheduler import Scheduler, poly_lr
from ..Core.Errors import ConfigurationError
from ..Core import Functional as F
from ..DataSynth.SplitEnum import SplitEnum
from ..DataSynth.CorpusLoader import CorpusDataset, CorpusSample
from ..DataSynth.Augmentation import augment
from ..Training.TrainConfig import TrainConfig, iterate_batches
from ..Training.TrainingHistory import TrainingHistory
from .ClassifierModel import ClassifierModel

def _stack_images(samples: list[CorpusSample]) -> np.ndarray:
    return np.stack([sample.image for sample in samples])[:, None].astype(np.float32)

def evaluate_classifier(model: ClassifierModel, samples: list[CorpusSample], batch_size: int = 16) -> tuple[float, float]:
    """
    Summary:
        Mean cross-entropy and accuracy of the model over the samples, in eval mode.

    Returns:
        (loss, accuracy); (0.0, 0.0) for an empty list.
    """
    if not samples:
        return 0.0, 0.0

    was_training: bool = model.training
    model.eval()
    total_loss: float = 0.0
    correct: int = 0
    with no_grad():
        for start in range(0, len(samples), batch_size):
            chunk: list[CorpusSample] = samples[start:start + batch_size]
            labels: np.ndarray = np.array([sample.label for sample in chunk], dtype = np.int64)
            logits: Tensor = model.forward(Tensor(_stack_images(chunk)))
            total_loss += F.softmax_cross_entropy(logits, labels).item() * len(chunk)
            correct += int(np.sum(np.argmax(logits.data, axis = 1) == labels))
    if was_training:
        model.train()
    return total_loss / len(samples), correct / len(samples)

def train_classifier(
    model: ClassifierModel,
    dataset: CorpusDataset,
    cfg: TrainConfig,
    history_path: str | Path | None = None,
    logger: logging.Logger | None = None,
) -> TrainingHistory:
    """
    Summary:
        Trains the classifier on the training split with softmax cross-entropy on the
        image-level labels, Adam with decoupled weight decay and poly learning-rate decay.
        Every epoch appends train and val (loss, accuracy) rows to the history.
        All randomness flows from cfg.seed.

    Parameters:
        model: the classifier, updated in place.
        dataset: the loaded corpus; only the train split is used for updates.
        cfg: optimizer, schedule and augmentation settings.
        history_path: when given, the history CSV is written there after every epoch.

    Returns:
        The training history (header epoch,split,loss,accuracy).
    """
    logger = logger if logger is not None else logging.getLogger(__name__)

    train_samples: list[CorpusSample] = dataset.in_split(SplitEnum.TRAIN)
    val_samples: list[CorpusSample] = dataset.in_split(SplitEnum.VAL)
    if not train_samples:
        raise ConfigurationError("classifier training needs a non-empty train split")
    present: set[int] = {sample.label for sample in train_samples}
    if len(dataset.classes) < 2 or len(present) < 2:
        raise ConfigurationError(f"classifier training needs at least 2 classes with training examples, found labels {sorted(present)}")
    if any(sample.label >= model.num_classes for sample in train_samples):
        raise ConfigurationError(f"dataset labels exceed the model's {model.num_classes} classes")

    rng: np.random.Generator = np.random.default_rng(np.random.SeedSequence([cfg.seed, 0x7C15]))
    optimizer: AdamOptimizer = AdamOptimizer(model.optimizer_groups(), weight_decay = cfg.weight_decay)
    total_steps: int = cfg.epochs * cfg.batches_per_epoch(len(train_samples))
    scheduler: Scheduler | None = Scheduler.create(cfg.lr_init, cfg.gamma, total_steps) if cfg.lr_init > 0 else None
    history: TrainingHistory = TrainingHistory("accuracy")

    for epoch in range(1, cfg.epochs + 1):
        model.train()
        for batch_indices in iterate_batches(len(train_samples), cfg.batch_size, rng):
            batch: list[CorpusSample] = [train_samples[index] for index in batch_indices]
            images: list[np.ndarray] = []
            for sample in batch:
                image: np.ndarray = sample.image
                if cfg.augment is not None:
                    image, _ = augment(image, None, cfg.augment, rng)
                images.append(image)

            labels: np.ndarray = np.array([sample.label for sample in batch], dtype = np.int64)
            optimizer.zero_grad()
            loss: Tensor = F.softmax_cross_entropy(model.forward(Tensor(np.stack(images)[:, None].astype(np.float32))), labels)
            loss.backward()

            learning_rate: float = poly_lr(scheduler) if scheduler is not None else 0.0
            optimizer.step(learning_rate)
            if scheduler is not None:
                scheduler.advance()

        train_loss, train_accuracy = evaluate_classifier(model, train_samples, cfg.batch_size)
        history.append(epoch, SplitEnum.TRAIN.value, train_loss, train_accuracy)
        if val_samples:
            val_loss, val_accuracy = evaluate_classifier(model, val_samples, cfg.batch_size)
            history.append(epoch, SplitEnum.VAL.value, val_loss, val_accuracy)
            logger.info("Classifier epoch %d/%d: train loss %.4f acc %.3f, val loss %.4f acc %.3f", epoch, cfg.epochs, train_loss, train_accuracy, val_loss, val_accuracy)
        else:
            logger.info("Classifier epoch %d/%d: train loss %.4f acc %.3f", epoch, cfg.epochs, train_loss, train_accuracy)

        if history_path is not None:
            history.save(history_path, logger)

    model.eval()
    return history
