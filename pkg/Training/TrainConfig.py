import numpy as np
from dataclasses import dataclass
from typing import Iterator
from ..DataSynth.Augmentation import AugmentConfig

@dataclass(slots = True)
class TrainConfig:
    epochs: int
    batch_size: int
    lr_init: float
    gamma: float
    weight_decay: float
    seed: int
    augment: AugmentConfig | None

    @staticmethod
    def create(
        epochs: int = 30,
        batch_size: int = 4,
        lr_init: float = 1e-3,
        gamma: float = 0.9,
        weight_decay: float = 1e-4,
        seed: int = 0,
        augment: AugmentConfig | None = None,
    ) -> "TrainConfig":

        assert isinstance(epochs, int) and epochs >= 1, "epochs must be a positive integer"
        assert isinstance(batch_size, int) and batch_size >= 1, "batch_size must be a positive integer"
        assert lr_init >= 0, "lr_init must be non-negative"
        assert gamma > 0, "gamma must be positive"
        assert weight_decay >= 0, "weight_decay must be non-negative"
        assert augment is None or isinstance(augment, AugmentConfig), "augment must be an AugmentConfig or None"
        return TrainConfig(epochs, batch_size, float(lr_init), float(gamma), float(weight_decay), seed, augment)

    def batches_per_epoch(self, sample_count: int) -> int:
        return -(-sample_count // self.batch_size)

def iterate_batches(sample_count: int, batch_size: int, rng: np.random.Generator) -> Iterator[np.ndarray]:
    """
    Yields index arrays covering a fresh permutation of range(sample_count); the last batch may be short.
    """
    order: np.ndarray = rng.permutation(sample_count)
    for start in range(0, sample_count, batch_size):
        yield order[start:start + batch_size]
