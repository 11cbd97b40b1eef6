import logging
import numpy as np
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Iterator
from overrides import override
from .Tensor import Tensor
from .LayerParams import LayerParams
from .LayerKindEnum import LayerKindEnum
from .CheckpointPersistentAbc import CheckpointPersistentAbc
from .Checkpoint import save_checkpoint, load_checkpoint

class ModuleAbc(CheckpointPersistentAbc, ABC):
    """
    A trainable network built from named LayerParams. Concrete models provide the layer
    table and the forward pass; parameter bookkeeping and persistence live here.
    """

    def __init__(self, logger: logging.Logger | None = None):
        self._training: bool = True
        self._logger: logging.Logger = logger if logger is not None else logging.getLogger(__name__)

    @abstractmethod
    def named_layers(self) -> list[tuple[str, LayerParams]]:
        """
        Returns every layer of the model with a stable, unique dotted name, in definition order.
        """

    @abstractmethod
    def forward(self, x: Tensor) -> Tensor:
        """
        Summary:
            Runs the model on a (n, c, h, w) batch.
        """

    @property
    def training(self) -> bool:
        return self._training

    def train(self) -> None:
        self._training = True

    def eval(self) -> None:
        self._training = False

    def parameters(self) -> Iterator[Tensor]:
        for _, layer in self.named_layers():
            yield from layer.trainable()

    def optimizer_groups(self) -> list[tuple[Tensor, bool]]:
        """
        (tensor, decays) pairs; decoupled weight decay applies to conv/linear weights only.
        """
        groups: list[tuple[Tensor, bool]] = []
        for _, layer in self.named_layers():
            groups.append((layer.weights, layer.decays))
            if layer.bias is not None:
                groups.append((layer.bias, False))
        return groups

    def zero_grad(self) -> None:
        for tensor in self.parameters():
            tensor.zero_grad()

    def parameter_count(self) -> int:
        return int(sum(tensor.data.size for tensor in self.parameters()))

    def named_blobs(self) -> list[tuple[str, np.ndarray]]:
        """
        Every persistent array: trainable tensors plus batchnorm running statistics.
        """
        blobs: list[tuple[str, np.ndarray]] = []
        for name, layer in self.named_layers():
            blobs.append((f"{name}.weight", layer.weights.data))
            if layer.bias is not None:
                blobs.append((f"{name}.bias", layer.bias.data))
            if layer.kind == LayerKindEnum.BATCHNORM and layer.bn_state is not None:
                blobs.append((f"{name}.running_mean", layer.bn_state.running_mean))
                blobs.append((f"{name}.running_var", layer.bn_state.running_var))
        return blobs

    @override
    def save_checkpoint(self, file_path: str | Path) -> Exception | None:
        return save_checkpoint(file_path, self.named_blobs(), self._logger)

    @override
    def load_checkpoint_from_file(self, file_path: str | Path) -> Exception | None:
        """
        Summary:
            Replaces every weight, bias and running statistic with the checkpoint's blobs.
            All names and shapes are checked before anything is assigned, so on error the
            model is left untouched.

        Returns:
            None if successful, otherwise the exception.
        """
        blobs: dict[str, np.ndarray] | Exception = load_checkpoint(file_path, self._logger)
        if isinstance(blobs, Exception):
            return blobs

        for blob_name, current in self.named_blobs():
            if blob_name not in blobs:
                self._logger.error("Checkpoint %s has no blob named %s", file_path, blob_name)
                return KeyError(blob_name)
            if blobs[blob_name].shape != current.shape:
                self._logger.error("Blob %s has shape %s, model expects %s", blob_name, blobs[blob_name].shape, current.shape)
                return ValueError(f"shape mismatch for {blob_name}")

        for name, layer in self.named_layers():
            layer.weights.data = blobs[f"{name}.weight"].astype(layer.weights.dtype)
            if layer.bias is not None:
                layer.bias.data = blobs[f"{name}.bias"].astype(layer.bias.dtype)
            if layer.kind == LayerKindEnum.BATCHNORM and layer.bn_state is not None:
                layer.bn_state.running_mean = blobs[f"{name}.running_mean"].astype(np.float64)
                layer.bn_state.running_var = blobs[f"{name}.running_var"].astype(np.float64)

        self._logger.info("Checkpoint loaded from %s", file_path)
        return None
