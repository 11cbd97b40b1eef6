import numpy as np
from dataclasses import dataclass
from .Tensor import Tensor
from .LayerKindEnum import LayerKindEnum

@dataclass(slots = True)
class BatchNormState:
    running_mean: np.ndarray
    running_var: np.ndarray
    epsilon: float
    momentum: float

@dataclass(slots = True)
class LayerParams:
    """
    Parameters of one layer.

    Weight layouts:
        conv2d:             (out_channels, in_channels, kh, kw)
        transposed-conv2d:  (in_channels, out_channels, kh, kw)
        linear:             (out_features, in_features)
        batchnorm:          weights holds the scale, bias holds the shift, both (channels,)
    """
    kind: LayerKindEnum
    weights: Tensor
    bias: Tensor | None
    bn_state: BatchNormState | None

    @staticmethod
    def create(kind: LayerKindEnum, weights: Tensor, bias: Tensor | None, bn_state: BatchNormState | None = None) -> "LayerParams":

        assert isinstance(kind, LayerKindEnum), "kind must be an instance of LayerKindEnum"
        assert isinstance(weights, Tensor), "weights must be an instance of Tensor"
        assert bias is None or isinstance(bias, Tensor), "bias must be a Tensor or None"

        if kind in (LayerKindEnum.CONV2D, LayerKindEnum.TRANSPOSED_CONV2D):
            assert weights.data.ndim == 4, "convolution weights must be 4-D"
            assert weights.shape[2] >= 1 and weights.shape[3] >= 1, "kernel sizes must be at least 1"
        elif kind == LayerKindEnum.LINEAR:
            assert weights.data.ndim == 2, "linear weights must be 2-D"
        elif kind == LayerKindEnum.BATCHNORM:
            assert isinstance(bn_state, BatchNormState), "batchnorm layers require a BatchNormState"
            assert bn_state.epsilon > 0, "batchnorm epsilon must be positive"
            assert np.all(bn_state.running_var >= 0), "batchnorm running variance must be non-negative"

        return LayerParams(kind, weights, bias, bn_state)

    @property
    def decays(self) -> bool:
        """
        Whether decoupled weight decay applies to this layer's weights. Batchnorm is exempt.
        """
        return self.kind != LayerKindEnum.BATCHNORM

    def trainable(self) -> list[Tensor]:
        return [self.weights] if self.bias is None else [self.weights, self.bias]

    @staticmethod
    def conv2d(in_channels: int, out_channels: int, kernel_size: int, rng: np.random.Generator, bias: bool = True) -> "LayerParams":
        fan_in: int = in_channels * kernel_size * kernel_size
        weights = rng.normal(0.0, np.sqrt(2.0 / fan_in), size = (out_channels, in_channels, kernel_size, kernel_size))
        return LayerParams.create(
            kind = LayerKindEnum.CONV2D,
            weights = Tensor(weights.astype(np.float32), requires_grad = True),
            bias = Tensor(np.zeros(out_channels, dtype = np.float32), requires_grad = True) if bias else None,
        )

    @staticmethod
    def transposed_conv2d(in_channels: int, out_channels: int, kernel_size: int, rng: np.random.Generator) -> "LayerParams":
        fan_in: int = in_channels * kernel_size * kernel_size
        weights = rng.normal(0.0, np.sqrt(2.0 / fan_in), size = (in_channels, out_channels, kernel_size, kernel_size))
        return LayerParams.create(
            kind = LayerKindEnum.TRANSPOSED_CONV2D,
            weights = Tensor(weights.astype(np.float32), requires_grad = True),
            bias = Tensor(np.zeros(out_channels, dtype = np.float32), requires_grad = True),
        )

    @staticmethod
    def batchnorm(channels: int, epsilon: float = 1e-5, momentum: float = 0.1) -> "LayerParams":
        return LayerParams.create(
            kind = LayerKindEnum.BATCHNORM,
            weights = Tensor(np.ones(channels, dtype = np.float32), requires_grad = True),
            bias = Tensor(np.zeros(channels, dtype = np.float32), requires_grad = True),
            bn_state = BatchNormState(
                running_mean = np.zeros(channels, dtype = np.float64),
                running_var = np.ones(channels, dtype = np.float64),
                epsilon = epsilon,
                momentum = momentum,
            ),
        )

    @staticmethod
    def linear(in_features: int, out_features: int, rng: np.random.Generator, bias: bool = True) -> "LayerParams":
        weights = rng.normal(0.0, np.sqrt(1.0 / in_features), size = (out_features, in_features))
        return LayerParams.create(
            kind = LayerKindEnum.LINEAR,
            weights = Tensor(weights.astype(np.float32), requires_grad = True),
            bias = Tensor(np.zeros(out_features, dtype = np.float32), requires_grad = True) if bias else None,
        )
