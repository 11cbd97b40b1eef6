import logging
import numpy as np
from typing import NamedTuple
from overrides import override
from ..Core.Tensor import Tensor
from ..Core.LayerParams import LayerParams
from ..Core.ModuleAbc import ModuleAbc
from ..Core.DoubleConvBlock import DoubleConvBlock
from ..Core.Errors import ShapeError
from ..Core import Functional as F

DEFAULT_CHANNELS: tuple[int, ...] = (16, 32, 64, 64)

class ClassifierOutput(NamedTuple):
    probabilities: Tensor
    logits: Tensor
    features: Tensor

class ClassifierModel(ModuleAbc):
    """
    Small CNN with a global-average-pooling head.

    Each backbone block is two 3x3 conv + batchnorm + ReLU layers followed by a 2x2 max pool.
    The head is a bias-free linear map from the K final feature channels to C classes, so
    logit_c = sum_k w[c, k] * mean(A_k) and the per-pixel weighted sum of the feature maps
    (the class activation map) averages to the logit.
    Convolutions pad by repeating border pixels, so a constant image yields constant maps.
    """

    def __init__(self, in_channels: int = 1, num_classes: int = 2, channels: tuple[int, ...] = DEFAULT_CHANNELS, seed: int = 0, logger: logging.Logger | None = None):

        super().__init__(logger)
        assert in_channels >= 1, "in_channels must be positive"
        assert num_classes >= 2, "num_classes must be at least 2"
        assert len(channels) >= 1 and all(width >= 1 for width in channels), "channels must be a non-empty tuple of positive widths"

        rng: np.random.Generator = np.random.default_rng(np.random.SeedSequence([seed, 0xC1A5]))
        self.__in_channels: int = in_channels
        self.__num_classes: int = num_classes
        self.__blocks: list[DoubleConvBlock] = []
        previous: int = in_channels
        for width in channels:
            self.__blocks.append(DoubleConvBlock(previous, width, rng, padding_mode = "edge"))
            previous = width
        self.__head: LayerParams = LayerParams.linear(previous, num_classes, rng, bias = False)

    @property
    def in_channels(self) -> int:
        return self.__in_channels

    @property
    def num_classes(self) -> int:
        return self.__num_classes

    @property
    def feature_channels(self) -> int:
        return self.__blocks[-1].out_channels

    @property
    def min_input_size(self) -> int:
        """
        Smallest accepted spatial size: the final feature map keeps at least 2x2 cells.
        """
        return 2 ** len(self.__blocks) * 2

    @property
    def head(self) -> LayerParams:
        return self.__head

    def head_weights(self) -> np.ndarray:
        """
        (C, K) weights w[c, k] of the classification head.
        """
        return self.__head.weights.data

    @override
    def named_layers(self) -> list[tuple[str, LayerParams]]:
        layers: list[tuple[str, LayerParams]] = []
        for index, block in enumerate(self.__blocks):
            layers.extend(block.named_layers(f"backbone.block{index}"))
        layers.append(("head", self.__head))
        return layers

    def prepare_input(self, x: Tensor) -> Tensor:
        """
        Validates an (n, c, h, w) batch and replicates a grayscale channel when the model expects more.
        """
        if x.data.ndim != 4:
            raise ShapeError(f"classifier expects a 4-D (n, c, h, w) batch, got shape {x.shape}")
        _, c, h, w = x.shape
        if c == 1 and self.__in_channels > 1:
            x = Tensor(np.repeat(x.data, self.__in_channels, axis = 1))
            c = self.__in_channels
        if c != self.__in_channels:
            raise ShapeError(f"classifier expects {self.__in_channels} input channels, got {c}")
        if h < self.min_input_size or w < self.min_input_size:
            raise ShapeError(f"classifier input {h}x{w} is smaller than the minimum {self.min_input_size}x{self.min_input_size}")
        return x

    def features(self, x: Tensor) -> Tensor:
        """
        Feature maps A_k right before global average pooling.
        """
        x = self.prepare_input(x)
        for block in self.__blocks:
            x = F.maxpool2d(block.forward(x, self._training), 2, 2)
        return x

    def logits_from_features(self, features: Tensor) -> Tensor:
        return F.linear(F.gap(features), self.__head)

    @override
    def forward(self, x: Tensor) -> Tensor:
        """
        Returns (n, C) pre-softmax class scores.
        """
        return self.logits_from_features(self.features(x))

def classify(model: ClassifierModel, image: Tensor) -> ClassifierOutput:
    """
    Summary:
        Runs the classifier and returns softmax class probabilities, the pre-softmax
        scores and the feature maps the scores were pooled from.

    Parameters:
        model: the classifier.
        image: (n, c, h, w) batch, or a single (h, w) grayscale image as a Tensor.
    """
    if image.data.ndim == 2:
        image = Tensor(image.data[None, None])
    features: Tensor = model.features(image)
    logits: Tensor = model.logits_from_features(features)
    return ClassifierOutput(probabilities = F.softmax_channel(logits), logits = logits, features = features)
