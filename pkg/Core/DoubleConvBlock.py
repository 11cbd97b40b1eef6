import numpy as np
from .Tensor import Tensor
from .LayerParams import LayerParams
from . import Functional as F

class DoubleConvBlock:
    """
    Two 3x3 convolutions (padding 1), each followed by batchnorm and ReLU.
    """

    def __init__(self, in_channels: int, out_channels: int, rng: np.random.Generator, padding_mode: str = "zeros"):

        assert in_channels >= 1 and out_channels >= 1, "channel counts must be positive"
        assert padding_mode in ("zeros", "edge"), "padding_mode must be \"zeros\" or \"edge\""

        self.in_channels: int = in_channels
        self.out_channels: int = out_channels
        self.padding_mode: str = padding_mode
        self.conv1: LayerParams = LayerParams.conv2d(in_channels, out_channels, 3, rng)
        self.bn1: LayerParams = LayerParams.batchnorm(out_channels)
        self.conv2: LayerParams = LayerParams.conv2d(out_channels, out_channels, 3, rng)
        self.bn2: LayerParams = LayerParams.batchnorm(out_channels)

    def named_layers(self, prefix: str) -> list[tuple[str, LayerParams]]:
        return [
            (f"{prefix}.conv1", self.conv1),
            (f"{prefix}.bn1", self.bn1),
            (f"{prefix}.conv2", self.conv2),
            (f"{prefix}.bn2", self.bn2),
        ]

    def forward(self, x: Tensor, training: bool) -> Tensor:
        x = F.relu(F.batchnorm(F.conv2d_forward(x, self.conv1, stride = 1, padding = 1, padding_mode = self.padding_mode), self.bn1, training))
        return F.relu(F.batchnorm(F.conv2d_forward(x, self.conv2, stride = 1, padding = 1, padding_mode = self.padding_mode), self.bn2, training))

    @staticmethod
    def parameter_count(in_channels: int, out_channels: int) -> int:
        """
        9*in*out + out (conv1) + 2*out (bn1) + 9*out*out + out (conv2) + 2*out (bn2).
        """
        return 9 * in_channels * out_channels + 9 * out_channels * out_channels + 6 * out_channels
