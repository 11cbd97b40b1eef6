import numpy as np
from ..Core.Tensor import Tensor
from ..Core.LayerParams import LayerParams
from ..Core.DoubleConvBlock import DoubleConvBlock
from ..Core import Functional as F

class DecoderBranch:
    """
    One decoding path. Each step: 2x nearest upsample, 3x3 transposed convolution (stride 1,
    padding 1) halving the channels, concatenation with the center-cropped encoder map of the
    same resolution, then a double 3x3 conv block.
    """

    def __init__(self, bottleneck_channels: int, depth: int, rng: np.random.Generator):

        assert bottleneck_channels % (2 ** depth) == 0, "bottleneck channels must halve cleanly at every step"

        self.__steps: list[tuple[LayerParams, DoubleConvBlock]] = []
        channels: int = bottleneck_channels
        for _ in range(depth):
            halved: int = channels // 2
            up: LayerParams = LayerParams.transposed_conv2d(channels, halved, 3, rng)
            self.__steps.append((up, DoubleConvBlock(2 * halved, halved, rng)))
            channels = halved
        self.out_channels: int = channels

    def named_layers(self, prefix: str) -> list[tuple[str, LayerParams]]:
        layers: list[tuple[str, LayerParams]] = []
        for index, (up, block) in enumerate(self.__steps):
            layers.append((f"{prefix}.step{index}.up", up))
            layers.extend(block.named_layers(f"{prefix}.step{index}.block"))
        return layers

    def forward(self, x: Tensor, skips: list[Tensor], training: bool, trace: dict[str, tuple[int, ...]] | None = None, prefix: str = "branch") -> Tensor:
        """
        Parameters:
            x: bottleneck features.
            skips: encoder outputs ordered from the deepest to the shallowest.
        """
        for index, ((up, block), skip) in enumerate(zip(self.__steps, skips)):
            upsampled: Tensor = F.transposed_conv2d(F.upsample_nearest2x(x), up, stride = 1, padding = 1)
            cropped: Tensor = F.center_crop(skip, upsampled.shape[2], upsampled.shape[3])
            x = block.forward(F.concat_channels(upsampled, cropped), training)
            if trace is not None:
                trace[f"{prefix}.step{index}"] = x.shape
        return x

    @staticmethod
    def parameter_count(bottleneck_channels: int, depth: int) -> int:
        """
        Per step with c -> c/2 channels: 9 * c * c/2 + c/2 (transposed conv) + DoubleConvBlock(c, c/2).
        """
        total: int = 0
        channels: int = bottleneck_channels
        for _ in range(depth):
            halved: int = channels // 2
            total += 9 * channels * halved + halved + DoubleConvBlock.parameter_count(2 * halved, halved)
            channels = halved
        return total
