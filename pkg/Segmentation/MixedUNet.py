import logging
import numpy as np
from dataclasses import dataclass, replace
from overrides import override
from ..Core.Tensor import Tensor
from ..Core.LayerParams import LayerParams
from ..Core.ModuleAbc import ModuleAbc
from ..Core.DoubleConvBlock import DoubleConvBlock
from ..Core.Errors import ShapeError
from ..Core import Functional as F
from .DecoderBranch import DecoderBranch

DEPTH: int = 3

@dataclass(slots = True)
class MixedUNetConfig:
    """
    Channels double at each of the three encoder steps (base, 2 base, 4 base; bottleneck 8 base)
    and halve at each decoder step, so each branch ends with base_channels.
    """
    in_channels: int
    num_classes: int
    base_channels: int
    single_branch: bool
    tied_branches: bool
    seed: int

    @staticmethod
    def create(in_channels: int = 1, num_classes: int = 2, base_channels: int = 8, single_branch: bool = False, tied_branches: bool = False, seed: int = 0) -> "MixedUNetConfig":

        assert isinstance(in_channels, int) and in_channels >= 1, "in_channels must be a positive integer"
        assert isinstance(num_classes, int) and num_classes >= 2, "num_classes must be at least 2"
        assert isinstance(base_channels, int) and base_channels >= 1, "base_channels must be a positive integer"
        return MixedUNetConfig(in_channels, num_classes, base_channels, bool(single_branch), bool(tied_branches), seed)

    @property
    def branch_count(self) -> int:
        return 1 if self.single_branch else 2

    @property
    def encoder_channels(self) -> list[int]:
        return [self.base_channels * 2 ** level for level in range(DEPTH)]

    @property
    def bottleneck_channels(self) -> int:
        return self.base_channels * 2 ** DEPTH

def param_count(config: MixedUNetConfig) -> int:
    """
    Summary:
        Closed-form count of trainable scalars:
        encoder blocks in -> b -> 2b -> 4b and bottleneck 4b -> 8b (DoubleConvBlock.parameter_count each),
        one DecoderBranch.parameter_count(8b) per branch, and the 1x1 head (branches * b * C + C).
    """
    total: int = 0
    previous: int = config.in_channels
    for width in config.encoder_channels:
        total += DoubleConvBlock.parameter_count(previous, width)
        previous = width
    total += DoubleConvBlock.parameter_count(previous, config.bottleneck_channels)
    total += config.branch_count * DecoderBranch.parameter_count(config.bottleneck_channels, DEPTH)
    head_in: int = config.branch_count * config.base_channels
    total += head_in * config.num_classes + config.num_classes
    return total

class MixedUNetModel(ModuleAbc):
    """
    Shared three-stage encoder (double conv block, then 3x3 max pool with stride 2) feeding a
    bottleneck and two structurally identical decoder branches; the branch outputs are
    concatenated, mapped to class scores by a 1x1 convolution and passed through softmax.
    """

    def __init__(self, config: MixedUNetConfig, logger: logging.Logger | None = None):

        super().__init__(logger)
        assert isinstance(config, MixedUNetConfig), "config must be an instance of MixedUNetConfig"

        self.__config: MixedUNetConfig = config
        encoder_seed, branch1_seed, branch2_seed, head_seed = np.random.SeedSequence([config.seed, 0x0E7]).spawn(4)
        if config.tied_branches:
            branch2_seed = branch1_seed

        encoder_rng: np.random.Generator = np.random.default_rng(encoder_seed)
        self.__encoder: list[DoubleConvBlock] = []
        previous: int = config.in_channels
        for width in config.encoder_channels:
            self.__encoder.append(DoubleConvBlock(previous, width, encoder_rng))
            previous = width
        self.__bottleneck: DoubleConvBlock = DoubleConvBlock(previous, config.bottleneck_channels, encoder_rng)

        self.__branches: list[DecoderBranch] = [DecoderBranch(config.bottleneck_channels, DEPTH, np.random.default_rng(branch1_seed))]
        if not config.single_branch:
            self.__branches.append(DecoderBranch(config.bottleneck_channels, DEPTH, np.random.default_rng(branch2_seed)))

        head_in: int = config.branch_count * config.base_channels
        self.__head: LayerParams = LayerParams.conv2d(head_in, config.num_classes, 1, np.random.default_rng(head_seed))
        self._logger.debug("Mixed-UNet with %d branch(es), base width %d; decoder steps are 2x nearest upsample + 3x3 transposed conv (stride 1)", config.branch_count, config.base_channels)

    @property
    def config(self) -> MixedUNetConfig:
        return self.__config

    @property
    def branches(self) -> list[DecoderBranch]:
        return list(self.__branches)

    @override
    def named_layers(self) -> list[tuple[str, LayerParams]]:
        layers: list[tuple[str, LayerParams]] = []
        for index, block in enumerate(self.__encoder):
            layers.extend(block.named_layers(f"encoder.block{index}"))
        layers.extend(self.__bottleneck.named_layers("bottleneck"))
        for index, branch in enumerate(self.__branches):
            layers.extend(branch.named_layers(f"branch{index + 1}"))
        layers.append(("head", self.__head))
        return layers

    def swap_branches(self) -> None:
        if len(self.__branches) == 2:
            self.__branches.reverse()

    def logits(self, x: Tensor, trace: dict[str, tuple[int, ...]] | None = None) -> Tensor:
        """
        Summary:
            Pre-softmax (n, C, h, w) scores. When trace is given, it receives the output
            shape of every stage keyed by stage name.
        """
        if x.data.ndim != 4:
            raise ShapeError(f"Mixed-UNet expects a 4-D (n, c, h, w) batch, got shape {x.shape}")
        _, c, h, w = x.shape
        if c != self.__config.in_channels:
            raise ShapeError(f"Mixed-UNet expects {self.__config.in_channels} input channels, got {c}")
        multiple: int = 2 ** DEPTH
        if h % multiple != 0 or w % multiple != 0:
            raise ShapeError(f"Mixed-UNet input {h}x{w} must be divisible by {multiple}")

        skips: list[Tensor] = []
        for index, block in enumerate(self.__encoder):
            x = block.forward(x, self._training)
            skips.append(x)
            if trace is not None:
                trace[f"encoder.block{index}"] = x.shape
            x = F.maxpool2d(x, 3, stride = 2, padding = 1)

        x = self.__bottleneck.forward(x, self._training)
        if trace is not None:
            trace["bottleneck"] = x.shape

        skips.reverse()
        decoded: list[Tensor] = [branch.forward(x, skips, self._training, trace, f"branch{index + 1}") for index, branch in enumerate(self.__branches)]
        merged: Tensor = decoded[0] if len(decoded) == 1 else F.concat_channels(decoded[0], decoded[1])
        if trace is not None:
            trace["concat"] = merged.shape

        out: Tensor = F.conv2d_forward(merged, self.__head, stride = 1, padding = 0)
        if trace is not None:
            trace["head"] = out.shape
        return out

    @override
    def forward(self, x: Tensor, trace: dict[str, tuple[int, ...]] | None = None) -> Tensor:
        """
        Per-pixel class distribution y = softmax(conv1x1(concat(df_1, df_2))), shape (n, C, h, w).
        """
        return F.softmax_channel(self.logits(x, trace))

def single_branch_ablation(config: MixedUNetConfig, logger: logging.Logger | None = None) -> MixedUNetModel:
    """
    Same encoder, one decoder branch, head over base_channels instead of 2 * base_channels.
    """
    return MixedUNetModel(replace(config, single_branch = True), logger)
