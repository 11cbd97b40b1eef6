import numpy as np
import pytest
from ptri_camforge.Core.Tensor import Tensor, no_grad
from ptri_camforge.Core.Errors import ConfigurationError, EmptySeedError, ShapeError
from ptri_camforge.DataSynth.CorpusLoader import CorpusSample
from ptri_camforge.DataSynth.SplitEnum import SplitEnum
from ptri_camforge.DenseCrf.CrfParams import CrfParams
from ptri_camforge.Objectives.LossModeEnum import LossModeEnum
from ptri_camforge.Objectives.Losses import IGNORE_LABEL
from ptri_camforge.Objectives.Metrics import evaluate
from ptri_camforge.Segmentation import MixedUNetConfig, MixedUNetModel, SegmentationTarget, SegmentationTrainConfig, model_report, param_count, predict_masks, score_segmentation, single_branch_ablation, train_segmentation
from ptri_camforge.Training.TrainConfig import TrainConfig

def square_samples(count: int, size: int = 16) -> tuple[list[CorpusSample], dict[str, SegmentationTarget]]:
    samples: list[CorpusSample] = []
    targets: dict[str, SegmentationTarget] = {}
    for index in range(count):
        crf_mask: np.ndarray = np.zeros((size, size), dtype = np.uint8)
        crf_mask[4 + index % 3:10 + index % 3, 5:11] = 1
        image: np.ndarray = np.where(crf_mask == 1, 0.8, 0.2).astype(np.float32)
        seed_map: np.ndarray = np.full((size, size), IGNORE_LABEL, dtype = np.uint8)
        seed_map[crf_mask == 1] = 1
        seed_map[:2] = 0
        stem: str = f"pos{index:03d}"
        samples.append(CorpusSample.create(stem, image, 1, None, SplitEnum.TRAIN, stem))
        targets[stem] = SegmentationTarget.create(seed_map, crf_mask)
    return samples, targets

class TestMixedUNetModel:

    def test_parameter_counts(self) -> None:
        config: MixedUNetConfig = MixedUNetConfig.create(base_channels = 1)
        assert param_count(config) == 3236
        assert MixedUNetModel(config).parameter_count() == 3236
        assert single_branch_ablation(config).parameter_count() == 2240
        assert param_count(MixedUNetConfig.create(base_channels = 1, single_branch = True)) == 2240

    def test_counts_agree_for_wider_models(self) -> None:
        config: MixedUNetConfig = MixedUNetConfig.create(base_channels = 4, num_classes = 3)
        assert MixedUNetModel(config).parameter_count() == param_count(config)

    def test_shape_trace(self) -> None:
        model: MixedUNetModel = MixedUNetModel(MixedUNetConfig.create(base_channels = 8))
        model.eval()
        trace: dict[str, tuple[int, ...]] = {}
        with no_grad():
            out: Tensor = model.forward(Tensor(np.zeros((1, 1, 64, 64), dtype = np.float32)), trace)
        assert trace["encoder.block0"] == (1, 8, 64, 64)
        assert trace["encoder.block1"] == (1, 16, 32, 32)
        assert trace["encoder.block2"] == (1, 32, 16, 16)
        assert trace["bottleneck"] == (1, 64, 8, 8)
        for branch in ("branch1", "branch2"):
            assert trace[f"{branch}.step0"] == (1, 32, 16, 16)
            assert trace[f"{branch}.step1"] == (1, 16, 32, 32)
            assert trace[f"{branch}.step2"] == (1, 8, 64, 64)
        assert trace["concat"] == (1, 16, 64, 64)
        assert out.shape == (1, 2, 64, 64)
        assert np.allclose(out.data.sum(axis = 1), 1.0, atol = 1e-5)

    def test_input_must_be_divisible_by_eight(self) -> None:
        model: MixedUNetModel = MixedUNetModel(MixedUNetConfig.create(base_channels = 1))
        with pytest.raises(ShapeError):
            model.forward(Tensor(np.zeros((1, 1, 20, 20), dtype = np.float32)))

    def test_tied_branches_start_identical(self) -> None:
        model: MixedUNetModel = MixedUNetModel(MixedUNetConfig.create(base_channels = 2, tied_branches = True))
        first = model.branches[0].named_layers("b")
        second = model.branches[1].named_layers("b")
        assert all(np.array_equal(a.weights.data, b.weights.data) for (_, a), (_, b) in zip(first, second))

    def test_swapping_branches_with_head_columns_is_symmetric(self, rng: np.random.Generator) -> None:
        model: MixedUNetModel = MixedUNetModel(MixedUNetConfig.create(base_channels = 2, seed = 4))
        model.eval()
        x: Tensor = Tensor(rng.uniform(size = (1, 1, 16, 16)).astype(np.float32))
        with no_grad():
            before: np.ndarray = model.forward(x).data
            head = dict(model.named_layers())["head"]
            head.weights.data = np.concatenate([head.weights.data[:, 2:], head.weights.data[:, :2]], axis = 1)
            model.swap_branches()
            after: np.ndarray = model.forward(x).data
        assert np.allclose(before, after, atol = 1e-6)

    def test_seed_is_reproducible(self) -> None:
        first = MixedUNetModel(MixedUNetConfig.create(base_channels = 1, seed = 3)).named_blobs()
        second = MixedUNetModel(MixedUNetConfig.create(base_channels = 1, seed = 3)).named_blobs()
        assert all(np.array_equal(a, b) for (_, a), (_, b) in zip(first, second))

    def test_both_branches_receive_gradients(self, rng: np.random.Generator) -> None:
        model: MixedUNetModel = MixedUNetModel(MixedUNetConfig.create(base_channels = 2, seed = 6))
        out: Tensor = model.forward(Tensor(rng.uniform(size = (2, 1, 16, 16)).astype(np.float32)))
        (out * rng.normal(size = out.shape).astype(np.float32)).sum().backward()

        checked: int = 0
        for name, layer in model.named_layers():
            if not name.startswith(("branch1.", "branch2.")):
                continue
            tensors = [("weight", layer.weights)]
            # conv biases ahead of a training-mode batchnorm cancel out
            if layer.bias is not None and not name.endswith((".conv1", ".conv2")):
                tensors.append(("bias", layer.bias))
            for kind, tensor in tensors:
                assert tensor.grad is not None and np.any(tensor.grad != 0.0), f"{name}.{kind}"
                checked += 1
        assert checked == 2 * 3 * 8

class TestSegmentationInference:

    def test_predict_masks(self, rng: np.random.Generator) -> None:
        model: MixedUNetModel = MixedUNetModel(MixedUNetConfig.create(base_channels = 1))
        images: np.ndarray = rng.uniform(size = (3, 16, 16)).astype(np.float32)
        masks: np.ndarray = predict_masks(model, images, batch_size = 2)
        assert masks.shape == (3, 16, 16)
        assert masks.dtype == np.uint8
        assert model.training
        refined: np.ndarray = predict_masks(model, images, CrfParams.create(iterations = 2))
        assert refined.shape == (3, 16, 16)
        assert set(np.unique(refined)) <= {0, 1}

    def test_model_report(self) -> None:
        model: MixedUNetModel = MixedUNetModel(MixedUNetConfig.create(base_channels = 1))
        report = model_report(model, 16, repeats = 1)
        assert report.parameter_count == 3236
        assert report.input_size == 16
        assert report.latency_seconds > 0.0

class TestSegmentationTrainer:

    def test_one_epoch_writes_history(self, tmp_path) -> None:
        samples, targets = square_samples(4)
        model: MixedUNetModel = MixedUNetModel(MixedUNetConfig.create(base_channels = 2))
        cfg: SegmentationTrainConfig = SegmentationTrainConfig.create(TrainConfig.create(epochs = 1, batch_size = 2, lr_init = 1e-3, seed = 0))
        history = train_segmentation(model, samples[:3], targets, cfg, val_samples = samples[3:], history_path = tmp_path / "history.csv")
        lines: list[str] = (tmp_path / "history.csv").read_text().splitlines()
        assert lines[0] == "epoch,split,loss,dice"
        assert len(history.records) == 2
        assert not model.training

    def test_zero_learning_rate_keeps_weights(self) -> None:
        samples, targets = square_samples(2)
        model: MixedUNetModel = MixedUNetModel(MixedUNetConfig.create(base_channels = 1))
        before: list[np.ndarray] = [tensor.data.copy() for tensor in model.parameters()]
        train_segmentation(model, samples, targets, SegmentationTrainConfig.create(TrainConfig.create(epochs = 1, batch_size = 2, lr_init = 0.0)))
        assert all(np.array_equal(old, tensor.data) for old, tensor in zip(before, model.parameters()))

    def test_missing_targets_are_a_configuration_error(self) -> None:
        samples, targets = square_samples(2)
        del targets[samples[1].stem]
        with pytest.raises(ConfigurationError):
            train_segmentation(MixedUNetModel(MixedUNetConfig.create(base_channels = 1)), samples, targets, SegmentationTrainConfig.create(TrainConfig.create(epochs = 1)))

    def test_seed_loss_without_seeds_and_without_fallback_fails(self) -> None:
        samples, targets = square_samples(1)
        stem: str = samples[0].stem
        targets[stem] = SegmentationTarget.create(np.full((16, 16), IGNORE_LABEL, dtype = np.uint8), targets[stem].crf_mask)
        cfg: SegmentationTrainConfig = SegmentationTrainConfig.create(TrainConfig.create(epochs = 1, batch_size = 1), LossModeEnum.SEED, allow_ce_fallback = False)
        with pytest.raises(EmptySeedError):
            train_segmentation(MixedUNetModel(MixedUNetConfig.create(base_channels = 1)), samples, targets, cfg)

class TestSegmentationScoring:

    def test_runs_in_batches_and_matches_predicted_masks(self, monkeypatch: pytest.MonkeyPatch) -> None:
        samples, targets = square_samples(5)
        model: MixedUNetModel = MixedUNetModel(MixedUNetConfig.create(base_channels = 1))
        cfg: SegmentationTrainConfig = SegmentationTrainConfig.create(TrainConfig.create(epochs = 1, batch_size = 2))

        batch_sizes: list[int] = []
        forward = model.forward

        def counting_forward(x: Tensor, *args, **kwargs) -> Tensor:
            batch_sizes.append(x.shape[0])
            return forward(x, *args, **kwargs)

        monkeypatch.setattr(model, "forward", counting_forward)
        loss, dice = score_segmentation(model, samples, targets, cfg)
        assert batch_sizes == [2, 2, 1]
        assert model.training

        masks: np.ndarray = predict_masks(model, np.stack([sample.image for sample in samples]))
        expected: float = float(np.mean([evaluate(mask, targets[sample.stem].crf_mask).dice for mask, sample in zip(masks, samples)]))
        assert dice == pytest.approx(expected)
        assert np.isfinite(loss) and loss > 0.0

    def test_batch_size_does_not_change_the_score(self) -> None:
        samples, targets = square_samples(5)
        model: MixedUNetModel = MixedUNetModel(MixedUNetConfig.create(base_channels = 1))
        small = score_segmentation(model, samples, targets, SegmentationTrainConfig.create(TrainConfig.create(epochs = 1, batch_size = 1)))
        large = score_segmentation(model, samples, targets, SegmentationTrainConfig.create(TrainConfig.create(epochs = 1, batch_size = 8)))
        assert small == pytest.approx(large, rel = 1e-5)

    def test_empty_split(self) -> None:
        cfg: SegmentationTrainConfig = SegmentationTrainConfig.create(TrainConfig.create(epochs = 1))
        assert score_segmentation(MixedUNetModel(MixedUNetConfig.create(base_channels = 1)), [], {}, cfg) == (0.0, 0.0)
