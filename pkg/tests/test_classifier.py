import numpy as np
import pytest
from ptri_camforge.Core.Tensor import Tensor, no_grad
from ptri_camforge.Core.Errors import ConfigurationError, ShapeError
from ptri_camforge.Classification.ClassifierModel import ClassifierModel, classify
from ptri_camforge.Classification.ClassifierTrainer import evaluate_classifier, train_classifier
from ptri_camforge.CamRefine.CamOps import compute_cam
from ptri_camforge.DataSynth.CorpusLoader import CorpusDataset, CorpusSample
from ptri_camforge.DataSynth.SplitEnum import SplitEnum
from ptri_camforge.Training.TrainConfig import TrainConfig

def brightness_corpus(rng: np.random.Generator, per_class: int = 8, size: int = 8) -> CorpusDataset:
    """
    Dark images are class 0, bright images class 1.
    """
    dataset: CorpusDataset = CorpusDataset(classes = ["dark", "bright"])
    for index in range(2 * per_class):
        label: int = index % 2
        level: float = 0.75 if label == 1 else 0.25
        image: np.ndarray = np.clip(level + rng.normal(0.0, 0.05, size = (size, size)), 0.0, 1.0).astype(np.float32)
        split: SplitEnum = SplitEnum.VAL if index >= 2 * per_class - 4 else SplitEnum.TRAIN
        dataset.samples.append(CorpusSample.create(f"img{index:03d}", image, label, None, split, f"g{index}"))
    return dataset

class TestClassifierModel:

    def test_cam_mean_equals_logit(self, rng: np.random.Generator) -> None:
        model: ClassifierModel = ClassifierModel(channels = (4, 6), seed = 3)
        model.eval()
        with no_grad():
            output = classify(model, Tensor(rng.uniform(size = (16, 16)).astype(np.float32)))
        for c in range(2):
            cam_mean: float = float(compute_cam(output.features, model.head_weights(), c).values.mean())
            assert cam_mean == pytest.approx(float(output.logits.data[0, c]), rel = 1e-4, abs = 1e-5)
        assert np.allclose(output.probabilities.data.sum(axis = 1), 1.0, atol = 1e-6)

    def test_constant_image_gives_constant_features(self) -> None:
        model: ClassifierModel = ClassifierModel(channels = (4, 6), seed = 3)
        model.eval()
        with no_grad():
            features: np.ndarray = model.features(Tensor(np.full((1, 1, 16, 16), 0.6, dtype = np.float32))).data
        assert np.allclose(features, features[:, :, :1, :1], atol = 1e-5)

    def test_head_has_no_bias(self) -> None:
        model: ClassifierModel = ClassifierModel(channels = (4, 6))
        assert model.head.bias is None
        assert model.head_weights().shape == (2, 6)

    def test_rejects_inputs_below_minimum_size(self) -> None:
        model: ClassifierModel = ClassifierModel(channels = (4, 6))
        assert model.min_input_size == 8
        with pytest.raises(ShapeError):
            model.forward(Tensor(np.zeros((1, 1, 6, 6), dtype = np.float32)))

    def test_same_seed_same_weights(self) -> None:
        first: list[tuple[str, np.ndarray]] = ClassifierModel(channels = (4,), seed = 9).named_blobs()
        second: list[tuple[str, np.ndarray]] = ClassifierModel(channels = (4,), seed = 9).named_blobs()
        assert all(np.array_equal(a, b) for (_, a), (_, b) in zip(first, second))

class TestClassifierTrainer:

    def test_zero_learning_rate_keeps_weights(self, rng: np.random.Generator) -> None:
        model: ClassifierModel = ClassifierModel(channels = (4,), seed = 0)
        before: list[np.ndarray] = [tensor.data.copy() for tensor in model.parameters()]
        train_classifier(model, brightness_corpus(rng), TrainConfig.create(epochs = 2, batch_size = 4, lr_init = 0.0, seed = 0))
        assert all(np.array_equal(old, tensor.data) for old, tensor in zip(before, model.parameters()))

    def test_learns_brightness(self, rng: np.random.Generator) -> None:
        model: ClassifierModel = ClassifierModel(channels = (4,), seed = 0)
        dataset: CorpusDataset = brightness_corpus(rng)
        history = train_classifier(model, dataset, TrainConfig.create(epochs = 25, batch_size = 4, lr_init = 1e-2, seed = 0))

        train_rows = [record for record in history.records if record.split == "train"]
        assert len(train_rows) == 25
        assert train_rows[-1].loss < train_rows[0].loss
        _, accuracy = evaluate_classifier(model, dataset.in_split(SplitEnum.TRAIN))
        assert accuracy >= 0.75
        assert not model.training

    def test_history_csv_header(self, rng: np.random.Generator) -> None:
        model: ClassifierModel = ClassifierModel(channels = (4,), seed = 0)
        history = train_classifier(model, brightness_corpus(rng), TrainConfig.create(epochs = 1, batch_size = 4, seed = 0))
        lines: list[str] = history.to_csv().splitlines()
        assert lines[0] == "epoch,split,loss,accuracy"
        assert [line.split(",")[1] for line in lines[1:]] == ["train", "val"]

    def test_single_class_is_a_configuration_error(self, rng: np.random.Generator) -> None:
        dataset: CorpusDataset = brightness_corpus(rng)
        dataset.samples = [sample for sample in dataset.samples if sample.label == 1]
        with pytest.raises(ConfigurationError):
            train_classifier(ClassifierModel(channels = (4,)), dataset, TrainConfig.create(epochs = 1))

    def test_training_is_deterministic(self) -> None:
        results: list[list[np.ndarray]] = []
        for _ in range(2):
            model: ClassifierModel = ClassifierModel(channels = (4,), seed = 5)
            train_classifier(model, brightness_corpus(np.random.default_rng(7)), TrainConfig.create(epochs = 2, batch_size = 3, seed = 5))
            results.append([blob.copy() for _, blob in model.named_blobs()])
        assert all(np.array_equal(a, b) for a, b in zip(*results))
