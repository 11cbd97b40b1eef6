import logging
import numpy as np
import pytest
from typing import Callable
from ptri_camforge.Core.Tensor import Tensor, no_grad
from ptri_camforge.Core.Errors import ContractError, EmptySeedError, ShapeError
from ptri_camforge.Objectives import IGNORE_LABEL, SeedRegions, combined_loss, pixel_ce_loss, seed_regions_from_masks, seeding_loss
from reference_oracles import numerical_gradient, relative_error

def distribution(foreground: np.ndarray) -> Tensor:
    """
    (n, h, w) foreground probabilities -> (n, 2, h, w) distribution.
    """
    return Tensor(np.stack([1.0 - foreground, foreground], axis = 1), requires_grad = True)

class TestSeedRegions:

    def test_positive_image(self) -> None:
        mask: np.ndarray = np.array([[1, 0, 0], [0, 0, 0]], dtype = np.uint8)
        cam: np.ndarray = np.array([[0.9, 0.5, 0.01], [0.04, 0.05, 0.3]])
        seeds: SeedRegions = seed_regions_from_masks(mask, cam, image_label = 1, bg_threshold = 0.05)
        assert seeds.seed_map[0].tolist() == [[1, IGNORE_LABEL, 0], [0, IGNORE_LABEL, IGNORE_LABEL]]
        assert seeds.count == 3
        assert seeds.locations(1).tolist() == [[0, 0, 0]]

    def test_negative_image_seeds_everything_as_background(self) -> None:
        seeds: SeedRegions = seed_regions_from_masks(np.zeros((2, 2), dtype = np.uint8), np.ones((2, 2)), image_label = 0)
        assert np.all(seeds.seed_map == 0)

    def test_size_mismatch(self) -> None:
        with pytest.raises(ShapeError):
            seed_regions_from_masks(np.zeros((2, 2), dtype = np.uint8), np.zeros((2, 3)), image_label = 1)

    def test_stack(self) -> None:
        stacked: SeedRegions = SeedRegions.stack([SeedRegions.create(np.zeros((2, 2), dtype = np.uint8)), SeedRegions.create(np.ones((2, 2), dtype = np.uint8))])
        assert stacked.seed_map.shape == (2, 2, 2)

class TestSeedingLoss:

    def test_matches_hand_computation(self) -> None:
        y: Tensor = distribution(np.array([[[0.8, 0.3], [0.5, 0.9]]]))
        seeds: SeedRegions = SeedRegions.create(np.array([[1, 0], [IGNORE_LABEL, IGNORE_LABEL]], dtype = np.uint8))
        expected: float = -(np.log(0.8) + np.log(0.7)) / 2.0
        assert seeding_loss(y, seeds).item() == pytest.approx(expected)

    def test_unseeded_pixels_get_no_gradient(self) -> None:
        y: Tensor = distribution(np.array([[[0.8, 0.3], [0.5, 0.9]]]))
        seeding_loss(y, SeedRegions.create(np.array([[1, 0], [IGNORE_LABEL, IGNORE_LABEL]], dtype = np.uint8))).backward()
        assert np.all(y.grad[0, :, 1, :] == 0.0)
        assert y.grad[0, 1, 0, 0] == pytest.approx(-1.0 / (2 * 0.8))

    def test_empty_seeds_raise(self) -> None:
        y: Tensor = distribution(np.full((1, 2, 2), 0.5))
        with pytest.raises(EmptySeedError):
            seeding_loss(y, SeedRegions.create(np.full((2, 2), IGNORE_LABEL, dtype = np.uint8)))

    def test_out_of_range_seed_label(self) -> None:
        y: Tensor = distribution(np.full((1, 2, 2), 0.5))
        with pytest.raises(ContractError):
            seeding_loss(y, SeedRegions.create(np.full((2, 2), 3, dtype = np.uint8)))

    def test_perfect_prediction_costs_nothing(self) -> None:
        y: Tensor = distribution(np.array([[[1.0, 0.0]]]))
        assert seeding_loss(y, SeedRegions.create(np.array([[1, 0]], dtype = np.uint8))).item() == pytest.approx(0.0, abs = 1e-9)

class TestPixelCrossEntropy:

    def test_mean_over_all_pixels(self) -> None:
        y: Tensor = distribution(np.array([[[0.8, 0.3], [0.5, 0.9]]]))
        target: np.ndarray = np.array([[1, 0], [1, 1]], dtype = np.uint8)
        expected: float = -(np.log(0.8) + np.log(0.7) + np.log(0.5) + np.log(0.9)) / 4.0
        assert pixel_ce_loss(y, target).item() == pytest.approx(expected)

    def test_shape_mismatch(self) -> None:
        with pytest.raises(ShapeError):
            pixel_ce_loss(distribution(np.full((1, 2, 2), 0.5)), np.zeros((3, 3), dtype = np.uint8))

    def test_zero_probability_is_clamped(self) -> None:
        loss: float = pixel_ce_loss(distribution(np.array([[[0.0]]])), np.array([[1]], dtype = np.uint8)).item()
        assert np.isfinite(loss)
        assert loss == pytest.approx(-np.log(1e-12))

class TestCombinedLoss:

    def test_is_the_sum_of_both_terms(self) -> None:
        foreground: np.ndarray = np.array([[[0.8, 0.3], [0.5, 0.9]]])
        seeds: SeedRegions = SeedRegions.create(np.array([[1, 0], [IGNORE_LABEL, 1]], dtype = np.uint8))
        target: np.ndarray = np.array([[1, 0], [0, 1]], dtype = np.uint8)
        expected: float = seeding_loss(distribution(foreground), seeds).item() + pixel_ce_loss(distribution(foreground), target).item()
        assert combined_loss(distribution(foreground), seeds, target).item() == pytest.approx(expected)

    def test_empty_seeds_fall_back_to_cross_entropy(self, caplog: pytest.LogCaptureFixture) -> None:
        foreground: np.ndarray = np.full((1, 2, 2), 0.4)
        seeds: SeedRegions = SeedRegions.create(np.full((2, 2), IGNORE_LABEL, dtype = np.uint8))
        target: np.ndarray = np.ones((2, 2), dtype = np.uint8)
        with pytest.raises(EmptySeedError):
            combined_loss(distribution(foreground), seeds, target)
        with caplog.at_level(logging.WARNING):
            loss: float = combined_loss(distribution(foreground), seeds, target, allow_ce_fallback = True).item()
        assert loss == pytest.approx(-np.log(0.4))
        assert "no seeded pixels" in caplog.text

class TestLossGradients:

    @staticmethod
    def analytic_and_numeric(loss_of: Callable[[Tensor], Tensor], y_data: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        y: Tensor = Tensor(y_data, requires_grad = True)
        loss_of(y).backward()

        def loss() -> float:
            with no_grad():
                return loss_of(Tensor(y_data)).item()

        return y.grad, numerical_gradient(loss, y_data)

    def test_seeding_loss_with_ignored_pixels(self, rng: np.random.Generator) -> None:
        seed_map: np.ndarray = rng.integers(0, 2, size = (2, 3, 3)).astype(np.uint8)
        seed_map[0, 1, :] = IGNORE_LABEL
        seed_map[1, :, 2] = IGNORE_LABEL
        seeds: SeedRegions = SeedRegions.create(seed_map)
        analytic, numeric = self.analytic_and_numeric(lambda y: seeding_loss(y, seeds), rng.uniform(0.1, 0.9, size = (2, 2, 3, 3)))
        assert relative_error(analytic, numeric) < 1e-3
        ignored: np.ndarray = np.broadcast_to((seed_map == IGNORE_LABEL)[:, None], analytic.shape)
        assert np.all(analytic[ignored] == 0.0)
        assert np.allclose(numeric[ignored], 0.0, atol = 1e-8)

    def test_pixel_ce_loss(self, rng: np.random.Generator) -> None:
        target: np.ndarray = rng.integers(0, 3, size = (2, 3, 4)).astype(np.uint8)
        analytic, numeric = self.analytic_and_numeric(lambda y: pixel_ce_loss(y, target), rng.uniform(0.1, 0.9, size = (2, 3, 3, 4)))
        assert relative_error(analytic, numeric) < 1e-3
