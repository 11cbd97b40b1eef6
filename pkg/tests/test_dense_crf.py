import numpy as np
import pytest
from ptri_camforge.Core.Errors import ContractError, ShapeError
from ptri_camforge.CamRefine import Cam, ThresholdConfig, threshold
from ptri_camforge.DenseCrf import CrfParams, UnaryField, mean_field, pairwise_kernel, refine_mask, unary_from_cam, unary_from_seed
from reference_oracles import naive_kernel, naive_mean_field

def softmax_negative(unary: np.ndarray) -> np.ndarray:
    e: np.ndarray = np.exp(-unary - (-unary).max(axis = -1, keepdims = True))
    return e / e.sum(axis = -1, keepdims = True)

def kernel_args(params: CrfParams) -> tuple[float, float, float, float, float]:
    return params.w_app, params.theta_alpha, params.theta_beta, params.w_smooth, params.theta_gamma

class TestExactMeanField:

    @pytest.mark.parametrize("size", [(4, 4), (5, 3), (8, 8)])
    def test_matches_pixel_by_pixel_reference(self, rng: np.random.Generator, size: tuple[int, int]) -> None:
        params: CrfParams = CrfParams.create(iterations = 3, w_app = 2.0, theta_alpha = 2.5, theta_beta = 0.2, w_smooth = 1.0, theta_gamma = 1.5)
        image: np.ndarray = rng.uniform(size = size)
        unary: np.ndarray = rng.uniform(0.1, 3.0, size = size + (2,))
        reference: list[np.ndarray] = naive_mean_field(unary, image, 3, *kernel_args(params))
        for iterations in range(1, 4):
            q: np.ndarray = mean_field(UnaryField.create(unary), image, CrfParams.create(iterations = iterations, w_app = 2.0, theta_alpha = 2.5, theta_beta = 0.2, w_smooth = 1.0, theta_gamma = 1.5))
            assert np.abs(q - reference[iterations - 1]).max() < 1e-6

    def test_three_classes(self, rng: np.random.Generator) -> None:
        params: CrfParams = CrfParams.create(iterations = 2, w_app = 1.0, theta_alpha = 3.0, theta_beta = 0.3, w_smooth = 0.5, theta_gamma = 1.0)
        image: np.ndarray = rng.uniform(size = (4, 5))
        unary: np.ndarray = rng.uniform(0.1, 2.0, size = (4, 5, 3))
        expected: np.ndarray = naive_mean_field(unary, image, 2, *kernel_args(params))[-1]
        assert np.abs(mean_field(UnaryField.create(unary), image, params) - expected).max() < 1e-6

    def test_kernel_matches_reference(self, rng: np.random.Generator) -> None:
        params: CrfParams = CrfParams.create()
        image: np.ndarray = rng.uniform(size = (5, 4))
        kernel: np.ndarray = pairwise_kernel(image, params)
        assert np.allclose(kernel, naive_kernel(image, *kernel_args(params)))
        assert np.allclose(kernel, kernel.T)
        assert np.all(np.diag(kernel) == 0.0)

    def test_zero_iterations_is_softmax_of_unary(self, rng: np.random.Generator) -> None:
        unary: np.ndarray = rng.uniform(0.1, 3.0, size = (6, 6, 2))
        q: np.ndarray = mean_field(UnaryField.create(unary), rng.uniform(size = (6, 6)), CrfParams.create(iterations = 0))
        assert np.allclose(q, softmax_negative(unary))

    def test_zero_pairwise_weights_keep_unary_argmax(self, rng: np.random.Generator) -> None:
        unary: np.ndarray = rng.uniform(0.1, 3.0, size = (6, 6, 2))
        q: np.ndarray = mean_field(UnaryField.create(unary), np.full((6, 6), 0.5), CrfParams.create(w_app = 0.0, w_smooth = 0.0))
        assert np.array_equal(np.argmax(q, axis = -1), np.argmin(unary, axis = -1))

    def test_output_is_a_distribution(self, rng: np.random.Generator) -> None:
        q: np.ndarray = mean_field(UnaryField.create(rng.uniform(0.1, 3.0, size = (7, 7, 2))), rng.uniform(size = (7, 7)), CrfParams.create(iterations = 4))
        assert np.all(q >= 0.0)
        assert np.allclose(q.sum(axis = -1), 1.0)

    def test_image_size_mismatch(self) -> None:
        with pytest.raises(ShapeError):
            mean_field(UnaryField.create(np.ones((4, 4, 2))), np.zeros((4, 5)), CrfParams.create())

class TestWindowedMeanField:

    @pytest.mark.parametrize("two_tone", [False, True])
    def test_agrees_with_exact_when_windows_cover_the_image(self, rng: np.random.Generator, two_tone: bool) -> None:
        params: CrfParams = CrfParams.create(iterations = 3, theta_alpha = 80.0, theta_gamma = 2.0)
        image: np.ndarray = np.full((6, 6), 0.3)
        if two_tone:
            image[:, 3:] = 0.3 + 2 * params.theta_beta
        unary: UnaryField = UnaryField.create(rng.uniform(0.1, 3.0, size = (6, 6, 2)))
        exact: np.ndarray = mean_field(unary, image, params)
        windowed: np.ndarray = mean_field(unary, image, params, exact_pixel_limit = 0)
        assert np.abs(exact - windowed).max() < 1e-6

    def test_large_image_runs_windowed(self, rng: np.random.Generator) -> None:
        image: np.ndarray = rng.uniform(size = (80, 80))
        q: np.ndarray = mean_field(UnaryField.create(rng.uniform(0.1, 3.0, size = (80, 80, 2))), image, CrfParams.create(iterations = 2))
        assert q.shape == (80, 80, 2)
        assert np.allclose(q.sum(axis = -1), 1.0)

    def test_colour_image_agrees_with_exact_on_lattice_intensities(self, rng: np.random.Generator) -> None:
        params: CrfParams = CrfParams.create(iterations = 3, theta_alpha = 80.0, theta_gamma = 2.0)
        image: np.ndarray = np.full((6, 6, 3), 0.3)
        image[:, 3:, 0] += 2 * params.theta_beta
        image[3:, :, 1] += params.theta_beta
        image[:2, :2, 2] += 3 * params.theta_beta
        unary: UnaryField = UnaryField.create(rng.uniform(0.1, 3.0, size = (6, 6, 2)))
        exact: np.ndarray = mean_field(unary, image, params)
        windowed: np.ndarray = mean_field(unary, image, params, exact_pixel_limit = 0)
        assert np.abs(exact - windowed).max() < 1e-6

    def test_colour_distance_is_not_the_channel_mean(self, rng: np.random.Generator) -> None:
        params: CrfParams = CrfParams.create(iterations = 2, theta_alpha = 80.0, theta_gamma = 2.0)
        gray: np.ndarray = np.full((6, 6), 0.3)
        gray[:, 3:] += 2 * params.theta_beta
        colour: np.ndarray = np.repeat(gray[..., None], 3, axis = -1)
        colour[:, 3:, 1] = 0.3
        colour[:, 3:, 2] = 0.3 + 4 * params.theta_beta
        unary: UnaryField = UnaryField.create(rng.uniform(0.1, 3.0, size = (6, 6, 2)))
        assert np.allclose(colour.mean(axis = -1), gray)
        from_colour: np.ndarray = mean_field(unary, colour, params, exact_pixel_limit = 0)
        assert np.abs(from_colour - mean_field(unary, colour, params)).max() < 1e-6
        assert np.abs(from_colour - mean_field(unary, gray, params, exact_pixel_limit = 0)).max() > 1e-4

class TestLabelPermutation:

    @pytest.mark.parametrize("exact_pixel_limit", [64 * 64, 0])
    def test_permuting_classes_permutes_the_output(self, rng: np.random.Generator, exact_pixel_limit: int) -> None:
        params: CrfParams = CrfParams.create(iterations = 3, w_app = 2.0, theta_alpha = 4.0, theta_beta = 0.25, w_smooth = 1.0, theta_gamma = 1.5)
        image: np.ndarray = rng.uniform(size = (7, 6))
        unary: np.ndarray = rng.uniform(0.1, 3.0, size = (7, 6, 3))
        q: np.ndarray = mean_field(UnaryField.create(unary), image, params, exact_pixel_limit = exact_pixel_limit)
        for permutation in ([2, 0, 1], [1, 0, 2], [0, 2, 1]):
            permuted: np.ndarray = mean_field(UnaryField.create(unary[..., permutation]), image, params, exact_pixel_limit = exact_pixel_limit)
            assert np.allclose(permuted, q[..., permutation], atol = 1e-10)

class TestUnaries:

    def test_unary_from_cam(self) -> None:
        unary: UnaryField = unary_from_cam(np.array([[0.0, 0.5, 1.0]]), 0.05)
        assert np.allclose(unary.values[0, 0], [-np.log(0.95), -np.log(0.05)])
        assert np.allclose(unary.values[0, 1], [np.log(2.0), np.log(2.0)])
        assert np.allclose(unary.values[0, 2], [-np.log(0.05), -np.log(0.95)])

    def test_unary_from_cam_rejects_out_of_range(self) -> None:
        with pytest.raises(ContractError):
            unary_from_cam(np.array([[0.0, 1.2]]), 0.05)

    def test_seed_unary_argmax_is_the_seed(self, rng: np.random.Generator) -> None:
        cam: Cam = Cam.create(1, rng.uniform(size = (8, 8)))
        seed: np.ndarray = threshold(cam, ThresholdConfig.create(0.35))
        unary: UnaryField = unary_from_seed(seed, cam, 0.05)
        assert np.array_equal(np.argmin(unary.values, axis = -1), seed)

class TestRefineMask:

    def test_fills_a_hole_in_a_uniform_lesion(self) -> None:
        truth: np.ndarray = np.zeros((12, 12), dtype = np.uint8)
        truth[4:8, 4:8] = 1
        image: np.ndarray = np.where(truth == 1, 0.8, 0.2)
        cam: np.ndarray = truth * 0.9
        cam[5, 5] = 0.2
        seed: np.ndarray = (cam >= 0.35).astype(np.uint8)
        assert seed[5, 5] == 0
        refined: np.ndarray = refine_mask(seed, cam, image, CrfParams.create())
        assert refined.dtype == np.uint8
        assert np.array_equal(refined, truth)

    def test_empty_seed_stays_empty(self) -> None:
        image: np.ndarray = np.full((10, 10), 0.4)
        refined: np.ndarray = refine_mask(np.zeros((10, 10), dtype = np.uint8), np.zeros((10, 10)), image, CrfParams.create())
        assert not refined.any()
