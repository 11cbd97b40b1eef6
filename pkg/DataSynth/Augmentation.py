import numpy as np
from dataclasses import dataclass
from scipy.ndimage import rotate

ALLOWED_ROTATIONS: tuple[float, ...] = (25.0, -25.0, 90.0, 180.0, 270.0)

@dataclass(slots = True)
class AugmentConfig:
    flip: bool
    rotations: tuple[float, ...]
    rotation_probability: float
    noise_sigma: tuple[float, float]
    noise_probability: float
    seed: int

    @staticmethod
    def create(
        flip: bool = True,
        rotations: tuple[float, ...] = ALLOWED_ROTATIONS,
        rotation_probability: float = 0.5,
        noise_sigma: tuple[float, float] = (0.3, 0.7),
        noise_probability: float = 0.5,
        seed: int = 0,
    ) -> "AugmentConfig":

        assert isinstance(flip, bool), "flip must be a bool"
        assert all(angle in ALLOWED_ROTATIONS for angle in rotations), f"rotations must be drawn from {ALLOWED_ROTATIONS}"
        assert 0.0 <= rotation_probability <= 1.0, "rotation_probability must lie in [0, 1]"
        assert 0.0 <= noise_sigma[0] <= noise_sigma[1] <= 1.0, "noise sigma range must lie within [0, 1]"
        assert 0.0 <= noise_probability <= 1.0, "noise_probability must lie in [0, 1]"
        return AugmentConfig(flip, tuple(float(angle) for angle in rotations), rotation_probability, (float(noise_sigma[0]), float(noise_sigma[1])), noise_probability, seed)

def _rotate_pair(image: np.ndarray, mask: np.ndarray | None, angle: float) -> tuple[np.ndarray, np.ndarray | None]:

    quarter_turns: dict[float, int] = {90.0: 1, 180.0: 2, 270.0: 3}
    if angle in quarter_turns:
        turns: int = quarter_turns[angle]
        return np.rot90(image, turns).copy(), None if mask is None else np.rot90(mask, turns).copy()

    rotated: np.ndarray = rotate(image, angle, reshape = False, order = 1, mode = "reflect")
    rotated_mask: np.ndarray | None = None
    if mask is not None:
        rotated_mask = rotate(mask, angle, reshape = False, order = 0, mode = "reflect").astype(mask.dtype)
    return rotated, rotated_mask

def augment(image: np.ndarray, mask: np.ndarray | None, cfg: AugmentConfig, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray | None]:
    """
    Summary:
        Applies, in order: a random up-down or left-right flip, a rotation from the configured
        set, and additive zero-mean Gaussian noise. Geometry is shared by image and mask
        (the mask is never interpolated across labels); noise touches the image only.
        The output image is clamped to [0, 1].

    Parameters:
        image: (h, w) float image in [0, 1].
        mask: optional (h, w) integer mask of the same size.
        cfg: augmentation settings.
        rng: the caller's generator; equal generator states give equal outputs.
    """
    assert image.ndim == 2, "augment expects a 2-D grayscale image"
    assert mask is None or mask.shape == image.shape, "mask dims must match image dims"

    out_image: np.ndarray = image
    out_mask: np.ndarray | None = mask

    if cfg.flip:
        choice: int = int(rng.integers(3))
        if choice == 1:
            out_image = out_image[::-1, :]
            out_mask = None if out_mask is None else out_mask[::-1, :]
        elif choice == 2:
            out_image = out_image[:, ::-1]
            out_mask = None if out_mask is None else out_mask[:, ::-1]

    if cfg.rotations and rng.random() < cfg.rotation_probability:
        angle: float = cfg.rotations[int(rng.integers(len(cfg.rotations)))]
        out_image, out_mask = _rotate_pair(out_image, out_mask, angle)

    if rng.random() < cfg.noise_probability:
        sigma: float = float(rng.uniform(cfg.noise_sigma[0], cfg.noise_sigma[1]))
        out_image = out_image + rng.normal(0.0, sigma, size = out_image.shape)

    out_image = np.clip(out_image, 0.0, 1.0).astype(image.dtype)
    return np.ascontiguousarray(out_image), None if out_mask is None else np.ascontiguousarray(out_mask)
