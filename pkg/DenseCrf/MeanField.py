import itertools
import numpy as np
from dataclasses import dataclass
from scipy.ndimage import gaussian_filter
from ..Core.Errors import ContractError, ShapeError
from ..CamRefine.Cam import Cam, LabelMask
from .CrfParams import CrfParams, EXACT_PIXEL_LIMIT

KERNEL_TRUNCATE: float = 3.0
KERNEL_BLOCK_ROWS: int = 512

@dataclass(slots = True)
class UnaryField:
    """
    Per-pixel, per-class negative log-probabilities, shape (h, w, C).
    """
    values: np.ndarray

    @staticmethod
    def create(values: np.ndarray) -> "UnaryField":

        assert isinstance(values, np.ndarray) and values.ndim == 3, "unary values must be an (h, w, C) array"
        assert values.shape[2] >= 2, "a unary field needs at least two classes"
        assert np.all(np.isfinite(values)), "unary values must be finite"
        return UnaryField(values.astype(np.float64, copy = False))

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.values.shape

    def probabilities(self) -> np.ndarray:
        return _softmax(-self.values)

def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted: np.ndarray = logits - logits.max(axis = -1, keepdims = True)
    exps: np.ndarray = np.exp(shifted)
    return exps / exps.sum(axis = -1, keepdims = True)

def _cam_values(cam: Cam | np.ndarray) -> np.ndarray:
    return cam.values if isinstance(cam, Cam) else np.asarray(cam, dtype = np.float64)

def unary_from_cam(cam: Cam | np.ndarray, epsilon: float) -> UnaryField:
    """
    Summary:
        Two-class unary from a normalized foreground map:
        p_fg = clip(cam, epsilon, 1 - epsilon), p_bg = 1 - p_fg, unary = -log p.
        Class 0 is background, class 1 foreground.
    """
    values: np.ndarray = _cam_values(cam)
    if values.ndim != 2:
        raise ShapeError(f"unary_from_cam expects a 2-D map, got shape {values.shape}")
    if values.min() < 0.0 or values.max() > 1.0:
        raise ContractError(f"unary_from_cam expects values in [0, 1], got range [{values.min()}, {values.max()}]")
    if not 0.0 < epsilon < 0.5:
        raise ContractError(f"epsilon must lie in (0, 0.5), got {epsilon}")

    p_fg: np.ndarray = np.clip(values, epsilon, 1.0 - epsilon)
    return UnaryField.create(np.stack([-np.log(1.0 - p_fg), -np.log(p_fg)], axis = -1))

def unary_from_seed(seed: LabelMask, cam: Cam | np.ndarray, epsilon: float) -> UnaryField:
    """
    Summary:
        Unary for a thresholded seed: the map (seed + cam) / 2 goes through unary_from_cam.
        For a seed produced by thresholding the same normalized cam, the unary argmax equals the seed.
    """
    values: np.ndarray = _cam_values(cam)
    if seed.shape != values.shape:
        raise ShapeError(f"seed {seed.shape} and cam {values.shape} differ in size")
    return unary_from_cam((seed.astype(np.float64) + np.clip(values, 0.0, 1.0)) / 2.0, epsilon)

def _pixel_features(image: np.ndarray, h: int, w: int) -> np.ndarray:
    """
    (h, w) or (h, w, ch) image -> (h * w, ch) float64 intensities.
    """
    planes: np.ndarray = image[..., None] if image.ndim == 2 else image
    if planes.ndim != 3 or planes.shape[:2] != (h, w):
        raise ShapeError(f"image of shape {image.shape} does not match the {h}x{w} unary")
    return planes.reshape(h * w, -1).astype(np.float64)

def pairwise_kernel(image: np.ndarray, params: CrfParams) -> np.ndarray:
    """
    Summary:
        Dense (N, N) pairwise kernel over all pixel pairs with a zero diagonal (no self message).
        Built in row blocks; only meant for images up to EXACT_PIXEL_LIMIT pixels.
    """
    h, w = image.shape[0], image.shape[1]
    n: int = h * w
    intensities: np.ndarray = _pixel_features(image, h, w)
    yy, xx = np.divmod(np.arange(n, dtype = np.int64), w)
    yy = yy.astype(np.float64)
    xx = xx.astype(np.float64)

    kernel: np.ndarray = np.empty((n, n), dtype = np.float64)
    for start in range(0, n, KERNEL_BLOCK_ROWS):
        stop: int = min(start + KERNEL_BLOCK_ROWS, n)
        position_sq: np.ndarray = (yy[start:stop, None] - yy[None, :]) ** 2 + (xx[start:stop, None] - xx[None, :]) ** 2
        intensity_sq: np.ndarray = ((intensities[start:stop, None, :] - intensities[None, :, :]) ** 2).sum(axis = -1)
        block: np.ndarray = params.w_app * np.exp(-position_sq / (2.0 * params.theta_alpha ** 2) - intensity_sq / (2.0 * params.theta_beta ** 2))
        block += params.w_smooth * np.exp(-position_sq / (2.0 * params.theta_gamma ** 2))
        kernel[start:stop] = block
    np.fill_diagonal(kernel, 0.0)
    return kernel

def _unnormalized_mass(theta: float) -> float:
    """
    Sum of the 1-D truncated Gaussian weights exp(-k^2 / (2 theta^2)), |k| <= radius, as sampled by gaussian_filter.
    """
    radius: int = int(KERNEL_TRUNCATE * theta + 0.5)
    offsets: np.ndarray = np.arange(-radius, radius + 1, dtype = np.float64)
    return float(np.exp(-offsets ** 2 / (2.0 * theta ** 2)).sum())

def _spatial_sum(field: np.ndarray, theta: float) -> np.ndarray:
    """
    sum_j exp(-|p_i - p_j|^2 / (2 theta^2)) * field_j over a window of radius 3 theta, self included.
    """
    mass: float = _unnormalized_mass(theta)
    return gaussian_filter(field, sigma = theta, mode = "constant", cval = 0.0, truncate = KERNEL_TRUNCATE) * (mass * mass)

def _occupied_cells(features: np.ndarray, low: np.ndarray, step: float) -> np.ndarray:
    """
    Integer lattice coordinates (one per channel) of every cell that is a corner of some pixel's cell.
    """
    channels: int = features.shape[1]
    base: np.ndarray = np.floor((features - low) / step).astype(np.int64)
    corners: np.ndarray = np.array(list(itertools.product((0, 1), repeat = channels)), dtype = np.int64)
    return np.unique((base[:, None, :] + corners[None, :, :]).reshape(-1, channels), axis = 0)

def _windowed_messages(q: np.ndarray, features: np.ndarray, params: CrfParams) -> np.ndarray:
    """
    Messages for large images. The spatial factors are truncated Gaussian windows; the intensity
    factor of the appearance kernel is expanded over a lattice spaced theta_beta apart in every
    channel, with multilinear (product of hats) interpolation weights. Only occupied cells are visited.
    """
    h, w, classes = q.shape
    messages: np.ndarray = np.zeros_like(q)

    if params.w_smooth > 0:
        for label in range(classes):
            messages[..., label] += params.w_smooth * (_spatial_sum(q[..., label], params.theta_gamma) - q[..., label])

    if params.w_app > 0:
        step: float = params.theta_beta
        low: np.ndarray = features.min(axis = 0)
        planes: np.ndarray = features.reshape(h, w, -1)
        for cell in _occupied_cells(features, low, step):
            offset: np.ndarray = planes - (low + cell * step)
            hat: np.ndarray = np.prod(np.maximum(0.0, 1.0 - np.abs(offset) / step), axis = -1)
            if not np.any(hat > 0):
                continue
            affinity: np.ndarray = np.exp(-(offset ** 2).sum(axis = -1) / (2.0 * params.theta_beta ** 2))
            for label in range(classes):
                weighted: np.ndarray = affinity * q[..., label]
                messages[..., label] += params.w_app * hat * (_spatial_sum(weighted, params.theta_alpha) - weighted)
    return messages

def mean_field(unary: UnaryField, image: np.ndarray, params: CrfParams, exact_pixel_limit: int = EXACT_PIXEL_LIMIT) -> np.ndarray:
    """
    Summary:
        Mean-field inference for the fully connected CRF with Potts compatibility.
        Q starts as softmax(-unary); each iteration computes the message
        m_i(l) = sum_{j != i} k(i, j) Q_j(l) from the previous Q, the Potts penalty
        sum_{l' != l} m_i(l'), and sets Q = softmax(-unary - penalty).

    Parameters:
        unary: (h, w, C) unary field.
        image: (h, w) or (h, w, ch) intensities in [0, 1].
        params: kernel weights, bandwidths and iteration count.
        exact_pixel_limit: images with more pixels use windowed message passing.

    Returns:
        (h, w, C) per-pixel class distribution.
    """
    h, w, classes = unary.shape
    if image.shape[:2] != (h, w):
        raise ShapeError(f"image of shape {image.shape} does not match the {h}x{w} unary")

    q: np.ndarray = unary.probabilities()
    if params.iterations == 0 or (params.w_app == 0 and params.w_smooth == 0):
        return q

    exact: bool = h * w <= exact_pixel_limit
    kernel: np.ndarray | None = pairwise_kernel(image, params) if exact else None
    features: np.ndarray = _pixel_features(image, h, w)

    for _ in range(params.iterations):
        if kernel is not None:
            messages: np.ndarray = (kernel @ q.reshape(h * w, classes)).reshape(h, w, classes)
        else:
            messages = _windowed_messages(q, features, params)
        penalty: np.ndarray = messages.sum(axis = -1, keepdims = True) - messages
        q = _softmax(-unary.values - penalty)
    return q

def refine_mask(seed: LabelMask, cam: Cam | np.ndarray, image: np.ndarray, params: CrfParams) -> LabelMask:
    """
    Summary:
        Dense-CRF refinement of a thresholded seed: argmax of mean_field over the seed unary.

    Returns:
        (h, w) uint8 label mask.
    """
    q: np.ndarray = mean_field(unary_from_seed(seed, cam, params.unary_clip), image, params)
    return np.argmax(q, axis = -1).astype(np.uint8)
