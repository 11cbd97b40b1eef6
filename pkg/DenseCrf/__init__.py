from .CrfParams import CrfParams, EXACT_PIXEL_LIMIT
from .MeanField import UnaryField, unary_from_cam, unary_from_seed, pairwise_kernel, mean_field, refine_mask

__all__ = [
    'CrfParams',
    'EXACT_PIXEL_LIMIT',
    'UnaryField',
    'unary_from_cam',
    'unary_from_seed',
    'pairwise_kernel',
    'mean_field',
    'refine_mask',
]
