from dataclasses import dataclass

EXACT_PIXEL_LIMIT: int = 64 * 64

@dataclass(slots = True)
class CrfParams:
    """
    Mean-field settings for the fully connected CRF.

    Pairwise kernel between pixels i and j:
        w_app * exp(-|p_i - p_j|^2 / (2 theta_alpha^2) - |I_i - I_j|^2 / (2 theta_beta^2))
      + w_smooth * exp(-|p_i - p_j|^2 / (2 theta_gamma^2))
    Positions are in pixels, intensities in [0, 1].
    """
    iterations: int
    w_app: float
    theta_alpha: float
    theta_beta: float
    w_smooth: float
    theta_gamma: float
    unary_clip: float

    @staticmethod
    def create(
        iterations: int = 10,
        w_app: float = 10.0,
        theta_alpha: float = 80.0,
        theta_beta: float = 13.0 / 255.0,
        w_smooth: float = 3.0,
        theta_gamma: float = 3.0,
        unary_clip: float = 0.05,
    ) -> "CrfParams":

        assert isinstance(iterations, int) and iterations >= 0, "iterations must be a non-negative integer"
        assert w_app >= 0 and w_smooth >= 0, "kernel weights must be non-negative"
        assert theta_alpha > 0 and theta_beta > 0 and theta_gamma > 0, "kernel bandwidths must be positive"
        assert 0.0 < unary_clip < 0.5, "unary_clip must lie in (0, 0.5)"
        return CrfParams(iterations, float(w_app), float(theta_alpha), float(theta_beta), float(w_smooth), float(theta_gamma), float(unary_clip))
