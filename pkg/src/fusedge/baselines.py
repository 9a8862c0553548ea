"""Classical reference detectors: a color Sobel operator and a color Canny
chain, plus the directional-derivative-only ablation of the main pipeline.
All three consume XYZ images and share the refinement machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import ndimage

from .esm import EdgeStrengthMap, agdd_response, color_gradient, fuse_esm, normalize_strength, zero_gradient
from .imaging import ColorSpace, PlanarImage
from .kernels import DirectionBank
from .refine import EdgeMap, ThresholdParams, hysteresis, morph_refine, nonmax_suppress, resolve_thresholds

SOBEL_U = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
SOBEL_V = SOBEL_U.T


class BaselineMethod(Enum):
    COLOR_SOBEL = "color-sobel"
    COLOR_CANNY = "color-canny"
    AGDD_ONLY = "agdd-only"


@dataclass(frozen=True)
class BaselineParams:
    method: BaselineMethod
    sigma: float = 1.0
    thresholds: ThresholdParams = ThresholdParams()

    def __post_init__(self) -> None:
        if self.sigma <= 0:
            raise ValueError("sigma must be > 0")


def _require_xyz(img: PlanarImage) -> None:
    if img.space is not ColorSpace.XYZ:
        raise ValueError(f"expected xyz input, got {img.space.value}")


def sobel_magnitude(img: PlanarImage) -> np.ndarray:
    """Per-channel 3x3 Sobel responses, channel magnitudes summed."""
    _require_xyz(img)
    total = np.zeros((img.height, img.width))
    for c in range(3):
        gu = ndimage.correlate(img.plane(c), SOBEL_U, mode="mirror")
        gv = ndimage.correlate(img.plane(c), SOBEL_V, mode="mirror")
        total += np.hypot(gu, gv)
    return total


def color_sobel(img: PlanarImage, t: ThresholdParams) -> EdgeMap:
    """Normalized color Sobel magnitude, binarized at the high threshold."""
    strength = normalize_strength(sobel_magnitude(img))
    if not (strength > 0).any():
        return EdgeMap(np.zeros_like(strength, dtype=bool))
    high, _ = resolve_thresholds(strength, t)
    return EdgeMap(strength >= high) if high > 0 else EdgeMap(strength > 0)


def color_canny_esm(img: PlanarImage, sigma: float) -> EdgeStrengthMap:
    """Suppressed, normalized color gradient at a single scale. Smoothing is
    carried by the derivative-of-Gaussian kernels themselves, so this equals
    the main pipeline's gradient stage at the same scale."""
    grad = color_gradient(img, sigma)
    normalized = EdgeStrengthMap(
        strength=normalize_strength(grad.strength), orientation=grad.orientation
    )
    return nonmax_suppress(normalized)

def color_canny(img: PlanarImage, sigma: float, t: ThresholdParams) -> EdgeMap:
    """Color Canny chain: smoothed color gradient, suppression, hysteresis.
    No denoising, no directional derivatives, no morphology."""
    return hysteresis(color_canny_esm(img, sigma), t)


def agdd_only_esm(
    img: PlanarImage, sigma1: float, sigma2: float, rho: float, bank: DirectionBank
) -> EdgeStrengthMap:
    """Two-scale directional-derivative fusion with the color gradient
    zeroed out; the ablation counterpart of the full strength map."""
    first = agdd_response(img, sigma1, rho, bank)
    second = agdd_response(img, sigma2, rho, bank)
    return fuse_esm(zero_gradient((img.height, img.width)), first, second)


def agdd_only(
    img: PlanarImage,
    sigma1: float,
    sigma2: float,
    rho: float,
    bank: DirectionBank,
    t: ThresholdParams,
) -> EdgeMap:
    esm = nonmax_suppress(agdd_only_esm(img, sigma1, sigma2, rho, bank))
    return morph_refine(hysteresis(esm, t), t)
