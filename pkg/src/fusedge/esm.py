"""Edge strength map construction.

Three response fields are fused per pixel: the color vector gradient (sum of
the per-plane derivative-of-Gaussian magnitudes) and directional-derivative
responses at two scales. For each steering direction the three are averaged;
the per-pixel maximum over directions is the edge strength and the
maximizing angle its orientation. The map is normalized by its global maximum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .imaging import ColorSpace, PlanarImage
from .kernels import DirectionBank, agdd_kernel, convolve, gaussian_gradient_kernels

# Strengths below this are treated as exact zeros: they are float residue of
# zero-sum kernels on flat regions, and would otherwise pollute the nonzero
# set used by quantile thresholding.
STRENGTH_EPS = 1e-12


@dataclass(frozen=True)
class EdgeStrengthMap:
    """Per-pixel edge strength plus the dominant gradient angle in [0, pi)."""

    strength: np.ndarray
    orientation: np.ndarray

    def __post_init__(self) -> None:
        if self.strength.shape != self.orientation.shape:
            raise ValueError("strength and orientation shapes differ")

    @property
    def shape(self) -> tuple[int, int]:
        return self.strength.shape


@dataclass(frozen=True)
class DirectionalResponses:
    """Per-direction response magnitudes A[n] for one (sigma, rho) setting."""

    bank: DirectionBank
    fields: np.ndarray  # (N, H, W)
    sigma: float
    rho: float


def _require_xyz(img: PlanarImage) -> None:
    if img.space is not ColorSpace.XYZ:
        raise ValueError(f"expected xyz input, got {img.space.value}")


def color_gradient(img: PlanarImage, sigma: float) -> EdgeStrengthMap:
    """Color vector gradient: per-plane smoothed-gradient magnitudes, summed.

    The orientation is the angle of the plane-summed gradient vector,
    folded into [0, pi).
    """
    _require_xyz(img)
    du, dv = gaussian_gradient_kernels(sigma)
    gu = convolve(img, du)
    gv = convolve(img, dv)
    magnitude = np.hypot(gu, gv).sum(axis=2)
    angle = np.arctan2(gv.sum(axis=2), gu.sum(axis=2)) % np.pi
    return EdgeStrengthMap(strength=magnitude, orientation=angle)


def agdd_response(
    img: PlanarImage, sigma: float, rho: float, bank: DirectionBank
) -> DirectionalResponses:
    """Directional-derivative response per bank angle, summed over channels."""
    _require_xyz(img)
    fields = np.empty((bank.count, img.height, img.width))
    for n, theta in enumerate(bank.angles):
        kernel = agdd_kernel(sigma, rho, float(theta))
        fields[n] = np.abs(convolve(img, kernel)).sum(axis=2)
    return DirectionalResponses(bank=bank, fields=fields, sigma=sigma, rho=rho)


def normalize_strength(strength: np.ndarray) -> np.ndarray:
    """Divide by the global maximum; flat fields are passed through so an
    all-zero map stays all-zero. Values at or below the float-residue floor
    are flushed to exact zero."""
    peak = float(strength.max(initial=0.0))
    out = strength / peak if peak >= STRENGTH_EPS else strength.copy()
    out[out < STRENGTH_EPS] = 0.0
    return out


def fuse_esm(
    grad: EdgeStrengthMap,
    first: DirectionalResponses,
    second: DirectionalResponses,
) -> EdgeStrengthMap:
    """Fuse the color gradient with two directional-response stacks.

    strength(x) = max over n of (grad + first[n] + second[n]) / 3, normalized
    by the global maximum; orientation(x) is the maximizing bank angle, with
    ties resolved toward the smallest index.
    """
    if first.bank.count != second.bank.count or not np.array_equal(
        first.bank.angles, second.bank.angles
    ):
        raise ValueError("directional responses use different banks")
    if first.fields.shape != second.fields.shape or grad.strength.shape != first.fields.shape[1:]:
        raise ValueError("field dimensions disagree")

    averaged = (grad.strength[np.newaxis] + first.fields + second.fields) / 3.0
    best = np.argmax(averaged, axis=0)
    strength = np.take_along_axis(averaged, best[np.newaxis], axis=0)[0]
    orientation = first.bank.angles[best]
    return EdgeStrengthMap(strength=normalize_strength(strength), orientation=orientation)


def zero_gradient(shape: tuple[int, int]) -> EdgeStrengthMap:
    """All-zero gradient field, for ablations that fuse directional
    responses alone."""
    return EdgeStrengthMap(strength=np.zeros(shape), orientation=np.zeros(shape))
