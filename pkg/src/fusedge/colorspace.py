"""Color-space conversions: RGB to XYZ, XYZ to L*a*b, and the invertible
luminance-chrominance transform used by the collaborative denoiser.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .imaging import ColorSpace, PlanarImage

# CIE RGB -> XYZ tristimulus matrix.
RGB_TO_XYZ = np.array(
    [
        [0.412453, 0.357580, 0.180423],
        [0.212671, 0.715160, 0.072169],
        [0.019334, 0.119193, 0.950227],
    ]
)

# Sum of the Z-row coefficients; the Z channel is divided by it so that all
# three stored channels lie in [0, 1] (the X and Y rows already sum to
# 0.950456 and 1.0).
Z_ROW_SUM = 1.088754

_XYZ_SCALE = np.array([1.0, 1.0, Z_ROW_SUM])

# Luminance-chrominance ("opponent") transform: luminance is the channel
# mean, chrominance the two orthogonal difference axes. Chrominance is zero
# for achromatic input and may be negative.
XYZ_TO_YUV = np.array(
    [
        [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
        [0.5, 0.0, -0.5],
        [0.25, -0.5, 0.25],
    ]
)

YUV_TO_XYZ = np.linalg.inv(XYZ_TO_YUV)

# Per-channel noise amplification of the opponent transform (row L2 norms):
# i.i.d. noise of std s in XYZ becomes std s * gain in each opponent channel.
YUV_NOISE_GAIN = np.sqrt((XYZ_TO_YUV**2).sum(axis=1))

_LAB_KNOT = (6.0 / 29.0) ** 3
_LAB_SLOPE = (29.0 / 6.0) ** 2 / 3.0
_LAB_OFFSET = 16.0 / 116.0


@dataclass(frozen=True)
class WhitePoint:
    """Reference tristimulus values, on the same scale as the XYZ image."""

    Xn: float
    Yn: float
    Zn: float

    def __post_init__(self) -> None:
        if min(self.Xn, self.Yn, self.Zn) <= 0:
            raise ValueError("white point components must be strictly positive")


# Image of RGB white under rgb_to_xyz, i.e. the row sums with the Z channel
# already divided by Z_ROW_SUM.
D_WHITE = WhitePoint(0.950456, 1.0, 1.0)


def _require_space(img: PlanarImage, space: ColorSpace) -> None:
    if img.space is not space:
        raise ValueError(f"expected {space.value} input, got {img.space.value}")


def _apply_matrix(data: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    return data @ matrix.T


def rgb_to_xyz(img: PlanarImage) -> PlanarImage:
    """Linear RGB -> XYZ map, with the Z channel rescaled into [0, 1].

    White (1, 1, 1) maps to (0.950456, 1.0, 1.0) in the stored scale.
    """
    _require_space(img, ColorSpace.RGB)
    xyz = _apply_matrix(img.data, RGB_TO_XYZ) / _XYZ_SCALE
    return PlanarImage(xyz, ColorSpace.XYZ)


def xyz_to_rgb(img: PlanarImage) -> PlanarImage:
    """Inverse of rgb_to_xyz, clamped to [0, 1]. Intended for visualization
    dumps; the detection pipeline itself never leaves XYZ."""
    _require_space(img, ColorSpace.XYZ)
    rgb = _apply_matrix(img.data * _XYZ_SCALE, np.linalg.inv(RGB_TO_XYZ))
    return PlanarImage(rgb, ColorSpace.RGB)


def lab_f(t: np.ndarray) -> np.ndarray:
    """Lightness compression: cube root above the knot (6/29)^3, the matching
    tangent line below it. Continuous and monotone on [0, 1]."""
    t = np.asarray(t, dtype=np.float64)
    return np.where(t > _LAB_KNOT, np.cbrt(t), _LAB_SLOPE * t + _LAB_OFFSET)


def xyz_to_lab(img: PlanarImage, wp: WhitePoint = D_WHITE) -> PlanarImage:
    """XYZ -> L*a*b, stored rescaled: L/100, and a, b affinely mapped from
    [-128, 127] to [0, 1]."""
    _require_space(img, ColorSpace.XYZ)
    fx = lab_f(img.plane(0) / wp.Xn)
    fy = lab_f(img.plane(1) / wp.Yn)
    fz = lab_f(img.plane(2) / wp.Zn)
    lum = 116.0 * fy - 16.0
    a = 500.0 * (fx - fy)
    b = 200.0 * (fy - fz)
    return PlanarImage.from_planes(
        [lum / 100.0, (a + 128.0) / 255.0, (b + 128.0) / 255.0], ColorSpace.LAB
    )


def xyz_to_yuv(img: PlanarImage) -> PlanarImage:
    """XYZ -> luminance-chrominance. Round-trips with yuv_to_xyz to within
    floating-point accuracy; chrominance planes are signed."""
    _require_space(img, ColorSpace.XYZ)
    return PlanarImage(_apply_matrix(img.data, XYZ_TO_YUV), ColorSpace.YUV)


def yuv_to_xyz(img: PlanarImage) -> PlanarImage:
    _require_space(img, ColorSpace.YUV)
    return PlanarImage(_apply_matrix(img.data, YUV_TO_XYZ), ColorSpace.XYZ)
