"""Collaborative-filtering denoiser (hard-threshold stage).

The image is taken to luminance-chrominance space; similar blocks are found
in the luminance channel only, and each group's coordinates are reused to
filter all three channels. Groups are stacked into a 3D array, transformed
(orthonormal 2D DCT per block, orthonormal Haar along the stack), hard
thresholded, inverse transformed, and aggregated back with per-group weights.

Block-level operations work on bare 2D float planes rather than image
containers because chrominance planes are signed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from . import colorspace
from .imaging import ColorSpace, PlanarImage


@dataclass(frozen=True)
class Cbm3dParams:
    """Denoiser knobs. `sigma` is the noise standard deviation on the [0, 1]
    intensity scale; None means "resolve from the noise model upstream"."""

    block_size: int = 8
    step: int = 3
    search_radius: int = 19
    max_group: int = 16
    match_threshold: float = 3000.0 / (255.0**2)
    hard_lambda: float = 2.7
    sigma: float | None = None

    def __post_init__(self) -> None:
        if self.block_size < 2:
            raise ValueError("block_size must be >= 2")
        if self.step < 1:
            raise ValueError("step must be >= 1")
        if self.max_group < 1 or self.max_group & (self.max_group - 1):
            raise ValueError("max_group must be a power of two")
        if self.sigma is not None and self.sigma < 0:
            raise ValueError("sigma must be >= 0")


@dataclass(frozen=True)
class BlockGroup:
    """A stack of same-size blocks: top-left coordinates, pixel data, and the
    index of the reference block within the stack."""

    coords: np.ndarray  # (K, 2) int rows of (row, col)
    patches: np.ndarray  # (K, B, B) float
    reference: int

    def __post_init__(self) -> None:
        k = len(self.coords)
        if k < 1 or k & (k - 1):
            raise ValueError("group size must be a power of two")
        if self.patches.shape[0] != k:
            raise ValueError("coords and patches disagree on group size")
        if not 0 <= self.reference < k:
            raise ValueError("reference index out of range")

    @property
    def size(self) -> int:
        return len(self.coords)


@lru_cache(maxsize=None)
def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II basis as an n x n matrix."""
    k = np.arange(n)[:, np.newaxis]
    x = np.arange(n)[np.newaxis, :]
    mat = np.cos(np.pi * (2 * x + 1) * k / (2 * n))
    mat[0] *= math.sqrt(1.0 / n)
    mat[1:] *= math.sqrt(2.0 / n)
    return mat


@lru_cache(maxsize=None)
def haar_matrix(n: int) -> np.ndarray:
    """Orthonormal Haar wavelet basis for a power-of-two length.

    Row 0 is the scaling (DC) vector; the construction is the classic
    recursive [H kron (1,1); I kron (1,-1)] / sqrt(2)."""
    if n & (n - 1):
        raise ValueError("Haar length must be a power of two")
    mat = np.array([[1.0]])
    while mat.shape[0] < n:
        s = 1.0 / math.sqrt(2.0)
        top = np.kron(mat, [s, s])
        bottom = np.kron(np.eye(mat.shape[0]), [s, -s])
        mat = np.vstack([top, bottom])
    return mat


def transform_group(patches: np.ndarray) -> np.ndarray:
    """Forward 3D transform: 2D DCT per block, then Haar along the stack."""
    k, b, _ = patches.shape
    d = dct_matrix(b)
    spectra = np.einsum("ij,pjk,lk->pil", d, patches, d)
    return np.tensordot(haar_matrix(k), spectra, axes=(1, 0))


def inverse_transform_group(coeffs: np.ndarray) -> np.ndarray:
    k, b, _ = coeffs.shape
    spectra = np.tensordot(haar_matrix(k).T, coeffs, axes=(1, 0))
    d = dct_matrix(b)
    return np.einsum("ji,pjk,kl->pil", d, spectra, d)


def reference_grid(height: int, width: int, p: Cbm3dParams) -> list[tuple[int, int]]:
    """Step-spaced reference positions, flushed to the far edge so every
    pixel is covered by at least one block."""
    def axis_positions(extent: int) -> list[int]:
        last = extent - p.block_size
        positions = list(range(0, last + 1, p.step))
        if positions[-1] != last:
            positions.append(last)
        return positions

    return [(r, c) for r in axis_positions(height) for c in axis_positions(width)]


def block_match(plane: np.ndarray, ref: tuple[int, int], p: Cbm3dParams) -> BlockGroup:
    """Gather the blocks most similar to the reference block.

    Candidates are every fully-inside block whose top-left corner is within
    Chebyshev distance search_radius of the reference corner. Similarity is
    mean squared difference per pixel; candidates at or beyond
    match_threshold are dropped (the reference always stays). Survivors are
    ordered reference first, then by ascending distance with row-major ties,
    and truncated to the largest power of two not exceeding max_group.
    """
    plane = np.asarray(plane, dtype=np.float64)
    h, w = plane.shape
    b = p.block_size
    r0, c0 = ref
    if not (0 <= r0 <= h - b and 0 <= c0 <= w - b):
        raise ValueError("reference block falls outside the image")

    windows = np.lib.stride_tricks.sliding_window_view(plane, (b, b))
    rlo, rhi = max(0, r0 - p.search_radius), min(h - b, r0 + p.search_radius)
    clo, chi = max(0, c0 - p.search_radius), min(w - b, c0 + p.search_radius)
    region = windows[rlo : rhi + 1, clo : chi + 1]
    ref_block = windows[r0, c0]
    dist = ((region - ref_block) ** 2).mean(axis=(2, 3))

    rows, cols = np.meshgrid(
        np.arange(rlo, rhi + 1), np.arange(clo, chi + 1), indexing="ij"
    )
    rows, cols, dist = rows.ravel(), cols.ravel(), dist.ravel()
    is_ref = (rows == r0) & (cols == c0)
    keep = (dist < p.match_threshold) & ~is_ref
    order = np.lexsort((cols[keep], rows[keep], dist[keep]))

    sel_rows = np.concatenate(([r0], rows[keep][order]))
    sel_cols = np.concatenate(([c0], cols[keep][order]))
    size = min(p.max_group, 1 << (len(sel_rows).bit_length() - 1))
    coords = np.stack([sel_rows[:size], sel_cols[:size]], axis=1).astype(np.intp)
    patches = np.stack([windows[r, c] for r, c in coords])
    return BlockGroup(coords=coords, patches=patches, reference=0)


def gather_patches(plane: np.ndarray, group: BlockGroup) -> BlockGroup:
    """Re-extract a group's patches from another plane at the same coords."""
    plane = np.asarray(plane, dtype=np.float64)
    b = group.patches.shape[1]
    patches = np.stack([plane[r : r + b, c : c + b] for r, c in group.coords])
    return BlockGroup(coords=group.coords, patches=patches, reference=group.reference)


def hard_threshold_group(group: BlockGroup, p: Cbm3dParams) -> tuple[BlockGroup, float]:
    """Shrink the group's 3D spectrum and reconstruct.

    Coefficients with magnitude below hard_lambda * sigma are zeroed, except
    the overall DC (scaling row, block DC), which always survives. The
    returned weight is 1 / max(1, number of surviving coefficients).
    """
    sigma = p.sigma or 0.0
    coeffs = transform_group(group.patches)
    mask = np.abs(coeffs) >= p.hard_lambda * sigma
    mask[0, 0, 0] = True
    retained = int(mask.sum())
    filtered = inverse_transform_group(np.where(mask, coeffs, 0.0))
    weight = 1.0 / max(1, retained)
    return replace(group, patches=filtered), weight


def aggregate(groups: list[tuple[BlockGroup, float]], base: np.ndarray) -> np.ndarray:
    """Weighted per-pixel average of all filtered blocks.

    Pixels covered by no block copy `base`. Accumulation order is fixed by
    the group list, so the result is reproducible for a given parameter set.
    """
    base = np.asarray(base, dtype=np.float64)
    num = np.zeros_like(base)
    den = np.zeros_like(base)
    for group, weight in groups:
        b = group.patches.shape[1]
        for (r, c), patch in zip(group.coords, group.patches):
            if r < 0 or c < 0 or r + b > base.shape[0] or c + b > base.shape[1]:
                raise ValueError("block outside image bounds")
            num[r : r + b, c : c + b] += weight * patch
            den[r : r + b, c : c + b] += weight
    covered = den > 0
    out = base.copy()
    out[covered] = num[covered] / den[covered]
    return out


def plan_groups(plane: np.ndarray, p: Cbm3dParams) -> list[BlockGroup]:
    """Block-match every reference position of the step grid on one plane."""
    h, w = plane.shape
    return [block_match(plane, ref, p) for ref in reference_grid(h, w, p)]


def cbm3d_denoise(img: PlanarImage, p: Cbm3dParams) -> PlanarImage:
    """Denoise an XYZ image by collaborative filtering.

    Matching runs on the luminance channel only; chrominance channels reuse
    the same group coordinates. Each opponent channel is thresholded with
    sigma scaled by that channel's noise gain, then aggregated and mapped
    back to XYZ.
    """
    if img.space is not ColorSpace.XYZ:
        raise ValueError(f"expected xyz input, got {img.space.value}")
    if min(img.height, img.width) < p.block_size:
        raise ValueError("image smaller than one block")

    yuv = colorspace.xyz_to_yuv(img)
    groups = plan_groups(yuv.plane(0), p)
    sigma = p.sigma or 0.0

    out_planes = []
    for c in range(3):
        channel_params = replace(p, sigma=sigma * float(colorspace.YUV_NOISE_GAIN[c]))
        plane = yuv.plane(c)
        filtered = [
            hard_threshold_group(gather_patches(plane, g), channel_params) for g in groups
        ]
        out_planes.append(aggregate(filtered, plane))

    denoised = PlanarImage.from_planes(out_planes, ColorSpace.YUV)
    return colorspace.yuv_to_xyz(denoised)
