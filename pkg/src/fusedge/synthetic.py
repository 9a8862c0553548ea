"""Synthetic benchmark images with exact ground-truth contours.

Each case is an RGB image built from flat or ramped color regions plus the
one-pixel contour separating them: a pixel is ground truth when its region
label differs from the label directly right of or below it. Strong color
steps keep the contours detectable under the noise levels the benchmark
injects.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .imaging import ColorSpace, PlanarImage, save_image
from .refine import EdgeMap


@dataclass(frozen=True)
class SyntheticCase:
    name: str
    image: PlanarImage
    truth: EdgeMap


def _gt_from_labels(labels: np.ndarray) -> EdgeMap:
    gt = np.zeros(labels.shape, dtype=bool)
    gt[:, :-1] |= labels[:, :-1] != labels[:, 1:]
    gt[:-1, :] |= labels[:-1, :] != labels[1:, :]
    return EdgeMap(gt)


def _paint(labels: np.ndarray, colors: dict[int, tuple[float, float, float]]) -> PlanarImage:
    h, w = labels.shape
    data = np.zeros((h, w, 3))
    for label, color in colors.items():
        data[labels == label] = color
    return PlanarImage(data, ColorSpace.RGB)


def _case_square(size: int, lo: int, hi: int, inner, outer, name: str) -> SyntheticCase:
    labels = np.zeros((size, size), dtype=int)
    labels[lo:hi, lo:hi] = 1
    return SyntheticCase(name, _paint(labels, {0: outer, 1: inner}), _gt_from_labels(labels))


def _case_circle(size: int, cx: float, cy: float, radius: float, inner, outer, name: str) -> SyntheticCase:
    rr, cc = np.mgrid[0:size, 0:size]
    labels = (((rr - cy) ** 2 + (cc - cx) ** 2) <= radius**2).astype(int)
    return SyntheticCase(name, _paint(labels, {0: outer, 1: inner}), _gt_from_labels(labels))


def _case_bands(size: int, splits: list[int], colors: list[tuple[float, float, float]], name: str) -> SyntheticCase:
    labels = np.zeros((size, size), dtype=int)
    for i, s in enumerate(splits):
        labels[:, s:] = i + 1
    return SyntheticCase(name, _paint(labels, dict(enumerate(colors))), _gt_from_labels(labels))


def _case_diagonal(size: int, a, b, name: str) -> SyntheticCase:
    rr, cc = np.mgrid[0:size, 0:size]
    labels = (cc > rr).astype(int)
    return SyntheticCase(name, _paint(labels, {0: a, 1: b}), _gt_from_labels(labels))


def _case_quadrants(size: int, colors: list[tuple[float, float, float]], name: str) -> SyntheticCase:
    half = size // 2
    labels = np.zeros((size, size), dtype=int)
    labels[:half, half:] = 1
    labels[half:, :half] = 2
    labels[half:, half:] = 3
    return SyntheticCase(name, _paint(labels, dict(enumerate(colors))), _gt_from_labels(labels))


def _case_ramp_disk(size: int, cx: float, cy: float, radius: float, bg, name: str) -> SyntheticCase:
    """Disk filled with a gentle color ramp on a flat background; only the
    rim is ground truth, the interior gradient stays sub-threshold."""
    rr, cc = np.mgrid[0:size, 0:size]
    inside = ((rr - cy) ** 2 + (cc - cx) ** 2) <= radius**2
    labels = inside.astype(int)
    data = np.zeros((size, size, 3))
    data[~inside] = bg
    ramp = 0.55 + 0.25 * (cc - cx) / size
    data[inside, 0] = ramp[inside]
    data[inside, 1] = 0.15
    data[inside, 2] = 0.75
    return SyntheticCase(name, PlanarImage(data, ColorSpace.RGB), _gt_from_labels(labels))


def _case_ramp_square(size: int, lo: int, hi: int, bg, name: str) -> SyntheticCase:
    rr, cc = np.mgrid[0:size, 0:size]
    labels = np.zeros((size, size), dtype=int)
    labels[lo:hi, lo:hi] = 1
    inside = labels == 1
    data = np.zeros((size, size, 3))
    data[~inside] = bg
    ramp = 0.5 + 0.3 * (rr - lo) / max(hi - lo, 1)
    data[inside, 0] = 0.1
    data[inside, 1] = ramp[inside]
    data[inside, 2] = 0.2
    return SyntheticCase(name, PlanarImage(data, ColorSpace.RGB), _gt_from_labels(labels))


def build_suite(size: int = 64) -> list[SyntheticCase]:
    """The ten-image benchmark suite: squares, circles, color steps,
    quadrants, a diagonal split, and ramp-filled shapes."""
    q = size // 4
    return [
        _case_square(size, q, 3 * q, (0.85, 0.15, 0.10), (0.05, 0.25, 0.85), "square_red_on_blue"),
        _case_square(size, q - 2, 3 * q + 4, (0.95, 0.85, 0.10), (0.10, 0.55, 0.20), "square_yellow_on_green"),
        _case_circle(size, size / 2, size / 2, size * 0.32, (0.90, 0.90, 0.90), (0.15, 0.10, 0.45), "circle_light_on_navy"),
        _case_circle(size, size * 0.42, size * 0.55, size * 0.27, (0.05, 0.75, 0.75), (0.55, 0.10, 0.10), "circle_cyan_on_brick"),
        _case_bands(size, [size // 3, 2 * size // 3], [(0.9, 0.1, 0.1), (0.1, 0.9, 0.1), (0.1, 0.1, 0.9)], "bands_rgb"),
        _case_bands(size, [size // 2], [(0.95, 0.45, 0.05), (0.10, 0.30, 0.80)], "bands_orange_blue"),
        _case_diagonal(size, (0.85, 0.75, 0.10), (0.20, 0.10, 0.60), "diagonal_gold_violet"),
        _case_quadrants(size, [(0.9, 0.15, 0.1), (0.1, 0.25, 0.9), (0.9, 0.85, 0.1), (0.1, 0.75, 0.15)], "quadrants"),
        _case_ramp_disk(size, size / 2, size / 2, size * 0.3, (0.04, 0.35, 0.08), "ramp_disk"),
        _case_ramp_square(size, size // 4, 3 * size // 4, (0.75, 0.75, 0.75), "ramp_square"),
    ]


def write_suite(directory: Path, size: int = 64) -> Path:
    """Write the suite as PNG pairs plus a manifest file; returns the
    manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    lines = []
    for case in build_suite(size):
        img_path = directory / f"{case.name}.png"
        gt_path = directory / f"{case.name}_gt.png"
        save_image(case.image, img_path)
        save_image(
            PlanarImage(case.truth.mask.astype(np.float64), ColorSpace.SCALAR), gt_path
        )
        lines.append(f"{img_path.name},{gt_path.name}")
    manifest = directory / "manifest.csv"
    manifest.write_text("\n".join(lines) + "\n")
    return manifest
