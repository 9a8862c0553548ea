"""Evaluation measures: tolerance-matched precision/recall, PR curves and
their area, PSNR/MSE on the 0-255 scale, the figure of merit, and the
cross-image aggregation used for summary tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .esm import EdgeStrengthMap
from .imaging import PlanarImage
from .refine import EdgeMap

#: Sentinel reported when the mean squared error is exactly zero.
PSNR_INF = float("inf")

#: Default localization penalty of the figure of merit.
FOM_ALPHA = 1.0 / 9.0


@dataclass(frozen=True)
class PrPoint:
    precision: float
    recall: float
    threshold: float = float("nan")


@dataclass
class MetricReport:
    """Per-image, per-method evaluation record."""

    psnr: float = PSNR_INF
    mse: float = 0.0
    fom: float = 1.0
    auc: float = 0.0
    precision: float = 1.0
    recall: float = 1.0
    detected_count: int = 0
    ideal_count: int = 0
    pr_curve: list[PrPoint] = field(default_factory=list)


@dataclass(frozen=True)
class MethodSummary:
    """Arithmetic means across the images of one method."""

    mean_psnr: float
    mean_mse: float
    mean_fom: float
    mean_auc: float
    mean_detected: float
    image_count: int


def _coords(mask: np.ndarray) -> np.ndarray:
    rows, cols = np.nonzero(mask)
    return np.stack([rows, cols], axis=1)


def _ring_offsets(distance: int) -> list[tuple[int, int]]:
    """Offsets at exactly the given Chebyshev distance, row-major order."""
    if distance == 0:
        return [(0, 0)]
    return [
        (dr, dc)
        for dr in range(-distance, distance + 1)
        for dc in range(-distance, distance + 1)
        if max(abs(dr), abs(dc)) == distance
    ]


def match_predictions(pred: np.ndarray, gt: np.ndarray, tolerance: int) -> int:
    """Count true positives under one-to-one greedy nearest-first matching.

    A prediction may claim a ground-truth pixel within Chebyshev distance
    <= tolerance; each ground-truth pixel is claimable once. Pairs are taken
    in order of increasing distance, ties resolved row-major on the
    prediction then the ground-truth pixel, so the count is deterministic.
    """
    if pred.shape != gt.shape:
        raise ValueError("prediction and ground truth dimensions differ")
    available = gt.copy()
    # distance 0 is one-to-one by construction
    overlap = pred & gt
    matched = int(overlap.sum())
    available &= ~overlap
    remaining = pred & ~overlap
    h, w = pred.shape
    for distance in range(1, tolerance + 1):
        if not available.any() or not remaining.any():
            break
        offsets = _ring_offsets(distance)
        # only predictions with a claimable pixel in range can match
        reach = ndimage.maximum_filter(available, size=2 * distance + 1, mode="constant")
        for r, c in _coords(remaining & reach):
            for dr, dc in offsets:
                rr, cc = r + dr, c + dc
                if 0 <= rr < h and 0 <= cc < w and available[rr, cc]:
                    available[rr, cc] = False
                    remaining[r, c] = False
                    matched += 1
                    break
    return matched


def precision_recall(pred: EdgeMap, gt: EdgeMap, tolerance: int = 1) -> PrPoint:
    """Tolerance-matched precision and recall.

    Empty predictions score precision 1 when the ground truth is also empty,
    otherwise 0; an empty ground truth makes recall vacuously 1.
    """
    tp = match_predictions(pred.mask, gt.mask, tolerance)
    n_pred = pred.count
    n_gt = gt.count
    if n_pred == 0:
        precision = 1.0 if n_gt == 0 else 0.0
    else:
        precision = tp / n_pred
    recall = 1.0 if n_gt == 0 else tp / n_gt
    return PrPoint(precision=precision, recall=recall)


def pr_curve(
    esm: EdgeStrengthMap, gt: EdgeMap, step: float, tolerance: int = 1
) -> list[PrPoint]:
    """Sweep binarization thresholds 0, step, 2*step, ..., 1 over a
    normalized strength map, computing precision/recall at each level."""
    if step <= 0:
        raise ValueError("step must be > 0")
    n = round(1.0 / step)
    if math.isclose(n * step, 1.0, rel_tol=0, abs_tol=1e-9):
        thresholds = np.linspace(0.0, 1.0, n + 1)
    else:
        thresholds = np.arange(0.0, 1.0 + step * 1e-9, step)
    points = []
    for t in thresholds:
        binarized = EdgeMap(esm.strength >= t)
        p = precision_recall(binarized, gt, tolerance)
        points.append(PrPoint(precision=p.precision, recall=p.recall, threshold=float(t)))
    return points


def auc(curve: list[PrPoint]) -> float:
    """Trapezoidal area of a PR curve against the recall axis, clamped to
    [0, 1]. Duplicate recall values contribute zero-width trapezoids."""
    if len(curve) < 2:
        raise ValueError("need at least two curve points")
    pts = sorted(curve, key=lambda p: p.recall)
    total = 0.0
    for a, b in zip(pts, pts[1:]):
        total += (a.precision + b.precision) * (b.recall - a.recall) / 2.0
    return min(1.0, max(0.0, total))


def _to_255(obj: EdgeMap | PlanarImage) -> np.ndarray:
    if isinstance(obj, EdgeMap):
        return obj.mask.astype(np.float64) * 255.0
    return obj.data * 255.0


def psnr_mse(pred: EdgeMap | PlanarImage, ref: EdgeMap | PlanarImage) -> tuple[float, float]:
    """Peak signal-to-noise ratio (dB) and mean squared error on the 0-255
    scale. Binary maps are encoded as {0, 255}. Identical inputs report
    mse 0 and an infinite psnr."""
    a, b = _to_255(pred), _to_255(ref)
    if a.shape != b.shape:
        raise ValueError("dimension mismatch")
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return PSNR_INF, 0.0
    return 10.0 * math.log10(255.0**2 / mse), mse


def fom(pred: EdgeMap, gt: EdgeMap, alpha: float = FOM_ALPHA) -> float:
    """Localization-aware edge quality in (0, 1].

    Each detected pixel contributes 1 / (1 + alpha * d^2) with d its exact
    Euclidean distance to the nearest ground-truth pixel; the sum is divided
    by the larger of the two pixel counts. Equals 1 exactly when the maps
    agree as sets.
    """
    if pred.shape != gt.shape:
        raise ValueError("dimension mismatch")
    n_ideal = gt.count
    if n_ideal == 0:
        raise ValueError("ground truth has no edge pixels")
    n_detected = pred.count
    if n_detected == 0:
        return 0.0
    distances = ndimage.distance_transform_edt(~gt.mask)
    credit = 1.0 / (1.0 + alpha * distances[pred.mask] ** 2)
    return float(credit.sum() / max(n_ideal, n_detected))


def hausdorff_chebyshev(a: EdgeMap, b: EdgeMap) -> float:
    """Symmetric Hausdorff distance between two pixel sets under the
    Chebyshev metric (so 1.0 means every pixel has a counterpart within its
    8-neighborhood). Infinite if exactly one map is empty."""
    if a.shape != b.shape:
        raise ValueError("dimension mismatch")
    if a.count == 0 and b.count == 0:
        return 0.0
    if a.count == 0 or b.count == 0:
        return float("inf")
    dist_to_b = ndimage.distance_transform_cdt(~b.mask, metric="chessboard")
    dist_to_a = ndimage.distance_transform_cdt(~a.mask, metric="chessboard")
    return float(max(dist_to_b[a.mask].max(), dist_to_a[b.mask].max()))


def aggregate_table(reports: list[MetricReport]) -> MethodSummary:
    """Arithmetic means of the headline metrics across images."""
    if not reports:
        raise ValueError("cannot aggregate an empty report list")
    return MethodSummary(
        mean_psnr=float(np.mean([r.psnr for r in reports])),
        mean_mse=float(np.mean([r.mse for r in reports])),
        mean_fom=float(np.mean([r.fom for r in reports])),
        mean_auc=float(np.mean([r.auc for r in reports])),
        mean_detected=float(np.mean([r.detected_count for r in reports])),
        image_count=len(reports),
    )


def summary_differences(
    summaries: dict[str, MethodSummary], baseline: str
) -> dict[str, dict[str, float]]:
    """Per-method mean differences against a named baseline method."""
    if baseline not in summaries:
        raise ValueError(f"unknown baseline method {baseline!r}")
    base = summaries[baseline]
    return {
        name: {
            "psnr_minus_baseline": s.mean_psnr - base.mean_psnr,
            "mse_minus_baseline": s.mean_mse - base.mean_mse,
            "fom_minus_baseline": s.mean_fom - base.mean_fom,
            "auc_minus_baseline": s.mean_auc - base.mean_auc,
        }
        for name, s in summaries.items()
    }
