"""Edge strength map to binary edge map: non-maximum suppression, double
threshold hysteresis, and morphological cleanup (gap closing, thinning to a
one-pixel skeleton, and pruning of tiny components).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .esm import STRENGTH_EPS, EdgeStrengthMap

log = logging.getLogger(__name__)

_EIGHT = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class ThresholdParams:
    """Double-threshold configuration.

    By default the high threshold is a quantile of the nonzero strengths and
    the low threshold a fixed fraction of it; high_abs/low_abs switch to
    absolute levels. Components smaller than min_component pixels are pruned
    at the end of the morphological stage.
    """

    high_quantile: float = 0.90
    low_ratio: float = 0.4
    min_component: int = 8
    high_abs: float | None = None
    low_abs: float | None = None

    def __post_init__(self) -> None:
        if not 0 < self.high_quantile < 1:
            raise ValueError("high_quantile must be in (0, 1)")
        if not 0 < self.low_ratio < 1:
            raise ValueError("low_ratio must be in (0, 1)")
        if self.min_component < 0:
            raise ValueError("min_component must be >= 0")


@dataclass(frozen=True)
class EdgeMap:
    """Binary edge mask. Ground truth and detector output share this type."""

    mask: np.ndarray

    def __post_init__(self) -> None:
        mask = np.asarray(self.mask)
        if mask.dtype != bool:
            if not np.isin(mask, (0, 1)).all():
                raise ValueError("edge map values must be binary")
            mask = mask.astype(bool)
        else:
            mask = mask.copy()
        mask.flags.writeable = False
        object.__setattr__(self, "mask", mask)

    @property
    def shape(self) -> tuple[int, int]:
        return self.mask.shape

    @property
    def count(self) -> int:
        return int(self.mask.sum())


# Sector layout for 4-direction suppression: gradient angles in [0, pi) are
# binned to the nearest of {0, pi/4, pi/2, 3pi/4}; each sector compares the
# pixel with its two neighbors along that gradient direction (v = +row).
_SECTOR_OFFSETS = {
    0: ((0, -1), (0, 1)),
    1: ((-1, -1), (1, 1)),
    2: ((-1, 0), (1, 0)),
    3: ((-1, 1), (1, -1)),
}


def orientation_sectors(orientation: np.ndarray) -> np.ndarray:
    return (np.round(np.mod(orientation, np.pi) / (np.pi / 4.0)).astype(int)) % 4


# Neighbor comparisons treat relative differences below this as ties. The
# two shoulders of an ideal step edge are analytically equal but differ in
# practice by float residue (clean input) or denoising residue (noisy
# input); treating near-ties as ties keeps both shoulders, and the thinning
# stage then resolves the pair with its fixed north/west side preference
# instead of the residue picking an arbitrary side.
NMS_TIE_REL = 0.02
NMS_TIE_ABS = 1e-9


def nonmax_suppress(esm: EdgeStrengthMap) -> EdgeStrengthMap:
    """Keep only pixels at least as strong as both neighbors along their
    gradient direction; ties (within tolerance) keep the pixel.
    Out-of-bounds neighbors count as zero."""
    strength = esm.strength
    padded = np.pad(strength, 1, mode="constant")
    sectors = orientation_sectors(esm.orientation)
    keep = np.zeros_like(strength, dtype=bool)
    h, w = strength.shape
    for sector, ((dr1, dc1), (dr2, dc2)) in _SECTOR_OFFSETS.items():
        ahead = padded[1 + dr1 : 1 + dr1 + h, 1 + dc1 : 1 + dc1 + w]
        behind = padded[1 + dr2 : 1 + dr2 + h, 1 + dc2 : 1 + dc2 + w]
        local_max = (strength >= ahead - np.maximum(NMS_TIE_ABS, NMS_TIE_REL * ahead)) & (
            strength >= behind - np.maximum(NMS_TIE_ABS, NMS_TIE_REL * behind)
        )
        keep |= local_max & (sectors == sector)
    return EdgeStrengthMap(strength=np.where(keep, strength, 0.0), orientation=esm.orientation)


def resolve_thresholds(strength: np.ndarray, t: ThresholdParams) -> tuple[float, float]:
    """Concrete (high, low) levels for one strength field."""
    if t.high_abs is not None:
        high = t.high_abs
    else:
        nonzero = strength[strength > STRENGTH_EPS]
        if nonzero.size == 0:
            return 0.0, 0.0
        high = float(np.quantile(nonzero, t.high_quantile))
    low = t.low_abs if t.low_abs is not None else t.low_ratio * high
    return high, low


def hysteresis(esm: EdgeStrengthMap, t: ThresholdParams) -> EdgeMap:
    """Double-threshold binarization.

    Pixels at or above the high level seed the result; pixels between the
    levels survive only if 8-connected to a seed. The output is the flood
    fill fixed point, independent of any scan order. A degenerate high
    level (<= 0) accepts every nonzero pixel and is logged.
    """
    strength = esm.strength
    nonzero = strength > STRENGTH_EPS
    if not nonzero.any():
        return EdgeMap(np.zeros_like(strength, dtype=bool))
    high, low = resolve_thresholds(strength, t)
    if high <= 0.0:
        log.warning("degenerate high threshold %g; accepting every nonzero pixel", high)
        return EdgeMap(nonzero)
    strong = strength >= high
    weak = (strength >= low) & nonzero
    labels, n = ndimage.label(weak, structure=_EIGHT)
    if n == 0:
        return EdgeMap(np.zeros_like(strength, dtype=bool))
    seeded = np.zeros(n + 1, dtype=bool)
    seeded[np.unique(labels[strong & weak])] = True
    seeded[0] = False
    return EdgeMap(seeded[labels])


def _zhang_suen_pass(mask: np.ndarray, first_subiter: bool) -> np.ndarray:
    """One subiteration of two-subiteration thinning; returns pixels to delete."""
    p = np.pad(mask, 1, mode="constant").astype(np.uint8)
    p2 = p[:-2, 1:-1]
    p3 = p[:-2, 2:]
    p4 = p[1:-1, 2:]
    p5 = p[2:, 2:]
    p6 = p[2:, 1:-1]
    p7 = p[2:, :-2]
    p8 = p[1:-1, :-2]
    p9 = p[:-2, :-2]
    ring = [p2, p3, p4, p5, p6, p7, p8, p9]
    neighbors = sum(ring)
    transitions = sum(
        ((ring[i] == 0) & (ring[(i + 1) % 8] == 1)).astype(np.uint8) for i in range(8)
    )
    if first_subiter:
        cond = (p2 * p4 * p6 == 0) & (p4 * p6 * p8 == 0)
    else:
        cond = (p2 * p4 * p8 == 0) & (p2 * p6 * p8 == 0)
    # Requiring >= 3 neighbors (instead of the textbook 2) keeps the blunt
    # ends of two-pixel diagonal staircases, which would otherwise unravel
    # end to end; straight ribbons still thin to single lines.
    return mask & (neighbors >= 3) & (neighbors <= 6) & (transitions == 1) & cond


def thin(mask: np.ndarray) -> np.ndarray:
    """Morphological thinning to a one-pixel-wide skeleton (two-subiteration
    scheme, iterated to a fixed point)."""
    mask = mask.astype(bool).copy()
    while True:
        d1 = _zhang_suen_pass(mask, first_subiter=True)
        mask[d1] = False
        d2 = _zhang_suen_pass(mask, first_subiter=False)
        mask[d2] = False
        if not d1.any() and not d2.any():
            return mask


def prune_components(mask: np.ndarray, min_component: int) -> np.ndarray:
    """Drop 8-connected components smaller than min_component pixels."""
    if min_component <= 1 or not mask.any():
        return mask.copy()
    labels, n = ndimage.label(mask, structure=_EIGHT)
    sizes = np.bincount(labels.ravel(), minlength=n + 1)
    keep = sizes >= min_component
    keep[0] = False
    return keep[labels]


def _morph_pass(mask: np.ndarray, t: ThresholdParams) -> np.ndarray:
    # dilate with background borders, erode with set borders: closing then
    # cannot eat line ends that touch the image frame
    dilated = ndimage.binary_dilation(mask, structure=_EIGHT, border_value=0)
    closed = ndimage.binary_erosion(dilated, structure=_EIGHT, border_value=1)
    return prune_components(thin(closed), t.min_component)


def morph_refine(edges: EdgeMap, t: ThresholdParams) -> EdgeMap:
    """Close one-pixel gaps, thin to a skeleton, prune specks.

    The close/thin/prune pass is iterated until the mask stops changing, so
    applying morph_refine to its own output is a no-op. Should the pass
    sequence ever enter a longer cycle, the canonical cycle member (fewest
    pixels, then lexicographically smallest) is returned, which restarting
    from reproduces.
    """
    mask = edges.mask
    seen: dict[bytes, int] = {mask.tobytes(): 0}
    history = [mask]
    for step in range(1, 65):
        refined = _morph_pass(mask, t)
        key = refined.tobytes()
        if key in seen:
            cycle = history[seen[key] :]
            if len(cycle) == 1:
                return EdgeMap(refined)
            log.warning("morphological refinement cycles with period %d", len(cycle))
            return EdgeMap(min(cycle, key=lambda m: (int(m.sum()), m.tobytes())))
        seen[key] = step
        history.append(refined)
        mask = refined
    log.warning("morphological refinement did not stabilize; returning last pass")
    return EdgeMap(mask)


def refine_chain(esm: EdgeStrengthMap, t: ThresholdParams) -> EdgeMap:
    """Full refinement: suppression, hysteresis, morphological cleanup."""
    return morph_refine(hysteresis(nonmax_suppress(esm), t), t)


def edge_map_as_esm(edges: EdgeMap) -> EdgeStrengthMap:
    """Lift a binary map back to a strength map (orientation zeroed), so the
    refinement chain can be re-applied to its own output."""
    return EdgeStrengthMap(
        strength=edges.mask.astype(np.float64), orientation=np.zeros(edges.shape)
    )
