"""End-to-end orchestration: configuration, the detection chain, the
manifest-driven evaluation harness, and report emission.

The proposed chain is: load, optional noise injection, RGB to XYZ,
collaborative denoising, color gradient at the fine scale, directional
responses at both scales, fusion, suppression, hysteresis, morphology.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import baselines, cbm3d, colorspace, esm as esm_mod, metrics, refine
from .imaging import ColorSpace, NoiseParams, PlanarImage, add_gaussian_noise, load_image, save_image
from .kernels import direction_bank

log = logging.getLogger(__name__)

METHODS = ("proposed", "color-sobel", "color-canny", "agdd-only")


class PipelineError(RuntimeError):
    """A stage of the detection chain failed; carries the stage name."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage '{stage}': {cause}")
        self.stage = stage


@dataclass(frozen=True)
class PipelineConfig:
    noise: NoiseParams | None = None
    cbm3d: cbm3d.Cbm3dParams = field(default_factory=cbm3d.Cbm3dParams)
    sigma1: float = 1.0
    sigma2: float = 2.0
    rho: float = 2.0
    directions: int = 8
    thresholds: refine.ThresholdParams = field(default_factory=refine.ThresholdParams)
    method: str = "proposed"

    def __post_init__(self) -> None:
        if self.sigma1 <= 0 or self.sigma2 <= 0:
            raise ValueError("scales must be > 0")
        if self.sigma1 >= self.sigma2:
            raise ValueError("sigma1 must be smaller than sigma2")
        if self.rho <= 0:
            raise ValueError("rho must be > 0")
        if self.directions < 1:
            raise ValueError("directions must be >= 1")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {METHODS}")

    def resolved_denoiser(self) -> cbm3d.Cbm3dParams:
        """Denoiser params with sigma defaulted to the injected noise std."""
        if self.cbm3d.sigma is not None:
            return self.cbm3d
        sigma = float(np.sqrt(self.noise.variance)) if self.noise else 0.0
        return replace(self.cbm3d, sigma=sigma)


@dataclass
class DetectionResult:
    """Everything detect() produces for one image."""

    edges: refine.EdgeMap
    response: esm_mod.EdgeStrengthMap  # soft map swept for PR curves
    fused: esm_mod.EdgeStrengthMap | None = None  # pre-suppression strength
    denoised: PlanarImage | None = None
    noisy: PlanarImage | None = None


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(name, exc) from exc


def detect_image(img: PlanarImage, config: PipelineConfig) -> DetectionResult:
    """Run the configured detector on an RGB image already in memory."""
    if img.space is not ColorSpace.RGB:
        raise PipelineError("input", ValueError("detector expects an RGB image"))

    noisy = None
    if config.noise is not None and config.noise.variance > 0:
        img = _stage("noise", add_gaussian_noise, img, config.noise)
        noisy = img
    xyz = _stage("rgb-to-xyz", colorspace.rgb_to_xyz, img)

    if config.method == "color-sobel":
        strength = esm_mod.normalize_strength(_stage("sobel", baselines.sobel_magnitude, xyz))
        soft = esm_mod.EdgeStrengthMap(strength=strength, orientation=np.zeros(strength.shape))
        edges = _stage("threshold", baselines.color_sobel, xyz, config.thresholds)
        return DetectionResult(edges=edges, response=soft, noisy=noisy)

    if config.method == "color-canny":
        suppressed = _stage("gradient", baselines.color_canny_esm, xyz, config.sigma1)
        edges = _stage("hysteresis", refine.hysteresis, suppressed, config.thresholds)
        return DetectionResult(edges=edges, response=suppressed, noisy=noisy)

    bank = direction_bank(config.directions)
    if config.method == "agdd-only":
        fused = _stage(
            "directional-fusion",
            baselines.agdd_only_esm,
            xyz, config.sigma1, config.sigma2, config.rho, bank,
        )
        denoised = None
    else:
        denoised = _stage("denoise", cbm3d.cbm3d_denoise, xyz, config.resolved_denoiser())
        grad = _stage("gradient", esm_mod.color_gradient, denoised, config.sigma1)
        first = _stage("directional-fine", esm_mod.agdd_response, denoised, config.sigma1, config.rho, bank)
        second = _stage("directional-coarse", esm_mod.agdd_response, denoised, config.sigma2, config.rho, bank)
        fused = _stage("fusion", esm_mod.fuse_esm, grad, first, second)

    suppressed = _stage("suppression", refine.nonmax_suppress, fused)
    binary = _stage("hysteresis", refine.hysteresis, suppressed, config.thresholds)
    edges = _stage("morphology", refine.morph_refine, binary, config.thresholds)
    return DetectionResult(
        edges=edges, response=suppressed, fused=fused, denoised=denoised, noisy=noisy
    )


def _esm_to_image(field_2d: np.ndarray) -> PlanarImage:
    return PlanarImage(np.clip(field_2d, 0.0, 1.0), ColorSpace.SCALAR)


def edges_to_image(edges: refine.EdgeMap) -> PlanarImage:
    return PlanarImage(edges.mask.astype(np.float64), ColorSpace.SCALAR)


def detect_file(
    image_path, out_path, config: PipelineConfig, dump_dir=None
) -> DetectionResult:
    """Detect edges in an image file and write the binary map as PNG (0/255).

    With dump_dir set, also writes the denoised image, the fused strength
    map, and the post-suppression map for inspection.
    """
    img = load_image(image_path)
    result = detect_image(img, config)
    save_image(edges_to_image(result.edges), out_path)
    if dump_dir is not None:
        dump_dir = Path(dump_dir)
        dump_dir.mkdir(parents=True, exist_ok=True)
        if result.denoised is not None:
            save_image(colorspace.xyz_to_rgb(result.denoised), dump_dir / "denoised.png")
        if result.fused is not None:
            save_image(_esm_to_image(result.fused.strength), dump_dir / "esm.png")
        save_image(_esm_to_image(result.response.strength), dump_dir / "nms.png")
    return result


@dataclass(frozen=True)
class DatasetManifest:
    """Pairs of (image path, ground-truth edge map path)."""

    entries: tuple[tuple[Path, Path], ...]

    @classmethod
    def from_file(cls, path) -> "DatasetManifest":
        """Parse a manifest: one 'image,ground_truth' pair per line, paths
        relative to the manifest location, '#' starting a comment."""
        path = Path(path)
        base = path.parent
        entries = []
        for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'image,ground_truth'")
            img, gt = (base / parts[0]), (base / parts[1])
            for p in (img, gt):
                if not p.exists():
                    raise FileNotFoundError(f"{path}:{lineno}: no such file {p}")
            entries.append((img, gt))
        if not entries:
            raise ValueError(f"{path}: manifest lists no entries")
        return cls(entries=tuple(entries))


def load_ground_truth(path) -> refine.EdgeMap:
    img = load_image(path)
    if img.channels != 1:
        raise ValueError(f"{path}: ground truth must be single-channel")
    return refine.EdgeMap(img.plane(0) > 0.5)


@dataclass
class EvaluationRow:
    image: str
    method: str
    report: metrics.MetricReport
    error: str | None = None


@dataclass
class EvaluationOutcome:
    rows: list[EvaluationRow]
    summaries: dict[str, metrics.MethodSummary]
    curves: dict[str, list[metrics.PrPoint]]
    failures: int


def evaluate_manifest(
    manifest: DatasetManifest,
    config: PipelineConfig,
    methods: tuple[str, ...] = METHODS,
    step: float = 0.001,
    tolerance: int = 1,
) -> EvaluationOutcome:
    """Run every method over every manifest entry and score it.

    Per-entry failures are recorded and skipped; row order follows the
    manifest regardless of where failures occur. The per-method PR curve is
    the pointwise mean over the images that succeeded.
    """
    rows: list[EvaluationRow] = []
    per_method: dict[str, list[metrics.MetricReport]] = {m: [] for m in methods}
    failures = 0

    for img_path, gt_path in manifest.entries:
        for method in methods:
            cfg = replace(config, method=method)
            try:
                img = load_image(img_path)
                gt = load_ground_truth(gt_path)
                if (img.height, img.width) != gt.shape:
                    raise ValueError("image and ground truth dimensions differ")
                result = detect_image(img, cfg)
                report = score_detection(result, gt, step=step, tolerance=tolerance)
            except (OSError, ValueError, PipelineError) as exc:
                log.warning("evaluation failed for %s [%s]: %s", img_path.name, method, exc)
                rows.append(EvaluationRow(image=img_path.name, method=method,
                                          report=metrics.MetricReport(), error=str(exc)))
                failures += 1
                continue
            rows.append(EvaluationRow(image=img_path.name, method=method, report=report))
            per_method[method].append(report)

    summaries = {
        m: metrics.aggregate_table(reps) for m, reps in per_method.items() if reps
    }
    curves = {m: _mean_curve(reps) for m, reps in per_method.items() if reps}
    return EvaluationOutcome(rows=rows, summaries=summaries, curves=curves, failures=failures)


def score_detection(
    result: DetectionResult,
    gt: refine.EdgeMap,
    step: float = 0.001,
    tolerance: int = 1,
) -> metrics.MetricReport:
    """All five measures for one detection against its ground truth."""
    curve = metrics.pr_curve(result.response, gt, step=step, tolerance=tolerance)
    pr = metrics.precision_recall(result.edges, gt, tolerance=tolerance)
    psnr, mse = metrics.psnr_mse(result.edges, gt)
    return metrics.MetricReport(
        psnr=psnr,
        mse=mse,
        fom=metrics.fom(result.edges, gt),
        auc=metrics.auc(curve),
        precision=pr.precision,
        recall=pr.recall,
        detected_count=result.edges.count,
        ideal_count=gt.count,
        pr_curve=curve,
    )


def _mean_curve(reports: list[metrics.MetricReport]) -> list[metrics.PrPoint]:
    curves = [r.pr_curve for r in reports if r.pr_curve]
    if not curves:
        return []
    length = min(len(c) for c in curves)
    points = []
    for i in range(length):
        points.append(
            metrics.PrPoint(
                precision=float(np.mean([c[i].precision for c in curves])),
                recall=float(np.mean([c[i].recall for c in curves])),
                threshold=curves[0][i].threshold,
            )
        )
    return points


def _fmt(x: float) -> str:
    return "inf" if x == float("inf") else f"{x:.6f}"


def write_report_csv(outcome: EvaluationOutcome, path) -> None:
    lines = ["image,method,psnr,mse,fom,auc,precision,recall,detected,ideal,error"]
    for row in outcome.rows:
        r = row.report
        lines.append(
            ",".join(
                [
                    row.image,
                    row.method,
                    _fmt(r.psnr),
                    _fmt(r.mse),
                    _fmt(r.fom),
                    _fmt(r.auc),
                    _fmt(r.precision),
                    _fmt(r.recall),
                    str(r.detected_count),
                    str(r.ideal_count),
                    row.error or "",
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def write_summary_csv(outcome: EvaluationOutcome, path, baseline: str | None = None) -> None:
    diffs = None
    if baseline and baseline in outcome.summaries:
        diffs = metrics.summary_differences(outcome.summaries, baseline)
    header = "method,mean_psnr,mean_mse,mean_fom,mean_auc,mean_detected,images"
    if diffs:
        header += ",psnr_minus_baseline,fom_minus_baseline"
    lines = [header]
    for name, s in outcome.summaries.items():
        row = [
            name,
            _fmt(s.mean_psnr),
            _fmt(s.mean_mse),
            _fmt(s.mean_fom),
            _fmt(s.mean_auc),
            _fmt(s.mean_detected),
            str(s.image_count),
        ]
        if diffs:
            row += [_fmt(diffs[name]["psnr_minus_baseline"]), _fmt(diffs[name]["fom_minus_baseline"])]
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_curve_csv(points: list[metrics.PrPoint], path) -> None:
    lines = ["threshold,precision,recall"]
    for p in points:
        lines.append(f"{_fmt(p.threshold)},{_fmt(p.precision)},{_fmt(p.recall)}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_report_json(outcome: EvaluationOutcome, path) -> None:
    payload = {
        "rows": [
            {
                "image": row.image,
                "method": row.method,
                "psnr": row.report.psnr,
                "mse": row.report.mse,
                "fom": row.report.fom,
                "auc": row.report.auc,
                "precision": row.report.precision,
                "recall": row.report.recall,
                "detected": row.report.detected_count,
                "ideal": row.report.ideal_count,
                "error": row.error,
            }
            for row in outcome.rows
        ],
        "summaries": {
            name: {
                "mean_psnr": s.mean_psnr,
                "mean_mse": s.mean_mse,
                "mean_fom": s.mean_fom,
                "mean_auc": s.mean_auc,
                "mean_detected": s.mean_detected,
                "images": s.image_count,
            }
            for name, s in outcome.summaries.items()
        },
        "failures": outcome.failures,
    }
    Path(path).write_text(json.dumps(payload, indent=2, allow_nan=True) + "\n")
