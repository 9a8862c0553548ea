"""Command-line interface.

Subcommands: detect, denoise, evaluate, noise, curve. Numeric options may
also come from a key=value config file (--config); explicit flags win over
the file, the file wins over built-in defaults. Exit codes: 0 success,
1 input/configuration error, 2 pipeline failure, 3 evaluation finished with
per-entry failures.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import cbm3d, colorspace, metrics, pipeline, refine
from .imaging import NoiseParams, UnsupportedImageError, add_gaussian_noise, load_image, save_image

log = logging.getLogger(__name__)

_CONFIG_KEYS = {
    "sigma1": float,
    "sigma2": float,
    "rho": float,
    "directions": int,
    "noise_var": float,
    "seed": int,
    "high_quantile": float,
    "low_ratio": float,
    "min_component": int,
    "high_abs": float,
    "low_abs": float,
    "method": str,
    "step": float,
    "tolerance": int,
    "cbm3d_sigma": float,
    "block_size": int,
    "block_step": int,
    "search_radius": int,
    "max_group": int,
    "match_threshold": float,
    "hard_lambda": float,
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="key=value config file")
    parser.add_argument("--sigma1", type=float, help="fine derivative scale (default 1.0)")
    parser.add_argument("--sigma2", type=float, help="coarse derivative scale (default 2.0)")
    parser.add_argument("--rho", type=float, help="kernel anisotropy (default 2.0)")
    parser.add_argument("--directions", type=int, help="steering directions (default 8)")
    parser.add_argument("--noise-var", type=float, help="inject Gaussian noise of this variance")
    parser.add_argument("--seed", type=int, help="noise seed (default 0)")
    parser.add_argument("--high-quantile", type=float, help="high threshold quantile (default 0.9)")
    parser.add_argument("--low-ratio", type=float, help="low/high threshold ratio (default 0.4)")
    parser.add_argument("--min-component", type=int, help="smallest surviving component (default 8)")
    parser.add_argument("--high-abs", type=float, help="absolute high threshold (overrides quantile)")
    parser.add_argument("--low-abs", type=float, help="absolute low threshold")
    parser.add_argument("--cbm3d-sigma", type=float, help="denoiser noise std (defaults to sqrt(noise-var))")
    parser.add_argument("--block-size", type=int, help="denoiser block size (default 8)")
    parser.add_argument("--block-step", type=int, help="denoiser reference step (default 3)")
    parser.add_argument("--search-radius", type=int, help="denoiser search radius (default 19)")
    parser.add_argument("--max-group", type=int, help="denoiser max group size (default 16)")
    parser.add_argument("--match-threshold", type=float, help="denoiser match threshold")
    parser.add_argument("--hard-lambda", type=float, help="denoiser threshold multiplier (default 2.7)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fusedge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="detect edges in one image")
    p.add_argument("image", type=Path)
    p.add_argument("--out", type=Path, required=True, help="output edge map PNG")
    p.add_argument("--method", choices=pipeline.METHODS, help="detector (default proposed)")
    p.add_argument("--dump", type=Path, help="directory for intermediate dumps")
    _add_common(p)

    p = sub.add_parser("denoise", help="collaborative-filter an image")
    p.add_argument("image", type=Path)
    p.add_argument("--out", type=Path, required=True)
    _add_common(p)

    p = sub.add_parser("noise", help="add seeded Gaussian noise to an image")
    p.add_argument("image", type=Path)
    p.add_argument("--out", type=Path, required=True)
    _add_common(p)

    p = sub.add_parser("curve", help="write the PR curve of one detection")
    p.add_argument("image", type=Path)
    p.add_argument("--gt", type=Path, required=True, help="ground-truth edge map")
    p.add_argument("--out", type=Path, required=True, help="output CSV")
    p.add_argument("--method", choices=pipeline.METHODS)
    p.add_argument("--step", type=float, help="threshold increment (default 0.001)")
    p.add_argument("--tolerance", type=int, help="match tolerance in pixels (default 1)")
    _add_common(p)

    p = sub.add_parser("evaluate", help="score methods over a dataset manifest")
    p.add_argument("--manifest", type=Path, required=True)
    p.add_argument("--out-dir", type=Path, required=True)
    p.add_argument("--methods", default=",".join(pipeline.METHODS),
                   help="comma-separated method list")
    p.add_argument("--baseline", default="color-sobel", help="summary difference baseline")
    p.add_argument("--step", type=float, help="threshold increment (default 0.001)")
    p.add_argument("--tolerance", type=int, help="match tolerance in pixels (default 1)")
    _add_common(p)
    return parser


def read_config_file(path: Path) -> dict:
    """Parse 'key = value' lines; '#' starts a comment."""
    values = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _CONFIG_KEYS[key](val.strip())
    return values


def _merged_options(args: argparse.Namespace) -> dict:
    """Defaults, then config file, then explicit CLI flags."""
    merged: dict = {}
    config_path = getattr(args, "config", None)
    if config_path is not None:
        merged.update(read_config_file(config_path))
    for key in _CONFIG_KEYS:
        cli_value = getattr(args, key, None)
        if cli_value is not None:
            merged[key] = cli_value
    return merged


def make_config(opts: dict, method: str | None = None) -> pipeline.PipelineConfig:
    noise = None
    if opts.get("noise_var") is not None:
        noise = NoiseParams(variance=opts["noise_var"], seed=opts.get("seed", 0))
    denoiser = cbm3d.Cbm3dParams(
        block_size=opts.get("block_size", 8),
        step=opts.get("block_step", 3),
        search_radius=opts.get("search_radius", 19),
        max_group=opts.get("max_group", 16),
        match_threshold=opts.get("match_threshold", 3000.0 / 255.0**2),
        hard_lambda=opts.get("hard_lambda", 2.7),
        sigma=opts.get("cbm3d_sigma"),
    )
    thresholds = refine.ThresholdParams(
        high_quantile=opts.get("high_quantile", 0.90),
        low_ratio=opts.get("low_ratio", 0.4),
        min_component=opts.get("min_component", 8),
        high_abs=opts.get("high_abs"),
        low_abs=opts.get("low_abs"),
    )
    return pipeline.PipelineConfig(
        noise=noise,
        cbm3d=denoiser,
        sigma1=opts.get("sigma1", 1.0),
        sigma2=opts.get("sigma2", 2.0),
        rho=opts.get("rho", 2.0),
        directions=opts.get("directions", 8),
        thresholds=thresholds,
        method=method or opts.get("method", "proposed"),
    )


def _cmd_detect(args) -> int:
    opts = _merged_options(args)
    config = make_config(opts, method=getattr(args, "method", None))
    pipeline.detect_file(args.image, args.out, config, dump_dir=args.dump)
    return 0


def _cmd_denoise(args) -> int:
    opts = _merged_options(args)
    config = make_config(opts)
    img = load_image(args.image)
    xyz = colorspace.rgb_to_xyz(img) if img.channels == 3 else None
    if xyz is None:
        raise ValueError("denoise expects a color image")
    denoised = cbm3d.cbm3d_denoise(xyz, config.resolved_denoiser())
    save_image(colorspace.xyz_to_rgb(denoised), args.out)
    return 0


def _cmd_noise(args) -> int:
    opts = _merged_options(args)
    if opts.get("noise_var") is None:
        raise ValueError("noise requires --noise-var")
    img = load_image(args.image)
    out = add_gaussian_noise(img, NoiseParams(variance=opts["noise_var"], seed=opts.get("seed", 0)))
    save_image(out, args.out)
    return 0


def _cmd_curve(args) -> int:
    opts = _merged_options(args)
    config = make_config(opts, method=getattr(args, "method", None))
    img = load_image(args.image)
    gt = pipeline.load_ground_truth(args.gt)
    result = pipeline.detect_image(img, config)
    points = metrics.pr_curve(
        result.response, gt, step=opts.get("step", 0.001), tolerance=opts.get("tolerance", 1)
    )
    pipeline.write_curve_csv(points, args.out)
    return 0


def _cmd_evaluate(args) -> int:
    opts = _merged_options(args)
    config = make_config(opts)
    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    for m in methods:
        if m not in pipeline.METHODS:
            raise ValueError(f"unknown method {m!r}")
    manifest = pipeline.DatasetManifest.from_file(args.manifest)
    outcome = pipeline.evaluate_manifest(
        manifest, config, methods=methods,
        step=opts.get("step", 0.001), tolerance=opts.get("tolerance", 1),
    )
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    pipeline.write_report_csv(outcome, out_dir / "report.csv")
    pipeline.write_report_json(outcome, out_dir / "report.json")
    pipeline.write_summary_csv(outcome, out_dir / "summary.csv", baseline=args.baseline)
    for method, points in outcome.curves.items():
        pipeline.write_curve_csv(points, out_dir / f"curve_{method}.csv")
    if outcome.failures:
        print(f"evaluation finished with {outcome.failures} failed entries", file=sys.stderr)
        return 3
    return 0


_COMMANDS = {
    "detect": _cmd_detect,
    "denoise": _cmd_denoise,
    "noise": _cmd_noise,
    "curve": _cmd_curve,
    "evaluate": _cmd_evaluate,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except pipeline.PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, UnsupportedImageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
