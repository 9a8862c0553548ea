#!/usr/bin/env python3
"""Detect edges in one image and dump every intermediate stage.

Usage:
    python scripts/demo_detect.py input.png outdir [--noise-var 0.01] [--seed 0]

Writes edges.png plus denoised/esm/nms dumps into outdir. Without an input
argument a synthetic demo image is generated first.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from fusedge.imaging import NoiseParams, save_image
from fusedge.pipeline import PipelineConfig, detect_file
from fusedge.synthetic import build_suite


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("image", nargs="?", type=Path)
    parser.add_argument("outdir", nargs="?", default=Path("demo_out"), type=Path)
    parser.add_argument("--noise-var", type=float)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    args.outdir.mkdir(parents=True, exist_ok=True)
    image = args.image
    if image is None:
        case = build_suite(96)[2]
        image = args.outdir / "demo_input.png"
        save_image(case.image, image)
        print(f"generated {image}")

    noise = None
    if args.noise_var:
        noise = NoiseParams(variance=args.noise_var, seed=args.seed)
    config = PipelineConfig(noise=noise)
    detect_file(image, args.outdir / "edges.png", config, dump_dir=args.outdir)
    print(f"edge map and intermediates written to {args.outdir}")


if __name__ == "__main__":
    main()
