"""fusedge: noise-robust color edge detection.

The detector denoises in a luminance-chrominance space with collaborative
block filtering, fuses the color vector gradient with anisotropic
directional-derivative responses at two scales into an edge strength map,
and refines it through non-maximum suppression, double-threshold hysteresis,
and morphological cleanup. A benchmark harness scores detectors with PR
curves, AUC, PSNR/MSE, and the figure of merit.
"""

from .baselines import BaselineMethod, BaselineParams, color_canny, color_sobel
from .cbm3d import BlockGroup, Cbm3dParams, cbm3d_denoise
from .colorspace import WhitePoint, rgb_to_xyz, xyz_to_lab, xyz_to_yuv, yuv_to_xyz
from .esm import DirectionalResponses, EdgeStrengthMap, agdd_response, color_gradient, fuse_esm
from .imaging import (
    ColorSpace,
    NoiseParams,
    PlanarImage,
    UnsupportedImageError,
    add_gaussian_noise,
    load_image,
    save_image,
)
from .kernels import (
    DirectionBank,
    KernelGrid,
    agdd_kernel,
    anisotropic_gaussian_kernel,
    convolve,
    direction_bank,
    gaussian_gradient_kernels,
    gaussian_kernel,
)
from .metrics import MetricReport, MethodSummary, PrPoint, aggregate_table, auc, fom, pr_curve, precision_recall, psnr_mse
from .pipeline import DatasetManifest, DetectionResult, PipelineConfig, PipelineError, detect_image, evaluate_manifest
from .refine import EdgeMap, ThresholdParams, hysteresis, morph_refine, nonmax_suppress

__version__ = "0.1.0"

__all__ = [
    "BaselineMethod",
    "BaselineParams",
    "BlockGroup",
    "Cbm3dParams",
    "ColorSpace",
    "DatasetManifest",
    "DetectionResult",
    "DirectionBank",
    "DirectionalResponses",
    "EdgeMap",
    "EdgeStrengthMap",
    "KernelGrid",
    "MetricReport",
    "MethodSummary",
    "NoiseParams",
    "PipelineConfig",
    "PipelineError",
    "PlanarImage",
    "PrPoint",
    "ThresholdParams",
    "UnsupportedImageError",
    "WhitePoint",
    "add_gaussian_noise",
    "agdd_kernel",
    "agdd_response",
    "aggregate_table",
    "anisotropic_gaussian_kernel",
    "auc",
    "cbm3d_denoise",
    "color_canny",
    "color_gradient",
    "color_sobel",
    "convolve",
    "detect_image",
    "direction_bank",
    "evaluate_manifest",
    "fom",
    "fuse_esm",
    "gaussian_gradient_kernels",
    "gaussian_kernel",
    "hysteresis",
    "load_image",
    "morph_refine",
    "nonmax_suppress",
    "pr_curve",
    "precision_recall",
    "psnr_mse",
    "rgb_to_xyz",
    "save_image",
    "xyz_to_lab",
    "xyz_to_yuv",
    "yuv_to_xyz",
]
