"""Raster containers, 8-bit PNG/PPM/PGM I/O, and seeded Gaussian noise.

Everything downstream of this module works on float64 planes in [0, 1];
quantization to 8 bits happens only when a file is written.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError


class ColorSpace(Enum):
    RGB = "rgb"
    XYZ = "xyz"
    LAB = "lab"
    YUV = "yuv"
    SCALAR = "scalar"


# Chrominance planes of the luminance-chrominance space are signed, so that
# space is exempt from the [0, 1] clamp applied everywhere else.
_CLAMPED_SPACES = frozenset(
    {ColorSpace.RGB, ColorSpace.XYZ, ColorSpace.LAB, ColorSpace.SCALAR}
)

# PIL modes that decode to more than 8 bits per sample.
_DEEP_MODES = frozenset({"I", "I;16", "I;16B", "I;16L", "I;16N", "F"})


class UnsupportedImageError(ValueError):
    """Raised for files this library refuses to read or write."""


@dataclass(frozen=True)
class PlanarImage:
    """An H x W x C stack of float64 planes plus a color-space tag.

    The array is validated, clamped where the space calls for it, and made
    read-only on construction, so instances are safe to share across threads.
    """

    data: np.ndarray
    space: ColorSpace

    def __post_init__(self) -> None:
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[:, :, np.newaxis]
        if arr.ndim != 3:
            raise ValueError(f"expected HxWxC data, got shape {arr.shape}")
        if arr.shape[2] not in (1, 3):
            raise ValueError(f"expected 1 or 3 channels, got {arr.shape[2]}")
        if not np.isfinite(arr).all():
            raise ValueError("image contains non-finite samples")
        expected = 1 if self.space is ColorSpace.SCALAR else 3
        if arr.shape[2] != expected:
            raise ValueError(
                f"space {self.space.value} requires {expected} channel(s), "
                f"got {arr.shape[2]}"
            )
        if self.space in _CLAMPED_SPACES:
            arr = np.clip(arr, 0.0, 1.0)
        else:
            arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    def plane(self, index: int) -> np.ndarray:
        """Read-only view of one channel as an H x W array."""
        return self.data[:, :, index]

    @classmethod
    def from_planes(cls, planes, space: ColorSpace) -> "PlanarImage":
        return cls(np.stack([np.asarray(p, dtype=np.float64) for p in planes], axis=-1), space)


@dataclass(frozen=True)
class NoiseParams:
    """Zero-mean Gaussian noise: variance on the [0, 1] intensity scale plus
    a seed that fully determines the realization."""

    variance: float
    seed: int = 0

    def __post_init__(self) -> None:
        if self.variance < 0:
            raise ValueError("noise variance must be >= 0")


def add_gaussian_noise(img: PlanarImage, params: NoiseParams) -> PlanarImage:
    """Add i.i.d. zero-mean Gaussian noise per sample and clamp to [0, 1].

    The same (image, params) pair always yields the bit-identical result.
    """
    if params.variance == 0.0:
        return img
    rng = np.random.default_rng(params.seed)
    noise = rng.normal(0.0, np.sqrt(params.variance), size=img.data.shape)
    return PlanarImage(img.data + noise, img.space)


def load_image(path) -> PlanarImage:
    """Read an 8-bit PNG or binary PPM/PGM into [0, 1] float planes.

    Samples deeper than 8 bits are rejected outright rather than truncated.
    """
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic == b"\x89P":
        return _load_png(path)
    if magic in (b"P5", b"P6"):
        return _load_pnm(path)
    raise UnsupportedImageError(f"{path}: not a PNG or binary PPM/PGM file")


def save_image(img: PlanarImage, path) -> None:
    """Write an RGB or SCALAR image as 8-bit PNG or binary PPM/PGM.

    Quantization is round(x * 255); a save/load round trip is therefore
    within 1/510 per sample. Other color spaces must be converted first.
    """
    if img.space not in (ColorSpace.RGB, ColorSpace.SCALAR):
        raise ValueError(f"cannot save {img.space.value}-tagged image; convert to RGB or SCALAR first")
    path = Path(path)
    raw = quantize_u8(img.data)
    if path.suffix.lower() in (".ppm", ".pgm", ".pnm"):
        _save_pnm(raw, path)
    else:
        _save_png(raw, path)


def quantize_u8(data: np.ndarray) -> np.ndarray:
    """Map [0, 1] floats to uint8 via round(x * 255)."""
    return np.rint(np.clip(data, 0.0, 1.0) * 255.0).astype(np.uint8)


def _load_png(path: Path) -> PlanarImage:
    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode in _DEEP_MODES:
                raise UnsupportedImageError(f"{path}: >8 bits per sample is not supported")
            if mode == "1":
                im = im.convert("L")
            elif mode in ("P", "RGBA"):
                im = im.convert("RGB")
            elif mode == "LA":
                im = im.convert("L")
            elif mode not in ("L", "RGB"):
                raise UnsupportedImageError(f"{path}: unsupported PNG mode {mode!r}")
            arr = np.asarray(im, dtype=np.uint8)
    except UnidentifiedImageError as exc:
        raise UnsupportedImageError(f"{path}: unreadable image file") from exc
    space = ColorSpace.SCALAR if arr.ndim == 2 else ColorSpace.RGB
    return PlanarImage(arr.astype(np.float64) / 255.0, space)


def _pnm_header_tokens(blob: bytes, count: int) -> tuple[list[int], int]:
    """Parse `count` ASCII integers after the magic, honoring '#' comments.

    Returns the values and the offset of the first raster byte.
    """
    tokens: list[int] = []
    i = 2  # past the magic
    while len(tokens) < count:
        if i >= len(blob):
            raise UnsupportedImageError("truncated PNM header")
        c = blob[i : i + 1]
        if c == b"#":
            i = blob.find(b"\n", i)
            if i < 0:
                raise UnsupportedImageError("truncated PNM comment")
            i += 1
        elif c.isspace():
            i += 1
        else:
            j = i
            while j < len(blob) and not blob[j : j + 1].isspace():
                j += 1
            try:
                tokens.append(int(blob[i:j]))
            except ValueError as exc:
                raise UnsupportedImageError("malformed PNM header") from exc
            i = j
    # exactly one whitespace byte separates the header from the raster
    return tokens, i + 1


def _load_pnm(path: Path) -> PlanarImage:
    blob = path.read_bytes()
    magic = blob[:2]
    (width, height, maxval), offset = _pnm_header_tokens(blob, 3)
    if maxval > 255:
        raise UnsupportedImageError(f"{path}: PNM maxval {maxval} exceeds 8 bits per sample")
    if maxval < 1:
        raise UnsupportedImageError(f"{path}: invalid PNM maxval {maxval}")
    channels = 3 if magic == b"P6" else 1
    need = width * height * channels
    raster = np.frombuffer(blob, dtype=np.uint8, count=need, offset=offset)
    if raster.size < need:
        raise UnsupportedImageError(f"{path}: truncated PNM raster")
    arr = raster.reshape(height, width, channels).astype(np.float64) / float(maxval)
    space = ColorSpace.RGB if channels == 3 else ColorSpace.SCALAR
    return PlanarImage(arr, space)


def _save_png(raw: np.ndarray, path: Path) -> None:
    if raw.shape[2] == 1:
        im = Image.fromarray(raw[:, :, 0], mode="L")
    else:
        im = Image.fromarray(raw, mode="RGB")
    im.save(path, format="PNG")


def _save_pnm(raw: np.ndarray, path: Path) -> None:
    h, w, c = raw.shape
    magic = b"P6" if c == 3 else b"P5"
    header = magic + b"\n%d %d\n255\n" % (w, h)
    body = raw.tobytes() if c == 3 else raw[:, :, 0].tobytes()
    path.write_bytes(header + body)
