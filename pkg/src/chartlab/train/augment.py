"""Seeded image augmentation: small rotations, scaling, shifts and noise.

Each transform is applied independently with probability `apply_prob`;
draw order is fixed (rotate, scale, translate, gaussian, salt-and-pepper)
so a given stream always produces the same augmentation. Geometric
transforms resample bilinearly about the image center with zero fill;
output pixels are clamped to [0, 1].

Rotation convention: the output pixel at (row, col) samples the input at
the point obtained by rotating (col - cx, row - cy) by +angle degrees in
(x=col, y=row) coordinates, i.e.

    src_col = cx + cos(a) * (col - cx) - sin(a) * (row - cy)
    src_row = cy + sin(a) * (col - cx) + cos(a) * (row - cy)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..chartgen.render import RenderedChart
from ..numcore import PrngStream


@dataclass(frozen=True)
class AugmentConfig:
    rotation_deg_max: float = 5.0
    scale_min: float = 0.9
    scale_max: float = 1.1
    translate_px_max: int = 4
    gaussian_sigma: float = 0.05
    salt_pepper_p: float = 0.01
    apply_prob: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.apply_prob <= 1.0:
            raise ValueError("apply_prob must lie in [0, 1]")
        if not 0.0 <= self.salt_pepper_p <= 1.0:
            raise ValueError("salt_pepper_p must lie in [0, 1]")

    @classmethod
    def identity(cls) -> "AugmentConfig":
        return cls(apply_prob=0.0)


@dataclass(frozen=True)
class AugmentParams:
    angle_deg: float | None
    scale_factor: float | None
    shift: tuple[int, int] | None  # (dx right, dy down)
    gaussian: bool
    salt_pepper: bool


def sample_augment_params(rng: PrngStream, config: AugmentConfig) -> AugmentParams:
    """Transform coins and magnitudes, drawn in a fixed order."""
    angle = None
    if rng.uniform() < config.apply_prob:
        angle = rng.uniform_range(-config.rotation_deg_max, config.rotation_deg_max)
    factor = None
    if rng.uniform() < config.apply_prob:
        factor = rng.uniform_range(config.scale_min, config.scale_max)
    shift = None
    if rng.uniform() < config.apply_prob:
        m = config.translate_px_max
        shift = (rng.randint(-m, m), rng.randint(-m, m))
    gaussian = rng.uniform() < config.apply_prob
    salt_pepper = rng.uniform() < config.apply_prob
    return AugmentParams(angle, factor, shift, gaussian, salt_pepper)


def _bilinear_sample(pixels: np.ndarray, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Sample at float coordinates; anything outside the grid reads as 0."""
    h, w = pixels.shape
    r0 = np.floor(rows).astype(np.int64)
    c0 = np.floor(cols).astype(np.int64)
    fr = rows - r0
    fc = cols - c0
    out = np.zeros(rows.shape, dtype=np.float64)
    for dr, dc, weight in ((0, 0, (1 - fr) * (1 - fc)), (0, 1, (1 - fr) * fc),
                           (1, 0, fr * (1 - fc)), (1, 1, fr * fc)):
        rr = r0 + dr
        cc = c0 + dc
        valid = (rr >= 0) & (rr < h) & (cc >= 0) & (cc < w)
        vals = np.zeros_like(out)
        vals[valid] = pixels[rr[valid], cc[valid]]
        out += weight * vals
    return out


def rotate_bilinear(pixels: np.ndarray, angle_deg: float) -> np.ndarray:
    h, w = pixels.shape
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    a = math.radians(angle_deg)
    rr, cc = np.meshgrid(np.arange(h, dtype=np.float64),
                         np.arange(w, dtype=np.float64), indexing="ij")
    x = cc - cx
    y = rr - cy
    src_c = cx + math.cos(a) * x - math.sin(a) * y
    src_r = cy + math.sin(a) * x + math.cos(a) * y
    return _bilinear_sample(pixels, src_r, src_c)


def scale_bilinear(pixels: np.ndarray, factor: float) -> np.ndarray:
    h, w = pixels.shape
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    rr, cc = np.meshgrid(np.arange(h, dtype=np.float64),
                         np.arange(w, dtype=np.float64), indexing="ij")
    src_r = cy + (rr - cy) / factor
    src_c = cx + (cc - cx) / factor
    return _bilinear_sample(pixels, src_r, src_c)


def translate(pixels: np.ndarray, dx: int, dy: int) -> np.ndarray:
    out = np.zeros_like(pixels)
    h, w = pixels.shape
    src = pixels[max(0, -dy):h - max(0, dy), max(0, -dx):w - max(0, dx)]
    out[max(0, dy):max(0, dy) + src.shape[0], max(0, dx):max(0, dx) + src.shape[1]] = src
    return out


def apply_augment_params(pixels: np.ndarray, params: AugmentParams,
                         rng: PrngStream, config: AugmentConfig) -> np.ndarray:
    out = pixels
    if params.angle_deg is not None:
        out = rotate_bilinear(out, params.angle_deg)
    if params.scale_factor is not None:
        out = scale_bilinear(out, params.scale_factor)
    if params.shift is not None:
        out = translate(out, *params.shift)
    if params.gaussian:
        noise = rng.normal_array(out.size).reshape(out.shape)
        out = out + config.gaussian_sigma * noise
    if params.salt_pepper:
        u = rng.uniform_array(out.size).reshape(out.shape)
        out = out.copy()
        out[u < config.salt_pepper_p / 2.0] = 0.0
        out[u >= 1.0 - config.salt_pepper_p / 2.0] = 1.0
    if out is pixels:
        return pixels.copy()
    return np.clip(out, 0.0, 1.0)


def augment(image: RenderedChart, rng: PrngStream, config: AugmentConfig) -> RenderedChart:
    """Augmented copy of the image; bit-identical to the input when every
    transform stays off."""
    params = sample_augment_params(rng, config)
    pixels = apply_augment_params(image.pixels, params, rng, config)
    return replace(image, pixels=pixels)
