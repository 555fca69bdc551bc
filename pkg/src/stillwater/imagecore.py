"""Raster containers, color conversion, resampling, and file I/O.

Pixels are stored as float32 RGB in [0, 1]; 8-bit quantization only happens
at the PNG boundary.  Buffers are immutable (the backing numpy arrays are
marked read-only) so they can be shared freely across worker threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError


class ImageIOError(ValueError):
    """Raised for missing, unreadable, or degenerate raster files."""


class NoWaterRegionError(ValueError):
    """Raised when a mask has no pixel above the water threshold."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ImageBuffer:
    """An RGB raster with float channels in [0, 1], shape (h, w, 3)."""

    data: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.data, dtype=np.float32)
        if d.ndim != 3 or d.shape[2] != 3:
            raise ValueError(f"expected (h, w, 3) array, got {d.shape}")
        if d.shape[0] == 0 or d.shape[1] == 0:
            raise ValueError("zero-dimension image")
        d = np.clip(d, 0.0, 1.0)
        object.__setattr__(self, "data", _frozen(d))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class WaterMask:
    """Per-pixel water probability in [0, 1], shape (h, w)."""

    prob: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.prob, dtype=np.float32)
        if p.ndim != 2:
            raise ValueError(f"expected (h, w) array, got {p.shape}")
        if p.shape[0] == 0 or p.shape[1] == 0:
            raise ValueError("zero-dimension mask")
        p = np.clip(p, 0.0, 1.0)
        object.__setattr__(self, "prob", _frozen(p))

    @property
    def width(self) -> int:
        return self.prob.shape[1]

    @property
    def height(self) -> int:
        return self.prob.shape[0]


# ---------------------------------------------------------------------------
# File I/O (PNG, 8 bit per channel)
# ---------------------------------------------------------------------------

def load_image(path) -> ImageBuffer:
    """Load an 8-bit RGB PNG and map channels linearly to [0, 1]."""
    try:
        with Image.open(path) as im:
            rgb = im.convert("RGB")
            arr = np.asarray(rgb, dtype=np.float32)
    except FileNotFoundError:
        raise ImageIOError(f"image file not found: {path}") from None
    except UnidentifiedImageError:
        raise ImageIOError(f"unsupported raster format: {path}") from None
    if arr.size == 0:
        raise ImageIOError(f"zero-dimension image: {path}")
    return ImageBuffer(arr / 255.0)


def save_image(img: ImageBuffer, path) -> None:
    """Write an ImageBuffer as an 8-bit RGB PNG (round(v*255) per channel)."""
    u8 = np.rint(img.data * 255.0).astype(np.uint8)
    Image.fromarray(u8, mode="RGB").save(path, format="PNG")


def load_mask(path) -> WaterMask:
    """Load an 8-bit grayscale PNG as water probability (255 = water)."""
    try:
        with Image.open(path) as im:
            arr = np.asarray(im.convert("L"), dtype=np.float32)
    except FileNotFoundError:
        raise ImageIOError(f"mask file not found: {path}") from None
    except UnidentifiedImageError:
        raise ImageIOError(f"unsupported raster format: {path}") from None
    if arr.size == 0:
        raise ImageIOError(f"zero-dimension mask: {path}")
    return WaterMask(arr / 255.0)


def save_mask(mask: WaterMask, path) -> None:
    u8 = np.rint(mask.prob * 255.0).astype(np.uint8)
    Image.fromarray(u8, mode="L").save(path, format="PNG")


# ---------------------------------------------------------------------------
# Resampling
# ---------------------------------------------------------------------------

def _bilinear(data: np.ndarray, w: int, h: int) -> np.ndarray:
    """Bilinear resample of (H, W[, C]) data using the pixel-center
    convention with clamp-to-edge, written as nested lerps so that constant
    inputs are preserved exactly."""
    src_h, src_w = data.shape[:2]
    sx = src_w / w
    sy = src_h / h
    # Destination pixel centers mapped into source coordinates.
    xs = (np.arange(w, dtype=np.float64) + 0.5) * sx - 0.5
    ys = (np.arange(h, dtype=np.float64) + 0.5) * sy - 0.5
    x0 = np.clip(np.floor(xs), 0, src_w - 1).astype(np.intp)
    y0 = np.clip(np.floor(ys), 0, src_h - 1).astype(np.intp)
    x1 = np.minimum(x0 + 1, src_w - 1)
    y1 = np.minimum(y0 + 1, src_h - 1)
    tx = np.clip(xs - x0, 0.0, 1.0).astype(np.float32)
    ty = np.clip(ys - y0, 0.0, 1.0).astype(np.float32)

    if data.ndim == 3:
        tx = tx[None, :, None]
        ty = ty[:, None, None]
    else:
        tx = tx[None, :]
        ty = ty[:, None]
    rows0, rows1 = data[y0], data[y1]
    a00, a01 = rows0[:, x0], rows0[:, x1]
    a10, a11 = rows1[:, x0], rows1[:, x1]
    top = a00 + tx * (a01 - a00)
    bot = a10 + tx * (a11 - a10)
    return top + ty * (bot - top)


def resize_bilinear(img: ImageBuffer, w: int, h: int) -> ImageBuffer:
    """Resize with bilinear interpolation and clamp-to-edge sampling."""
    if w < 1 or h < 1:
        raise ValueError(f"target size must be >= 1, got {w}x{h}")
    if w == img.width and h == img.height:
        return ImageBuffer(img.data.copy())
    return ImageBuffer(_bilinear(img.data, w, h))


def resize_mask_bilinear(mask: WaterMask, w: int, h: int) -> WaterMask:
    if w < 1 or h < 1:
        raise ValueError(f"target size must be >= 1, got {w}x{h}")
    if w == mask.width and h == mask.height:
        return WaterMask(mask.prob.copy())
    return WaterMask(_bilinear(mask.prob, w, h))


# ---------------------------------------------------------------------------
# Color space
# ---------------------------------------------------------------------------

def rgb_to_hsv(rgb) -> tuple[float, float, float]:
    """Hexcone HSV of one RGB triple; hue in degrees [0, 360), achromatic
    pixels get hue 0."""
    r, g, b = (float(c) for c in rgb)
    mx = max(r, g, b)
    mn = min(r, g, b)
    delta = mx - mn
    v = mx
    s = 0.0 if mx == 0.0 else delta / mx
    if delta == 0.0:
        h = 0.0
    elif mx == r:
        h = 60.0 * (((g - b) / delta) % 6.0)
    elif mx == g:
        h = 60.0 * ((b - r) / delta + 2.0)
    else:
        h = 60.0 * ((r - g) / delta + 4.0)
    if h >= 360.0:
        h -= 360.0
    return h, s, v


def hsv_to_rgb(h: float, s: float, v: float) -> tuple[float, float, float]:
    """Inverse hexcone conversion."""
    h = h % 360.0
    c = v * s
    x = c * (1.0 - abs((h / 60.0) % 2.0 - 1.0))
    m = v - c
    sector = int(h // 60.0) % 6
    r, g, b = [(c, x, 0), (x, c, 0), (0, c, x), (0, x, c), (x, 0, c), (c, 0, x)][sector]
    return r + m, g + m, b + m


def rgb_to_hsv_image(img: ImageBuffer) -> np.ndarray:
    """Vectorized HSV of a whole buffer; returns (h, w, 3) float64 with
    hue in degrees."""
    rgb = img.data.astype(np.float64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    mx = rgb.max(axis=2)
    mn = rgb.min(axis=2)
    delta = mx - mn
    v = mx
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(mx > 0, delta / np.where(mx > 0, mx, 1.0), 0.0)
        safe = np.where(delta > 0, delta, 1.0)
        h_r = ((g - b) / safe) % 6.0
        h_g = (b - r) / safe + 2.0
        h_b = (r - g) / safe + 4.0
    h = np.where(mx == r, h_r, np.where(mx == g, h_g, h_b)) * 60.0
    h = np.where(delta > 0, h, 0.0)
    h = np.where(h >= 360.0, h - 360.0, h)
    return np.stack([h, s, v], axis=2)


# ---------------------------------------------------------------------------
# Mask geometry
# ---------------------------------------------------------------------------

def water_bbox(mask: WaterMask, threshold: float = 0.5) -> tuple[int, int, int, int]:
    """Tightest (x0, y0, x1, y1) rectangle (exclusive high edge) containing
    all pixels with prob >= threshold."""
    ys, xs = np.nonzero(mask.prob >= threshold)
    if len(xs) == 0:
        raise NoWaterRegionError(f"no water region at threshold {threshold}")
    return int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1


def crop(img: ImageBuffer, box: tuple[int, int, int, int]) -> ImageBuffer:
    x0, y0, x1, y1 = box
    return ImageBuffer(img.data[y0:y1, x0:x1].copy())


def crop_mask(mask: WaterMask, box: tuple[int, int, int, int]) -> WaterMask:
    x0, y0, x1, y1 = box
    return WaterMask(mask.prob[y0:y1, x0:x1].copy())


def luminance(img: ImageBuffer) -> np.ndarray:
    """Rec. 601 luma, float64 (h, w)."""
    rgb = img.data.astype(np.float64)
    return 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]
