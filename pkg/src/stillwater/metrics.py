"""Image similarity energy for parameter estimation.

Combined energy = texture_distance + lambda * color_distance, evaluated on
the water bounding box of the photo resized to 256x256 against a candidate
render at the same resolution.  The texture metric is a windowed
luminance/structure surrogate behind a registry so a learned perceptual
scorer can be dropped in.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import cv2
import numpy as np

from stillwater.imagecore import (
    ImageBuffer,
    WaterMask,
    crop,
    crop_mask,
    resize_bilinear,
    resize_mask_bilinear,
    rgb_to_hsv_image,
    water_bbox,
)

HUE_BINS = 24
SAT_BINS = 8
VAL_BINS = 8
TOTAL_BINS = HUE_BINS * SAT_BINS * VAL_BINS  # 1536

EVAL_SIZE = 256

# Windowed-metric constants: 11x11 Gaussian windows (sigma 1.5), four
# low-pass pyramid levels, SSIM-style stabilizers.
_WINDOW = 11
_SIGMA = 1.5
_LEVELS = 4
_C1 = 1e-4
_C2 = 9e-4


@dataclass(frozen=True)
class HsvHistogram:
    """Pixel counts over 24 x 8 x 8 hue/saturation/value partitions."""

    bins: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bins, dtype=np.float64)
        if b.shape != (HUE_BINS, SAT_BINS, VAL_BINS):
            raise ValueError(f"expected {(HUE_BINS, SAT_BINS, VAL_BINS)} bins, got {b.shape}")
        object.__setattr__(self, "bins", b)

    @property
    def total(self) -> float:
        return float(self.bins.sum())


def hsv_histogram(img: ImageBuffer, mask: WaterMask | None = None) -> HsvHistogram:
    """Classify pixels (optionally only where mask >= 0.5) into the
    24x8x8 HSV partitions; upper edges fold into the top bin."""
    hsv = rgb_to_hsv_image(img)
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    if mask is not None:
        keep = mask.prob >= 0.5
        h, s, v = h[keep], s[keep], v[keep]
    hi = np.minimum((h / (360.0 / HUE_BINS)).astype(np.intp), HUE_BINS - 1)
    si = np.minimum((s * SAT_BINS).astype(np.intp), SAT_BINS - 1)
    vi = np.minimum((v * VAL_BINS).astype(np.intp), VAL_BINS - 1)
    flat = (hi * SAT_BINS + si) * VAL_BINS + vi
    counts = np.bincount(flat.ravel(), minlength=TOTAL_BINS).astype(np.float64)
    return HsvHistogram(counts.reshape(HUE_BINS, SAT_BINS, VAL_BINS))


def hellinger(x: HsvHistogram, y: HsvHistogram) -> float:
    """Hellinger distance between two count histograms, in [0, 1]:
    sqrt(1 - sum(sqrt(x_i y_i)) / sqrt(sum x * sum y))."""
    xs, ys = x.total, y.total
    if xs <= 0 or ys <= 0:
        raise ValueError("zero-total histogram")
    overlap = np.sqrt(x.bins * y.bins).sum() / np.sqrt(xs * ys)
    return float(np.sqrt(np.clip(1.0 - overlap, 0.0, 1.0)))


# ---------------------------------------------------------------------------
# Texture / structure distance
# ---------------------------------------------------------------------------

def _window_stats(a: np.ndarray, b: np.ndarray):
    mu_a = cv2.GaussianBlur(a, (_WINDOW, _WINDOW), _SIGMA)
    mu_b = cv2.GaussianBlur(b, (_WINDOW, _WINDOW), _SIGMA)
    var_a = cv2.GaussianBlur(a * a, (_WINDOW, _WINDOW), _SIGMA) - mu_a * mu_a
    var_b = cv2.GaussianBlur(b * b, (_WINDOW, _WINDOW), _SIGMA) - mu_b * mu_b
    cov = cv2.GaussianBlur(a * b, (_WINDOW, _WINDOW), _SIGMA) - mu_a * mu_b
    return mu_a, mu_b, var_a, var_b, cov


def surrogate_texture_distance(x: ImageBuffer, y: ImageBuffer) -> float:
    """Structure/texture dissimilarity in [0, 1]; 0 for identical inputs.

    Over a 4-level low-pass pyramid, per channel and 11x11 Gaussian window:
    a luminance term (2 mx my + c1)/(mx^2 + my^2 + c1) and a structure term
    (2 cov + c2)/(vx + vy + c2); the distance is one minus their mean.
    """
    if (x.width, x.height) != (y.width, y.height):
        raise ValueError(
            f"dimension mismatch: {x.width}x{x.height} vs {y.width}x{y.height}"
        )
    a = x.data.astype(np.float64)
    b = y.data.astype(np.float64)
    scores = []
    for _ in range(_LEVELS):
        mu_a, mu_b, var_a, var_b, cov = _window_stats(a, b)
        lum = (2.0 * mu_a * mu_b + _C1) / (mu_a * mu_a + mu_b * mu_b + _C1)
        struct = (2.0 * cov + _C2) / (var_a + var_b + _C2)
        scores.append(float(np.mean((lum + struct) / 2.0)))
        if min(a.shape[0], a.shape[1]) // 2 < _WINDOW:
            break
        a = cv2.pyrDown(a)
        b = cv2.pyrDown(b)
    return float(np.clip(1.0 - np.mean(scores), 0.0, 1.0))


TEXTURE_METRICS = {"surrogate": surrogate_texture_distance}


def texture_distance(x: ImageBuffer, y: ImageBuffer, metric: str = "surrogate") -> float:
    try:
        fn = TEXTURE_METRICS[metric]
    except KeyError:
        raise ValueError(f"unknown texture metric {metric!r}") from None
    return fn(x, y)


# ---------------------------------------------------------------------------
# Combined energy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EnergyConfig:
    """Tradeoff and evaluation knobs for the combined energy."""

    lam: float = 1.0
    metric: str = "surrogate"
    grid_n: int = 64
    domain_len: float = 100.0
    ocean_seed: int = 0
    eval_time: float = 0.0
    mask_restrict_histogram: bool = False

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")


def combine_energy(texture_term: float, color_term: float, lam: float) -> float:
    return texture_term + lam * color_term


def prepare_eval_inputs(original: ImageBuffer, mask: WaterMask, tex: ImageBuffer,
                        threshold: float = 0.5):
    """Crop the water bounding box from photo / mask / texture and resize
    everything to the fixed evaluation resolution."""
    box = water_bbox(mask, threshold)
    ref = resize_bilinear(crop(original, box), EVAL_SIZE, EVAL_SIZE)
    m = resize_mask_bilinear(crop_mask(mask, box), EVAL_SIZE, EVAL_SIZE)
    t = resize_bilinear(crop(tex, box), EVAL_SIZE, EVAL_SIZE)
    return ref, m, t


def energy(original: ImageBuffer, candidate_params, mask: WaterMask,
           tex: ImageBuffer, cfg: EnergyConfig = EnergyConfig(),
           t: float | None = None) -> float:
    """Eq-style combined energy of one candidate parameter set.

    Renders the candidate on the optimization grid at the fixed evaluation
    resolution and compares it against the resized water crop of the photo
    with the texture metric plus lambda times the HSV Hellinger distance.
    """
    ref, m, texture = prepare_eval_inputs(original, mask, tex)
    rendered = render_candidate(candidate_params, ref, m, texture, cfg,
                                cfg.eval_time if t is None else t)
    et = texture_distance(ref, rendered, cfg.metric)
    hist_mask = m if cfg.mask_restrict_histogram else None
    ec = hellinger(hsv_histogram(ref, hist_mask), hsv_histogram(rendered, hist_mask))
    return combine_energy(et, ec, cfg.lam)


def render_candidate(params, photo_256: ImageBuffer, mask_256: WaterMask,
                     tex_256: ImageBuffer, cfg: EnergyConfig, t: float) -> ImageBuffer:
    """Render one candidate at evaluation resolution (flat-mirror
    reflections; the cheap path used inside the optimizer)."""
    from stillwater.oceansim import init_spectrum, synthesize
    from stillwater.waterrender import render_frame

    spec = init_spectrum(params.wind_speed, params.wind_dir, n=cfg.grid_n,
                         domain_len=cfg.domain_len, seed=cfg.ocean_seed)
    fld = synthesize(spec, t, params.choppiness)
    return render_frame(photo_256, mask_256, tex_256, params, fld,
                        (EVAL_SIZE, EVAL_SIZE), reflection_mode="mirror")
