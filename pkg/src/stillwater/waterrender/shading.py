"""Fresnel blending and low-order spherical-harmonics irradiance."""

from __future__ import annotations

import numpy as np

# Irradiance convolution constants for SH bands 0 and 1:
# pi * Y00 and (2*pi/3) * Y1m with Y00 = 0.282095, Y1m scale 0.488603.
SH_C0 = 0.8862269254527580
SH_C1 = 1.0233267079464885

WATER_F0 = 0.02


def schlick_fresnel(cos_theta, f0: float = WATER_F0) -> np.ndarray:
    """Schlick reflectance; non-increasing in the view-normal cosine."""
    c = np.clip(np.asarray(cos_theta, dtype=np.float64), 0.0, 1.0)
    return f0 + (1.0 - f0) * (1.0 - c) ** 5


def sh_irradiance(normals, sh_l0, sh_l1) -> np.ndarray:
    """Irradiance per RGB channel from band-0/1 SH coefficients.

    normals: (..., 3) unit vectors.  sh_l0: 3 band-0 coefficients.
    sh_l1: 9 band-1 coefficients, channel-major [Rx,Ry,Rz,Gx,...,Bz].
    Output clamped to be non-negative.
    """
    n = np.asarray(normals, dtype=np.float64)
    l0 = np.asarray(sh_l0, dtype=np.float64).reshape(3)
    l1 = np.asarray(sh_l1, dtype=np.float64).reshape(3, 3)
    e = SH_C0 * l0 + SH_C1 * (n[..., None, :] * l1).sum(axis=-1)
    return np.maximum(e, 0.0)


def shade_water(cos_theta, normals, reflect_rgb, params, fresnel_override=None):
    """Water fragment color: F * C_reflect + (1 - F) * C_refract where the
    refraction term is the flat water color modulated by SH irradiance."""
    f = (
        schlick_fresnel(cos_theta)[..., None]
        if fresnel_override is None
        else np.full((*np.shape(cos_theta), 1), float(fresnel_override))
    )
    refract = np.asarray(params.water_color) * sh_irradiance(
        normals, params.sh_l0, params.sh_l1
    )
    color = f * np.asarray(reflect_rgb, dtype=np.float64) + (1.0 - f) * refract
    return np.clip(color, 0.0, 1.0)


def shade_fragment(point, normal, cam, mask, tex, params, atlas=None,
                   fresnel_override=None):
    """Shade one displaced surface point, fetching its reflection sample.

    Convenience scalar wrapper over the vectorized render internals.
    """
    from stillwater.waterrender.reflection import trace_reflection

    p = np.asarray(point, dtype=np.float64).reshape(1, 3)
    n = np.asarray(normal, dtype=np.float64).reshape(1, 3)
    n = n / np.linalg.norm(n)
    refl = trace_reflection(p, n, cam, mask, tex, atlas=atlas)
    view = cam.position - p
    view /= np.linalg.norm(view)
    cos_theta = np.clip((view * n).sum(axis=-1), 0.0, 1.0)
    return shade_water(cos_theta, n, refl, params, fresnel_override)[0]
