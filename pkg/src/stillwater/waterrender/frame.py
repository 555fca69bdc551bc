"""Full-frame rendering: displaced water shading composited over the photo,
plus analytic sphere insertion."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from stillwater.imagecore import (
    ImageBuffer,
    WaterMask,
    resize_bilinear,
    resize_mask_bilinear,
)
from stillwater.oceansim import DisplacementField
from stillwater.waterrender.camera import CameraModel
from stillwater.waterrender.params import WaterParams
from stillwater.waterrender.reflection import (
    CollisionAtlas,
    sample_bilinear_rgb,
    trace_reflection,
)
from stillwater.waterrender.shading import schlick_fresnel, sh_irradiance


@dataclass(frozen=True)
class Sphere:
    center: tuple[float, float, float]
    radius: float
    albedo: tuple[float, float, float]


@dataclass(frozen=True)
class RenderScene:
    """Everything needed to render frames of one scene."""

    photo: ImageBuffer
    mask: WaterMask
    tex: ImageBuffer
    params: WaterParams
    fld: DisplacementField
    spheres: tuple[Sphere, ...] = field(default_factory=tuple)


def camera_for(params: WaterParams, w: int, h: int) -> CameraModel:
    return CameraModel(
        height=params.cam_height,
        angle_deg=params.cam_angle,
        fov_deg=params.cam_fov,
        aspect=w / h,
    )


def sample_field(fld: DisplacementField, x: np.ndarray, z: np.ndarray):
    """Bilinear, domain-tiling sample of height / displacement / normal."""
    n = fld.height.shape[0]
    scale = n / fld.domain_len
    fx = (x * scale) % n
    fz = (z * scale) % n
    x0 = np.floor(fx).astype(np.intp) % n
    z0 = np.floor(fz).astype(np.intp) % n
    x1 = (x0 + 1) % n
    z1 = (z0 + 1) % n
    tx = fx - np.floor(fx)
    tz = fz - np.floor(fz)

    def lerp2(a):
        top = a[z0, x0] + (tx if a.ndim == 2 else tx[..., None]) * (a[z0, x1] - a[z0, x0])
        bot = a[z1, x0] + (tx if a.ndim == 2 else tx[..., None]) * (a[z1, x1] - a[z1, x0])
        t = tz if a.ndim == 2 else tz[..., None]
        return top + t * (bot - top)

    h = lerp2(fld.height)
    dx = lerp2(fld.displace_x)
    dz = lerp2(fld.displace_z)
    nrm = lerp2(fld.normal)
    nrm /= np.linalg.norm(nrm, axis=-1, keepdims=True)
    return h, dx, dz, nrm


def ray_sphere(origins: np.ndarray, dirs: np.ndarray, sphere: Sphere):
    """Nearest positive intersection parameter (inf where missed)."""
    oc = origins - np.asarray(sphere.center)
    b = (dirs * oc).sum(axis=-1)
    c = (oc * oc).sum(axis=-1) - sphere.radius * sphere.radius
    disc = b * b - c
    ok = disc >= 0
    sq = np.sqrt(np.where(ok, disc, 0.0))
    t = -b - sq
    t2 = -b + sq
    t = np.where(t > 1e-9, t, t2)
    return np.where(ok & (t > 1e-9), t, np.inf)


def _sphere_hits(origins, dirs, spheres, params):
    """Nearest sphere hit over a batch of rays: (t, color, hit)."""
    flat_o = origins.reshape(-1, 3)
    flat_d = dirs.reshape(-1, 3)
    best_t = np.full(flat_o.shape[0], np.inf)
    color = np.zeros((flat_o.shape[0], 3))
    for s in spheres:
        t = ray_sphere(flat_o, flat_d, s)
        closer = t < best_t
        if closer.any():
            pts = flat_o[closer] + t[closer, None] * flat_d[closer]
            nrm = (pts - np.asarray(s.center)) / s.radius
            shade = np.asarray(s.albedo) * sh_irradiance(nrm, params.sh_l0, params.sh_l1)
            color[closer] = np.clip(shade, 0.0, 1.0)
            best_t[closer] = t[closer]
    hit = np.isfinite(best_t)
    shp = origins.shape[:-1]
    return best_t.reshape(shp), color.reshape(*shp, 3), hit.reshape(shp)


def render_frame(img: ImageBuffer, mask: WaterMask, tex: ImageBuffer,
                 params: WaterParams, fld: DisplacementField, out_res,
                 reflection_mode: str = "trace",
                 atlas: CollisionAtlas | None = None,
                 spheres: tuple[Sphere, ...] = (),
                 fresnel_override: float | None = None,
                 step_px: float = 1.0) -> ImageBuffer:
    """Render one frame at out_res = (w, h).

    Water pixels are shaded (Fresnel blend of traced reflection and
    SH-modulated water color) and alpha-blended over the photo by the
    mask's fractional values; pixels with mask exactly zero keep the photo
    bit-for-bit.  reflection_mode: "trace" (full march), "atlas"
    (precomputed march; built here when not supplied), or "mirror"
    (flat-mirror fallback everywhere, the cheap optimizer path).
    """
    if isinstance(out_res, int):
        w = h = out_res
    else:
        w, h = out_res
    photo = resize_bilinear(img, w, h)
    m = resize_mask_bilinear(mask, w, h)
    texture = resize_bilinear(tex, w, h)
    cam = camera_for(params, w, h)

    nx, ny = cam.pixel_ndc(w, h)
    dirs = cam.ray_dirs(nx, ny)
    ground, hit_plane = cam.intersect_plane(dirs)

    mprob = m.prob.astype(np.float64)
    water = (mprob > 0.0) & hit_plane

    out = photo.data.astype(np.float64).copy()

    if water.any():
        gx = ground[..., 0][water]
        gz = ground[..., 2][water]
        hgt, dx, dz, nrm = sample_field(fld, gx, gz)
        pts = np.stack([gx + dx, hgt, gz + dz], axis=-1)

        view = cam.position - pts
        view /= np.linalg.norm(view, axis=-1, keepdims=True)
        cos_theta = np.clip((view * nrm).sum(axis=-1), 0.0, 1.0)
        fres = (
            schlick_fresnel(cos_theta)
            if fresnel_override is None
            else np.full(cos_theta.shape, float(fresnel_override))
        )

        if reflection_mode == "mirror":
            py, px = np.nonzero(water)
            refl = sample_bilinear_rgb(texture.data, px.astype(np.float64),
                                       py.astype(np.float64))
        elif reflection_mode in ("trace", "atlas"):
            if reflection_mode == "atlas" and atlas is None:
                from stillwater.waterrender.reflection import build_collision_atlas
                atlas = build_collision_atlas(m, step_px=step_px)
            refl = trace_reflection(
                pts, nrm, cam, m, texture,
                atlas=atlas if reflection_mode == "atlas" else None,
                step_px=step_px,
            )
        else:
            raise ValueError(f"unknown reflection_mode {reflection_mode!r}")

        if spheres:
            rdirs = pts - cam.position
            rdirs /= np.linalg.norm(rdirs, axis=-1, keepdims=True)
            from stillwater.waterrender.reflection import reflect_about
            rr = reflect_about(rdirs, nrm)
            _, scol, shit = _sphere_hits(pts, rr, spheres, params)
            refl = np.where(shit[..., None], scol, refl)

        refract = np.asarray(params.water_color) * sh_irradiance(
            nrm, params.sh_l0, params.sh_l1
        )
        cw = np.clip(fres[..., None] * refl + (1.0 - fres[..., None]) * refract, 0.0, 1.0)

        a = mprob[water][..., None]
        out[water] = a * cw + (1.0 - a) * out[water]

    if spheres:
        t_sph, scol, shit = _sphere_hits(
            np.broadcast_to(cam.position, dirs.shape), dirs, spheres, params
        )
        # The sphere occludes water when nearer than the plane hit; photo
        # content carries no depth, so spheres always occlude it.
        t_plane = np.where(hit_plane, -cam.position[1] / np.minimum(dirs[..., 1], -1e-12),
                           np.inf)
        occlude = shit & ((t_sph < t_plane) | ~water)
        out[occlude] = scol[occlude]

    return ImageBuffer(np.clip(out, 0.0, 1.0))


def insert_sphere(scene: RenderScene, center, radius: float, albedo,
                  out_res, **kwargs) -> ImageBuffer:
    """Render the scene with one extra synthetic sphere."""
    sph = Sphere(center=tuple(float(c) for c in center), radius=float(radius),
                 albedo=tuple(float(c) for c in albedo))
    scene = replace(scene, spheres=scene.spheres + (sph,))
    return render_frame(scene.photo, scene.mask, scene.tex, scene.params,
                        scene.fld, out_res, spheres=scene.spheres, **kwargs)
