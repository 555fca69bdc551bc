"""Image-based screen-space reflection.

For each water fragment the reflected ray is marched in screen space
against the water-mask boundary; each water-to-non-water crossing is a
candidate wall collision.  A candidate is valid when the 3D collision
point (on an infinitely tall vertical wall through the boundary's ground
projection) lands on a non-water pixel when projected back to the screen.
The first valid collision is mirrored below the plane and projected to
texture coordinates under the flat-mirror assumption.  Rays that never
hit a wall sample the reflection texture at their own fragment position,
which is exactly the flat-mirror color there.

The CollisionAtlas caches, per 4x4 pixel group and 16 screen directions,
the first and last crossing distances so a static viewpoint can reuse the
march across frames.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from stillwater.imagecore import ImageBuffer, WaterMask
from stillwater.waterrender.camera import CameraModel

ATLAS_GROUP = 4
ATLAS_DIRS = 16


def reflect_about(dirs: np.ndarray, normals: np.ndarray) -> np.ndarray:
    """Mirror incident directions about unit normals."""
    dot = (dirs * normals).sum(axis=-1, keepdims=True)
    return dirs - 2.0 * dot * normals


def sample_bilinear_rgb(data: np.ndarray, px: np.ndarray, py: np.ndarray) -> np.ndarray:
    """Clamped bilinear fetch from (h, w, 3) data at float pixel coords."""
    h, w = data.shape[:2]
    x = np.clip(px, 0.0, w - 1.0)
    y = np.clip(py, 0.0, h - 1.0)
    x0 = np.floor(x).astype(np.intp)
    y0 = np.floor(y).astype(np.intp)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    tx = (x - x0)[..., None]
    ty = (y - y0)[..., None]
    top = data[y0, x0] + tx * (data[y0, x1] - data[y0, x0])
    bot = data[y1, x0] + tx * (data[y1, x1] - data[y1, x0])
    return top + ty * (bot - top)


def _sample_mask_nearest(prob: np.ndarray, px, py) -> np.ndarray:
    h, w = prob.shape
    x = np.clip(np.rint(px).astype(np.intp), 0, w - 1)
    y = np.clip(np.rint(py).astype(np.intp), 0, h - 1)
    return prob[y, x]


@dataclass
class _Frame:
    """Per-call geometry bundle shared by the march helpers."""

    cam: CameraModel
    mask: WaterMask
    tex: ImageBuffer
    w: int
    h: int


def _screen_march_setup(frame: _Frame, origins, reflect_dirs):
    """Project ray origins and a probe point to get pixel-space march rays.

    Returns (s0x, s0y, dsx, dsy, ok): unit screen direction per ray; ok is
    False where the reflection cannot be marched (downward ray, degenerate
    projection) and the fallback sample should be used.
    """
    cam, w, h = frame.cam, frame.w, frame.h
    s0x, s0y, front0 = cam.project_pixels(origins, w, h)
    probe = origins + reflect_dirs  # 1 m along the reflected ray
    s1x, s1y, front1 = cam.project_pixels(probe, w, h)
    dsx = s1x - s0x
    dsy = s1y - s0y
    norm = np.hypot(dsx, dsy)
    ok = front0 & front1 & (norm > 1e-9) & (reflect_dirs[..., 1] > 1e-9)
    norm = np.where(norm > 1e-9, norm, 1.0)
    return s0x, s0y, dsx / norm, dsy / norm, ok


def _resolve_candidates(frame: _Frame, origins, reflect_dirs, cand_px, cand_py):
    """Validate candidate crossings and compute their texture samples.

    For candidate screen positions: unproject to the ground to place the
    wall, intersect the 3D reflected ray with the vertical wall line,
    project the collision back to screen, and accept it when it lands on a
    non-water pixel (or off-frame, which the infinite-wall assumption
    treats as non-water).  Returns (valid, colors).
    """
    cam, mask, tex, w, h = frame.cam, frame.mask, frame.tex, frame.w, frame.h
    ground, ghit = cam.unproject_pixel(cand_px, cand_py, w, h)
    rxz = reflect_dirs[..., [0, 2]]
    denom = (rxz * rxz).sum(axis=-1)
    denom = np.where(denom > 1e-18, denom, 1.0)
    t = ((ground[..., [0, 2]] - origins[..., [0, 2]]) * rxz).sum(axis=-1) / denom
    forward = t > 1e-9
    coll = origins + t[..., None] * reflect_dirs

    cpx, cpy, cfront = cam.project_pixels(coll, w, h)
    inside = (cpx >= 0) & (cpx <= w - 1) & (cpy >= 0) & (cpy <= h - 1)
    on_water = _sample_mask_nearest(mask.prob, cpx, cpy) >= 0.5
    wall_high_enough = ~inside | ~on_water
    valid = ghit & forward & cfront & wall_high_enough

    mirrored = coll.copy()
    mirrored[..., 1] = -mirrored[..., 1]
    qx, qy, qfront = cam.project_pixels(mirrored, w, h)
    valid &= qfront
    colors = sample_bilinear_rgb(tex.data, qx, qy)
    return valid, colors


def _fallback_colors(frame: _Frame, origins):
    px, py, _ = frame.cam.project_pixels(origins, frame.w, frame.h)
    return sample_bilinear_rgb(frame.tex.data, px, py)


def trace_reflection(origins, normals, cam: CameraModel, mask: WaterMask,
                     tex: ImageBuffer, atlas: "CollisionAtlas | None" = None,
                     step_px: float = 1.0, max_steps: int | None = None) -> np.ndarray:
    """Reflection color for a batch of displaced water points.

    origins, normals: (k, 3).  Marching runs at step_px pixel steps up to
    the frame diagonal unless an atlas provides precomputed crossings.
    """
    origins = np.asarray(origins, dtype=np.float64)
    normals = np.asarray(normals, dtype=np.float64)
    frame = _Frame(cam=cam, mask=mask, tex=tex, w=mask.width, h=mask.height)

    incident = origins - cam.position
    incident /= np.linalg.norm(incident, axis=-1, keepdims=True)
    rdirs = reflect_about(incident, normals)

    colors = _fallback_colors(frame, origins)
    s0x, s0y, dsx, dsy, ok = _screen_march_setup(frame, origins, rdirs)
    if not ok.any():
        return colors

    if atlas is not None:
        hit, hit_colors = atlas.lookup(frame, origins, rdirs, s0x, s0y, dsx, dsy, ok)
        colors[hit] = hit_colors[hit]
        return colors

    if max_steps is None:
        max_steps = int(np.ceil(np.hypot(frame.w, frame.h) / step_px))

    active = np.nonzero(ok)[0]
    prev_water = _sample_mask_nearest(mask.prob, s0x[active], s0y[active]) >= 0.5
    cx = s0x[active].copy()
    cy = s0y[active].copy()

    for _ in range(max_steps):
        if len(active) == 0:
            break
        cx += step_px * dsx[active]
        cy += step_px * dsy[active]
        inside = (cx >= 0) & (cx <= frame.w - 1) & (cy >= 0) & (cy <= frame.h - 1)
        if not inside.all():
            active = active[inside]
            prev_water = prev_water[inside]
            cx, cy = cx[inside], cy[inside]
            if len(active) == 0:
                break
        cur_water = _sample_mask_nearest(mask.prob, cx, cy) >= 0.5
        crossing = prev_water & ~cur_water
        if crossing.any():
            idx = active[crossing]
            valid, cand_colors = _resolve_candidates(
                frame, origins[idx], rdirs[idx], cx[crossing], cy[crossing]
            )
            done_idx = idx[valid]
            colors[done_idx] = cand_colors[valid]
            keep = np.ones(len(active), dtype=bool)
            keep[np.nonzero(crossing)[0][valid]] = False
            active = active[keep]
            prev_water = cur_water[keep]
            cx, cy = cx[keep], cy[keep]
        else:
            prev_water = cur_water
    return colors


# ---------------------------------------------------------------------------
# Collision atlas (static-viewpoint precompute)
# ---------------------------------------------------------------------------

@dataclass
class CollisionAtlas:
    """First/last mask-boundary crossing distances per 4x4 pixel group and
    16 uniformly spaced screen directions.  NaN marks no crossing."""

    first_dist: np.ndarray  # (gh, gw, ATLAS_DIRS)
    last_dist: np.ndarray   # (gh, gw, ATLAS_DIRS)
    width: int
    height: int

    def lookup(self, frame: _Frame, origins, rdirs, s0x, s0y, dsx, dsy, ok):
        """Resolve reflections from cached crossings.

        A fragment picks its 4x4 group, linearly interpolates the two
        nearest precomputed directions, and validates the first (then
        last) implied collision exactly like the brute march.
        """
        k = len(s0x)
        colors = np.zeros((k, 3))
        hit = np.zeros(k, dtype=bool)

        sx = np.where(ok, s0x, 0.0)
        sy = np.where(ok, s0y, 0.0)
        gx = np.clip(np.floor(sx / ATLAS_GROUP), 0, self.first_dist.shape[1] - 1).astype(np.intp)
        gy = np.clip(np.floor(sy / ATLAS_GROUP), 0, self.first_dist.shape[0] - 1).astype(np.intp)
        ang = np.arctan2(np.where(ok, dsy, 0.0), np.where(ok, dsx, 1.0)) % (2.0 * np.pi)
        a = ang / (2.0 * np.pi / ATLAS_DIRS)
        i0 = np.floor(a).astype(np.intp) % ATLAS_DIRS
        i1 = (i0 + 1) % ATLAS_DIRS
        frac = a - np.floor(a)

        for table in (self.first_dist, self.last_dist):
            todo = ok & ~hit
            if not todo.any():
                break
            d0 = table[gy, gx, i0]
            d1 = table[gy, gx, i1]
            dist = np.where(
                np.isnan(d0), d1,
                np.where(np.isnan(d1), d0, d0 + (d1 - d0) * frac),
            )
            usable = todo & ~np.isnan(dist)
            if not usable.any():
                continue
            cand_px = s0x[usable] + dist[usable] * dsx[usable]
            cand_py = s0y[usable] + dist[usable] * dsy[usable]
            valid, cand_colors = _resolve_candidates(
                frame, origins[usable], rdirs[usable], cand_px, cand_py
            )
            idx = np.nonzero(usable)[0][valid]
            colors[idx] = cand_colors[valid]
            hit[idx] = True
        return hit, colors


def build_collision_atlas(mask: WaterMask, step_px: float = 1.0,
                          max_steps: int | None = None) -> CollisionAtlas:
    """March all pixel groups along the 16 canonical directions, recording
    first and last water-to-non-water crossing distances."""
    h, w = mask.height, mask.width
    gh = (h + ATLAS_GROUP - 1) // ATLAS_GROUP
    gw = (w + ATLAS_GROUP - 1) // ATLAS_GROUP
    if max_steps is None:
        max_steps = int(np.ceil(np.hypot(w, h) / step_px))

    cx0, cy0 = np.meshgrid(
        np.arange(gw) * ATLAS_GROUP + (ATLAS_GROUP - 1) / 2.0,
        np.arange(gh) * ATLAS_GROUP + (ATLAS_GROUP - 1) / 2.0,
    )
    cx0 = cx0.ravel()
    cy0 = cy0.ravel()
    n = len(cx0)

    first = np.full((n, ATLAS_DIRS), np.nan)
    last = np.full((n, ATLAS_DIRS), np.nan)
    angles = np.arange(ATLAS_DIRS) * (2.0 * np.pi / ATLAS_DIRS)

    for di, ang in enumerate(angles):
        dx, dy = np.cos(ang), np.sin(ang)
        active = np.arange(n)
        cx = cx0.copy()
        cy = cy0.copy()
        prev_water = _sample_mask_nearest(mask.prob, cx, cy) >= 0.5
        dist = np.zeros(n)
        for _ in range(max_steps):
            if len(active) == 0:
                break
            cx += step_px * dx
            cy += step_px * dy
            dist[active] += step_px
            inside = (cx >= 0) & (cx <= w - 1) & (cy >= 0) & (cy <= h - 1)
            active = active[inside]
            prev_water = prev_water[inside]
            cx, cy = cx[inside], cy[inside]
            if len(active) == 0:
                break
            cur_water = _sample_mask_nearest(mask.prob, cx, cy) >= 0.5
            crossing = prev_water & ~cur_water
            if crossing.any():
                idx = active[crossing]
                d = dist[idx]
                fresh = np.isnan(first[idx, di])
                first[idx[fresh], di] = d[fresh]
                last[idx, di] = d
            prev_water = cur_water

    return CollisionAtlas(
        first_dist=first.reshape(gh, gw, ATLAS_DIRS),
        last_dist=last.reshape(gh, gw, ATLAS_DIRS),
        width=w, height=h,
    )
