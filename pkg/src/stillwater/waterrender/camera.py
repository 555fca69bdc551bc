"""Pinhole camera over the water plane and the projected screen-space grid.

World frame: water plane is y=0, camera sits at (0, cam_height, 0) looking
along +z, pitched by cam_angle measured from straight-down nadir (90 means
a horizontal optical axis).  No roll; screen x maps to world +x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_FAR_DIST = 1e5


class HorizonError(ValueError):
    """Raised when no part of the view frustum intersects the water plane."""


@dataclass(frozen=True)
class CameraModel:
    height: float
    angle_deg: float
    fov_deg: float  # vertical field of view
    aspect: float = 1.0

    def __post_init__(self):
        if self.height <= 0:
            raise ValueError("camera must sit strictly above the water plane")

    @property
    def position(self) -> np.ndarray:
        return np.array([0.0, self.height, 0.0])

    @property
    def forward(self) -> np.ndarray:
        a = math.radians(self.angle_deg)
        return np.array([0.0, -math.cos(a), math.sin(a)])

    @property
    def right(self) -> np.ndarray:
        return np.array([1.0, 0.0, 0.0])

    @property
    def up(self) -> np.ndarray:
        a = math.radians(self.angle_deg)
        return np.array([0.0, math.sin(a), math.cos(a)])

    @property
    def tan_half_v(self) -> float:
        return math.tan(math.radians(self.fov_deg) / 2.0)

    @property
    def tan_half_h(self) -> float:
        return self.tan_half_v * self.aspect

    # -- rays ---------------------------------------------------------------

    def ray_dirs(self, ndc_x, ndc_y) -> np.ndarray:
        """Unit ray directions for NDC coords (x right, y up, both [-1,1])."""
        nx = np.asarray(ndc_x, dtype=np.float64)
        ny = np.asarray(ndc_y, dtype=np.float64)
        d = (
            self.forward
            + nx[..., None] * (self.tan_half_h * self.right)
            + ny[..., None] * (self.tan_half_v * self.up)
        )
        return d / np.linalg.norm(d, axis=-1, keepdims=True)

    def pixel_ndc(self, w: int, h: int) -> tuple[np.ndarray, np.ndarray]:
        """NDC coords of all pixel centers; returns (nx, ny) grids (h, w)."""
        xs = (2.0 * (np.arange(w) + 0.5) / w) - 1.0
        ys = 1.0 - (2.0 * (np.arange(h) + 0.5) / h)
        return np.meshgrid(xs, ys)

    def intersect_plane(self, dirs: np.ndarray, far_dist: float = DEFAULT_FAR_DIST):
        """Intersect camera rays with y=0.

        Returns (points, hit): rays with dy >= 0 are pushed out to far_dist
        along their horizontal component and flagged hit=False.
        """
        dy = dirs[..., 1]
        hit = dy < -1e-12
        t = np.where(hit, -self.height / np.where(hit, dy, -1.0), np.inf)
        pts = self.position + t[..., None] * dirs
        if not np.all(hit):
            horiz = dirs.copy()
            horiz[..., 1] = 0.0
            norm = np.linalg.norm(horiz, axis=-1, keepdims=True)
            norm[norm < 1e-12] = 1.0
            far = self.position + horiz / norm * far_dist
            far[..., 1] = 0.0
            pts = np.where(hit[..., None], pts, far)
        return pts, hit

    # -- projection ---------------------------------------------------------

    def project_ndc(self, points: np.ndarray):
        """World points -> NDC; returns (nx, ny, in_front)."""
        v = np.asarray(points, dtype=np.float64) - self.position
        z = v @ self.forward
        x = v @ self.right
        y = v @ self.up
        in_front = z > 1e-12
        zs = np.where(in_front, z, 1.0)
        return x / (zs * self.tan_half_h), y / (zs * self.tan_half_v), in_front

    def project_pixels(self, points: np.ndarray, w: int, h: int):
        """World points -> pixel coords (px, py, in_front)."""
        nx, ny, in_front = self.project_ndc(points)
        px = (nx + 1.0) * 0.5 * w - 0.5
        py = (1.0 - ny) * 0.5 * h - 0.5
        return px, py, in_front

    def unproject_pixel(self, px, py, w: int, h: int, far_dist: float = DEFAULT_FAR_DIST):
        """Pixel centers -> points on y=0 (far push when above horizon)."""
        nx = (2.0 * (np.asarray(px, dtype=np.float64) + 0.5) / w) - 1.0
        ny = 1.0 - (2.0 * (np.asarray(py, dtype=np.float64) + 0.5) / h)
        dirs = self.ray_dirs(nx, ny)
        return self.intersect_plane(dirs, far_dist)


def project_grid(cam: CameraModel, grid_res, far_dist: float = DEFAULT_FAR_DIST) -> np.ndarray:
    """Screen-space-uniform vertex grid projected onto the water plane.

    grid_res is (nx, ny) or a single int for both.  Returns (ny*nx, 3)
    world points; vertices whose rays miss the plane are pushed to
    far_dist.  Raises HorizonError when nothing in the frustum hits water.
    """
    if isinstance(grid_res, int):
        gw = gh = grid_res
    else:
        gw, gh = grid_res
    if gw < 2 or gh < 2:
        raise ValueError("grid needs at least 2x2 vertices")
    nx, ny = np.meshgrid(np.linspace(-1.0, 1.0, gw), np.linspace(1.0, -1.0, gh))
    dirs = cam.ray_dirs(nx, ny)
    pts, hit = cam.intersect_plane(dirs, far_dist)
    if not hit.any():
        raise HorizonError("no view ray intersects the water plane")
    return pts.reshape(-1, 3)
