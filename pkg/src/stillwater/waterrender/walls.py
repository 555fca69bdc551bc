"""Vertical wall proxies erected along the water boundary.

Wall bases are the water-boundary pixels of the mask unprojected onto the
ground plane; during reflection tracing the walls are treated as
infinitely tall and validity is decided by the screen-space mask check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from stillwater.imagecore import WaterMask
from stillwater.waterrender.camera import CameraModel


@dataclass(frozen=True)
class WallProxyMap:
    """Wall base points: screen pixel coords and world ground positions."""

    screen_xy: np.ndarray  # (k, 2) int pixel coords (x, y)
    base_xz: np.ndarray    # (k, 2) world meters on y=0

    def __len__(self) -> int:
        return len(self.screen_xy)

    def connected_components(self) -> list[np.ndarray]:
        """Group boundary pixels into 8-connected components (index lists)."""
        if len(self) == 0:
            return []
        coord_to_idx = {(int(x), int(y)): i for i, (x, y) in enumerate(self.screen_xy)}
        seen = set()
        comps = []
        for start in coord_to_idx:
            if start in seen:
                continue
            stack = [start]
            seen.add(start)
            comp = []
            while stack:
                cx, cy = stack.pop()
                comp.append(coord_to_idx[(cx, cy)])
                for dx in (-1, 0, 1):
                    for dy in (-1, 0, 1):
                        nb = (cx + dx, cy + dy)
                        if nb in coord_to_idx and nb not in seen:
                            seen.add(nb)
                            stack.append(nb)
            comps.append(np.array(sorted(comp), dtype=np.intp))
        return comps


def boundary_pixels(mask: WaterMask, threshold: float = 0.5) -> np.ndarray:
    """(k, 2) pixel coords (x, y) of water pixels with a non-water
    4-neighbor."""
    water = mask.prob >= threshold
    pad = np.pad(water, 1, mode="edge")
    interior = (
        pad[:-2, 1:-1] & pad[2:, 1:-1] & pad[1:-1, :-2] & pad[1:-1, 2:]
    )
    edge = water & ~interior
    ys, xs = np.nonzero(edge)
    return np.stack([xs, ys], axis=1)


def build_walls(mask: WaterMask, cam: CameraModel) -> WallProxyMap:
    """Unproject the mask's water-boundary pixels to y=0 wall base points.

    Boundary pixels whose camera rays do not reach the plane (above the
    horizon) carry no wall and are dropped.
    """
    px = boundary_pixels(mask)
    if len(px) == 0:
        return WallProxyMap(
            screen_xy=np.zeros((0, 2), dtype=np.intp),
            base_xz=np.zeros((0, 2)),
        )
    pts, hit = cam.unproject_pixel(
        px[:, 0].astype(np.float64), px[:, 1].astype(np.float64),
        mask.width, mask.height,
    )
    return WallProxyMap(
        screen_xy=px[hit].astype(np.intp),
        base_xz=pts[hit][:, [0, 2]],
    )
