"""The 21-dimensional water/camera/lighting parameter vector."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# (name, low, high) per scalar dimension, in vector order.
PARAM_RANGES: tuple[tuple[str, float, float], ...] = (
    ("wind_speed", 1.5, 30.0),
    ("wind_dir", 0.0, 180.0),
    ("choppiness", 0.0, 3.0),
    ("cam_height", 1.0, 75.0),
    ("cam_angle", 45.0, 105.0),
    ("cam_fov", 45.0, 90.0),
    ("water_color_r", 0.0, 1.0),
    ("water_color_g", 0.0, 1.0),
    ("water_color_b", 0.0, 1.0),
    ("sh_l0_0", 0.0, 2.0),
    ("sh_l0_1", 0.0, 2.0),
    ("sh_l0_2", 0.0, 2.0),
    ("sh_l1_0", -1.0, 1.0),
    ("sh_l1_1", -1.0, 1.0),
    ("sh_l1_2", -1.0, 1.0),
    ("sh_l1_3", -1.0, 1.0),
    ("sh_l1_4", -1.0, 1.0),
    ("sh_l1_5", -1.0, 1.0),
    ("sh_l1_6", -1.0, 1.0),
    ("sh_l1_7", -1.0, 1.0),
    ("sh_l1_8", -1.0, 1.0),
)

PARAM_DIM = len(PARAM_RANGES)  # 21

RANGE_LO = np.array([lo for _, lo, _ in PARAM_RANGES])
RANGE_HI = np.array([hi for _, _, hi in PARAM_RANGES])


def _clamp(v: float, lo: float, hi: float) -> float:
    return min(max(float(v), lo), hi)


@dataclass(frozen=True)
class WaterParams:
    """Wind, wave, camera, color, and SH lighting parameters.

    Components are clamped into their valid ranges on construction.
    cam_angle is measured from straight-down nadir (90 = horizontal optical
    axis).  sh_l1 is channel-major: [Rx, Ry, Rz, Gx, Gy, Gz, Bx, By, Bz].
    """

    wind_speed: float = 10.0
    wind_dir: float = 90.0
    choppiness: float = 1.0
    cam_height: float = 10.0
    cam_angle: float = 75.0
    cam_fov: float = 60.0
    water_color: tuple[float, float, float] = (0.1, 0.2, 0.3)
    sh_l0: tuple[float, float, float] = (1.0, 1.0, 1.0)
    sh_l1: tuple[float, ...] = (0.0,) * 9

    def __post_init__(self):
        vec = self.as_vector()
        clamped = np.clip(vec, RANGE_LO, RANGE_HI)
        object.__setattr__(self, "wind_speed", float(clamped[0]))
        object.__setattr__(self, "wind_dir", float(clamped[1]))
        object.__setattr__(self, "choppiness", float(clamped[2]))
        object.__setattr__(self, "cam_height", float(clamped[3]))
        object.__setattr__(self, "cam_angle", float(clamped[4]))
        object.__setattr__(self, "cam_fov", float(clamped[5]))
        object.__setattr__(self, "water_color", tuple(float(c) for c in clamped[6:9]))
        object.__setattr__(self, "sh_l0", tuple(float(c) for c in clamped[9:12]))
        object.__setattr__(self, "sh_l1", tuple(float(c) for c in clamped[12:21]))

    def as_vector(self) -> np.ndarray:
        if len(self.water_color) != 3 or len(self.sh_l0) != 3 or len(self.sh_l1) != 9:
            raise ValueError("water_color/sh_l0 need 3 entries and sh_l1 needs 9")
        return np.array(
            [
                self.wind_speed, self.wind_dir, self.choppiness,
                self.cam_height, self.cam_angle, self.cam_fov,
                *self.water_color, *self.sh_l0, *self.sh_l1,
            ],
            dtype=np.float64,
        )

    @classmethod
    def from_vector(cls, vec) -> "WaterParams":
        v = np.asarray(vec, dtype=np.float64)
        if v.shape != (PARAM_DIM,):
            raise ValueError(f"expected ({PARAM_DIM},) vector, got {v.shape}")
        return cls(
            wind_speed=v[0], wind_dir=v[1], choppiness=v[2],
            cam_height=v[3], cam_angle=v[4], cam_fov=v[5],
            water_color=tuple(v[6:9]), sh_l0=tuple(v[9:12]), sh_l1=tuple(v[12:21]),
        )
