"""Water-surface renderer: projected grid, shading, screen-space
reflections, and frame compositing."""

from stillwater.waterrender.camera import CameraModel, HorizonError, project_grid
from stillwater.waterrender.frame import (
    RenderScene,
    Sphere,
    camera_for,
    insert_sphere,
    ray_sphere,
    render_frame,
    sample_field,
)
from stillwater.waterrender.params import PARAM_DIM, PARAM_RANGES, WaterParams
from stillwater.waterrender.reflection import (
    CollisionAtlas,
    build_collision_atlas,
    trace_reflection,
)
from stillwater.waterrender.shading import (
    schlick_fresnel,
    sh_irradiance,
    shade_fragment,
    shade_water,
)
from stillwater.waterrender.walls import WallProxyMap, boundary_pixels, build_walls

__all__ = [
    "CameraModel",
    "CollisionAtlas",
    "HorizonError",
    "PARAM_DIM",
    "PARAM_RANGES",
    "RenderScene",
    "Sphere",
    "WallProxyMap",
    "WaterParams",
    "boundary_pixels",
    "build_collision_atlas",
    "build_walls",
    "camera_for",
    "insert_sphere",
    "project_grid",
    "ray_sphere",
    "render_frame",
    "sample_field",
    "schlick_fresnel",
    "sh_irradiance",
    "shade_fragment",
    "shade_water",
    "trace_reflection",
]
