"""stillwater: parametric animated water scenes from a single photograph.

The package is organized around a simple dataflow: segment the water
(`maskseg`), build a flat-mirror reflection texture (`reflectex`), estimate
wave / camera / lighting parameters by black-box search (`metrics` +
`cuckoo`), and render the animated surface back over the photo
(`oceansim` + `waterrender`).  `pipeline` wires the stages together and
owns the scene-file contract consumed by the browser viewer.
"""

from stillwater.imagecore import ImageBuffer, WaterMask, load_image, save_image
from stillwater.waterrender import WaterParams

__version__ = "0.1.0"

__all__ = [
    "ImageBuffer",
    "WaterMask",
    "WaterParams",
    "load_image",
    "save_image",
    "__version__",
]
