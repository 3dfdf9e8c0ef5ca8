"""Forward and inverse IHS transform.

The linear (triangular) variant is used: intensity is the plain band
average and the chroma plane is spanned by two orthogonal axes

    I  = (R + G + B) / 3
    v1 = (-R - G + 2B) / sqrt(6)
    v2 = (R - G) / sqrt(2)

with hue = atan2(v2, v1) mapped to [0, 2pi) and saturation = hypot(v1, v2).
The map is exactly invertible, and replacing the intensity plane before
inverting leaves hue and saturation untouched, which is the substitution
seam the fusion pipelines rely on.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .raster import Band, MultibandImage

_SQRT6 = math.sqrt(6.0)
_SQRT2 = math.sqrt(2.0)
_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class IhsTriple:
    """Intensity / hue / saturation planes of one RGB image."""

    intensity: Band
    hue: Band
    saturation: Band

    def __post_init__(self):
        dims = (self.intensity.width, self.intensity.height)
        for name in ("hue", "saturation"):
            b = getattr(self, name)
            if (b.width, b.height) != dims:
                raise DimensionError(f"{name} plane is {b.width}x{b.height}, expected {dims[0]}x{dims[1]}")


def rgb_to_ihs(img: MultibandImage) -> IhsTriple:
    """Split an RGB image into intensity, hue and saturation planes.

    Hue is stored in radians in [0, 2pi); pixels with zero saturation get
    hue 0 so that round trips are total.
    """
    if len(img) != 3:
        raise DimensionError(f"IHS transform needs exactly 3 bands, got {len(img)}")
    r, g, b = (band.samples for band in img.bands)
    intensity = (r + g + b) / 3.0
    v1 = (-r - g + 2.0 * b) / _SQRT6
    v2 = (r - g) / _SQRT2
    saturation = np.hypot(v1, v2)
    hue = np.arctan2(v2, v1)
    hue = np.where(hue < 0.0, hue + _TWO_PI, hue)
    hue = np.where(saturation == 0.0, 0.0, hue)
    mv = img.source_maxval
    return IhsTriple(Band(intensity, mv), Band(hue, mv), Band(saturation, mv))


def ihs_to_rgb(ihs: IhsTriple) -> MultibandImage:
    """Exact algebraic inverse of :func:`rgb_to_ihs`."""
    i = ihs.intensity.samples
    s = ihs.saturation.samples
    v1 = s * np.cos(ihs.hue.samples)
    v2 = s * np.sin(ihs.hue.samples)
    r = i - v1 / _SQRT6 + v2 / _SQRT2
    g = i - v1 / _SQRT6 - v2 / _SQRT2
    b = i + 2.0 * v1 / _SQRT6
    return MultibandImage.from_arrays([r, g, b], ihs.intensity.source_maxval)
