"""3x3 spatial filtering: box low-pass, unsharp masking, edge operators.

All convolutions keep the output the same size as the input by replicating
the border pixels (clamp-to-edge padding). Kernels are applied as printed,
i.e. as a sliding inner product without flipping.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .raster import Band

@dataclass(frozen=True)
class Kernel3x3:
    """A 3x3 array of finite real coefficients."""

    coefficients: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.coefficients, dtype=np.float64)
        if arr.shape != (3, 3):
            raise ParameterError(f"kernel must be 3x3, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ParameterError("kernel coefficients must be finite")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "coefficients", arr)


BOX = Kernel3x3(np.full((3, 3), 1.0 / 9.0))

SOBEL_GX = Kernel3x3([[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]])
SOBEL_GY = Kernel3x3([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])

# 4-neighbour discrete Laplacian, centre 5 (sums to 1). The 8-neighbour
# variant is provided for completeness but no pipeline consumes it.
LAPLACIAN = Kernel3x3([[0.0, -1.0, 0.0], [-1.0, 5.0, -1.0], [0.0, -1.0, 0.0]])
LAPLACIAN_ALT = Kernel3x3([[1.0, -2.0, 1.0], [-2.0, 5.0, -2.0], [1.0, -2.0, 1.0]])


@dataclass(frozen=True)
class EdgeField:
    """Gradient magnitude (>= 0) and direction (radians) planes."""

    magnitude: Band
    direction: Band

    def __post_init__(self):
        if (self.magnitude.width, self.magnitude.height) != (
            self.direction.width,
            self.direction.height,
        ):
            raise ParameterError("magnitude and direction dims differ")


def convolve3(band: Band, kernel: Kernel3x3) -> Band:
    """Same-size 3x3 convolution with replicate (clamp-to-edge) padding."""
    k = kernel.coefficients
    padded = np.pad(band.samples, 1, mode="edge")
    h, w = band.height, band.width
    out = np.zeros((h, w), dtype=np.float64)
    for i in range(3):
        for j in range(3):
            out += k[i, j] * padded[i : i + h, j : j + w]
    return band.with_samples(out)


def unsharp_mask(pan: Band) -> Band:
    """High-frequency detail plane: the image minus its 3x3 box average."""
    return pan.with_samples(pan.samples - convolve3(pan, BOX).samples)


def diff_horizontal(pan: Band) -> Band:
    """Absolute difference with the right neighbour; last column is 0."""
    out = np.zeros((pan.height, pan.width), dtype=np.float64)
    if pan.width >= 2:
        s = pan.samples
        out[:, :-1] = np.abs(s[:, :-1] - s[:, 1:])
    return pan.with_samples(out)


def diff_vertical(pan: Band) -> Band:
    """Absolute difference with the lower neighbour; last row is 0."""
    out = np.zeros((pan.height, pan.width), dtype=np.float64)
    if pan.height >= 2:
        s = pan.samples
        out[:-1, :] = np.abs(s[:-1, :] - s[1:, :])
    return pan.with_samples(out)


def diff_combined(pan: Band) -> Band:
    """|2*P(x,y) - P(x+1,y) - P(x,y+1)|; last row and column are 0."""
    out = np.zeros((pan.height, pan.width), dtype=np.float64)
    if pan.width >= 2 and pan.height >= 2:
        s = pan.samples
        out[:-1, :-1] = np.abs(2.0 * s[:-1, :-1] - s[:-1, 1:] - s[1:, :-1])
    return pan.with_samples(out)


def sobel(pan: Band) -> EdgeField:
    """Sobel gradient magnitude and direction.

    Direction is atan2(My, Mx) in (-pi, pi], pinned to 0 where both
    responses vanish.
    """
    mx = convolve3(pan, SOBEL_GX).samples
    my = convolve3(pan, SOBEL_GY).samples
    magnitude = np.hypot(mx, my)
    direction = np.where(magnitude == 0.0, 0.0, np.arctan2(my, mx))
    return EdgeField(pan.with_samples(magnitude), pan.with_samples(direction))


def laplacian_edges(pan: Band) -> Band:
    """Response of the 4-neighbour discrete Laplacian (may be negative)."""
    return convolve3(pan, LAPLACIAN)
