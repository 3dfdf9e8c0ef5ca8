"""Band statistics: global and windowed moments, mean/std matching,
covariance of 3-band images.

All standard deviations are population ones (divide by the pixel count,
not the pixel count minus one).
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSourceError, DimensionError, ParameterError
from .raster import Band, MultibandImage


@dataclass(frozen=True)
class BandStats:
    mean: float
    std: float


@dataclass(frozen=True)
class Covariance3:
    """Symmetric positive semidefinite 3x3 scatter/covariance matrix."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=np.float64)
        if arr.shape != (3, 3):
            raise ParameterError(f"covariance must be 3x3, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ParameterError("covariance entries must be finite")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)


def is_constant(band: Band) -> bool:
    """True if every sample equals the first (exact comparison)."""
    s = band.samples
    return bool(np.all(s == s.flat[0]))


def global_stats(band: Band) -> BandStats:
    """Population mean and standard deviation of the whole band.

    A constant band reports std exactly 0.0 even when its value is not a
    dyadic rational, keeping "std == 0 iff constant" reliable.
    """
    if is_constant(band):
        return BandStats(float(band.samples.flat[0]), 0.0)
    s = band.samples
    mean = float(s.mean())
    return BandStats(mean, float(math.sqrt(np.mean((s - mean) ** 2))))


def local_stats(band: Band, window: int = 3):
    """Per-pixel mean and std over a replicate-padded window x window patch.

    Returns a (means, stds) pair of bands. The window must be odd and >= 1.
    """
    window = int(window)
    if window < 1 or window % 2 == 0:
        raise ParameterError(f"window {window} must be odd and >= 1")
    if window == 1:
        return band, band.with_samples(np.zeros_like(band.samples))
    half = window // 2
    # Accumulate around the global mean to tame cancellation in E[x^2]-E[x]^2.
    center = float(band.samples.mean())
    padded = np.pad(band.samples - center, half, mode="edge")
    h, w = band.height, band.width
    total = np.zeros((h, w), dtype=np.float64)
    total_sq = np.zeros((h, w), dtype=np.float64)
    for i in range(window):
        for j in range(window):
            patch = padded[i : i + h, j : j + w]
            total += patch
            total_sq += patch * patch
    n = float(window * window)
    means = total / n
    variances = np.maximum(total_sq / n - means * means, 0.0)
    return band.with_samples(means + center), band.with_samples(np.sqrt(variances))


def match_mean_std(src: Band, target: BandStats) -> Band:
    """Affine remap of ``src`` so its global mean/std equal ``target``'s.

    An order-preserving map when the target std is positive. A constant
    source can only be matched to a zero-std target.
    """
    src_stats = global_stats(src)
    if src_stats.std == 0.0:
        if target.std == 0.0:
            return src.with_samples(np.full_like(src.samples, target.mean))
        raise DegenerateSourceError(
            "cannot stretch a constant band to a nonzero standard deviation"
        )
    gain = target.std / src_stats.std
    return src.with_samples(target.mean + (src.samples - src_stats.mean) * gain)


def covariance3(img: MultibandImage, normalize: bool = True) -> Covariance3:
    """Scatter matrix of the per-pixel 3-vectors about the mean signature.

    With ``normalize`` (the default) the accumulated outer products are
    divided by the pixel count, giving the population covariance; the raw
    scatter is available with ``normalize=False``. Eigenvector directions
    are identical either way.
    """
    if len(img) != 3:
        raise DimensionError(f"covariance needs exactly 3 bands, got {len(img)}")
    data = img.stacked().reshape(3, -1)
    centered = data - data.mean(axis=1, keepdims=True)
    scatter = centered @ centered.T
    if normalize:
        scatter /= data.shape[1]
    # Accumulated dot products are symmetric up to rounding; make it exact.
    return Covariance3((scatter + scatter.T) / 2.0)


def correlation3(img: MultibandImage) -> Covariance3:
    """Correlation matrix of the 3 bands (unit diagonal)."""
    cov = covariance3(img, normalize=True).entries
    sigmas = np.sqrt(np.diag(cov))
    if np.any(sigmas == 0.0):
        raise DegenerateSourceError("correlation undefined for a constant band")
    outer = np.outer(sigmas, sigmas)
    return Covariance3(cov / outer)
