"""End-to-end fusion methods: segment fusion, PCA fusion and edge fusion.

All three expect the MS image already resampled to the PAN grid; use
:func:`fusebench.raster.upsample_nearest` (or :func:`run_fusion`, which
does it for you) to get there. No clamping happens here; values are
quantized only when written to a file.
"""

import time
from dataclasses import dataclass

from .colorspace import IhsTriple, ihs_to_rgb, rgb_to_ihs
from .errors import DimensionError, ParameterError
from .filters import BOX, convolve3, laplacian_edges, sobel, unsharp_mask
from .pca import basis_of, pc1_substitute, pca_forward, pca_inverse
from .raster import Band, MultibandImage, read_pgm, read_ppm, upsample_nearest, write_ppm
from .stats import global_stats, match_mean_std

METHODS = ("sf", "pca", "ef")
EDGE_OPERATORS = ("sobel", "laplacian", "sum_of_both")


@dataclass(frozen=True)
class FusionConfig:
    method: str
    edge_operator: str = "sum_of_both"
    pca_standardized: bool = False
    upsample_factor: int = 1

    def __post_init__(self):
        if self.method not in METHODS:
            raise ParameterError(f"method {self.method!r} not one of {METHODS}")
        if self.edge_operator not in EDGE_OPERATORS:
            raise ParameterError(
                f"edge operator {self.edge_operator!r} not one of {EDGE_OPERATORS}"
            )
        if int(self.upsample_factor) < 1:
            raise ParameterError(f"upsample factor {self.upsample_factor} must be >= 1")


@dataclass(frozen=True)
class FusionSummary:
    method: str
    width: int
    height: int
    bands: int
    elapsed_s: float


def _require_same_dims(ms: MultibandImage, pan: Band):
    if (ms.width, ms.height) != (pan.width, pan.height):
        raise DimensionError(
            f"MS is {ms.width}x{ms.height} but PAN is {pan.width}x{pan.height};"
            " upsample the MS image first"
        )


def _recompose(ms_ihs: IhsTriple, i_star: Band) -> MultibandImage:
    """Match the enhanced intensity to the original intensity stats and
    invert with the untouched hue/saturation planes."""
    i_new = match_mean_std(i_star, global_stats(ms_ihs.intensity))
    return ihs_to_rgb(IhsTriple(i_new, ms_ihs.hue, ms_ihs.saturation))


def fuse_sf(ms: MultibandImage, pan: Band) -> MultibandImage:
    """Segment fusion: low-passed MS intensity plus unsharp-masked PAN.

    Only the intensity plane is touched, so the chromaticity of the MS
    input passes through unchanged, and its intensity mean/std are
    restored exactly by the matching step.
    """
    _require_same_dims(ms, pan)
    ihs = rgb_to_ihs(ms)
    i_lpf = convolve3(ihs.intensity, BOX)
    p_usm = unsharp_mask(pan)
    i_star = i_lpf.with_samples(i_lpf.samples + p_usm.samples)
    return _recompose(ihs, i_star)


def fuse_pca(ms: MultibandImage, pan: Band, standardized: bool = False) -> MultibandImage:
    """PCA fusion: substitute the stats-matched PAN for PC1 and invert."""
    _require_same_dims(ms, pan)
    basis = basis_of(ms, standardized)
    pcs = pca_forward(ms, basis)
    return pca_inverse(pc1_substitute(pcs, pan), basis)


def edge_detail(pan: Band, edge_operator: str = "sum_of_both") -> Band:
    """PAN edge response reduced to an additive high-frequency plane.

    The raw Sobel magnitude is nonnegative and the Laplacian response
    rides on the local brightness, so each response has its own box
    average subtracted before injection.
    """
    if edge_operator not in EDGE_OPERATORS:
        raise ParameterError(f"edge operator {edge_operator!r} not one of {EDGE_OPERATORS}")
    if edge_operator == "sobel":
        response = sobel(pan).magnitude
    elif edge_operator == "laplacian":
        response = laplacian_edges(pan)
    else:
        response = pan.with_samples(
            sobel(pan).magnitude.samples + laplacian_edges(pan).samples
        )
    return unsharp_mask(response)


def fuse_ef(ms: MultibandImage, pan: Band, edge_operator: str = "sum_of_both") -> MultibandImage:
    """Edge fusion: low-passed MS intensity plus PAN edge detail."""
    _require_same_dims(ms, pan)
    detail = edge_detail(pan, edge_operator)
    ihs = rgb_to_ihs(ms)
    i_lpf = convolve3(ihs.intensity, BOX)
    i_star = i_lpf.with_samples(i_lpf.samples + detail.samples)
    return _recompose(ihs, i_star)


def fuse(ms: MultibandImage, pan: Band, config: FusionConfig) -> MultibandImage:
    """Dispatch to the configured method (MS already on the PAN grid)."""
    if config.method == "sf":
        return fuse_sf(ms, pan)
    if config.method == "pca":
        return fuse_pca(ms, pan, config.pca_standardized)
    return fuse_ef(ms, pan, config.edge_operator)


def run_fusion(config: FusionConfig, ms_path, pan_path, out_path) -> FusionSummary:
    """Load, upsample, fuse and write one MS/PAN pair.

    The MS image is nearest-neighbour upsampled by the configured factor
    and must then match the PAN dimensions exactly. The fused image is
    written as a binary PPM at the MS image's maxval.
    """
    start = time.perf_counter()
    ms = read_ppm(ms_path)
    pan = read_pgm(pan_path)
    ms_up = upsample_nearest(ms, config.upsample_factor)
    if (ms_up.width, ms_up.height) != (pan.width, pan.height):
        raise DimensionError(
            f"MS {ms.width}x{ms.height} times factor {config.upsample_factor}"
            f" is {ms_up.width}x{ms_up.height}, but PAN is {pan.width}x{pan.height}"
        )
    fused = fuse(ms_up, pan, config)
    write_ppm(fused, out_path, ms.source_maxval)
    return FusionSummary(
        config.method, fused.width, fused.height, len(fused), time.perf_counter() - start
    )
