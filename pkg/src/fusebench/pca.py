"""Symmetric 3x3 eigendecomposition and the PCA fusion transforms.

The eigensolver is a cyclic Jacobi rotation scheme: tiny, dependency-free
and accurate to machine precision for 3x3 inputs. Eigenvectors follow a
deterministic sign convention so repeated runs produce identical bases.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, ParameterError
from .raster import Band, MultibandImage
from .stats import Covariance3, correlation3, covariance3, global_stats, match_mean_std

_OFFDIAG_TOL = 1e-13
_MAX_SWEEPS = 50


@dataclass(frozen=True)
class PcaBasis:
    """Eigenvalues (descending) and orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.eigenvalues, dtype=np.float64)
        vecs = np.asarray(self.eigenvectors, dtype=np.float64)
        if vals.shape != (3,) or vecs.shape != (3, 3):
            raise ParameterError("basis needs 3 eigenvalues and a 3x3 eigenvector matrix")
        vals, vecs = vals.copy(), vecs.copy()
        vals.flags.writeable = False
        vecs.flags.writeable = False
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "eigenvectors", vecs)


@dataclass(frozen=True)
class PcImage:
    """The three principal-component planes of one 3-band image."""

    pcs: tuple

    def __post_init__(self):
        pcs = tuple(self.pcs)
        if len(pcs) != 3:
            raise DimensionError(f"expected 3 principal components, got {len(pcs)}")
        dims = (pcs[0].width, pcs[0].height)
        for i, p in enumerate(pcs):
            if (p.width, p.height) != dims:
                raise DimensionError(f"PC{i + 1} dims differ from PC1")
        object.__setattr__(self, "pcs", pcs)


def _rotate(a, v, p, q):
    """One Jacobi rotation zeroing a[p, q] (and a[q, p])."""
    apq = a[p, q]
    if apq == 0.0:
        return
    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    rot = np.eye(3)
    rot[p, p] = rot[q, q] = c
    rot[p, q] = s
    rot[q, p] = -s
    a[:] = rot.T @ a @ rot
    a[p, q] = a[q, p] = 0.0
    v[:] = v @ rot


def eigen_sym3(cov: Covariance3) -> PcaBasis:
    """Full eigendecomposition of a symmetric 3x3 matrix.

    Eigenvalues come out in descending order; each eigenvector is flipped
    so its largest-magnitude component is positive (first such component
    on exact ties).
    """
    a = np.array(cov.entries, dtype=np.float64)
    asym = float(np.max(np.abs(a - a.T)))
    if asym > 1e-9 * max(1.0, float(np.max(np.abs(a)))):
        raise ParameterError(f"matrix asymmetry {asym:g} exceeds tolerance")
    a = (a + a.T) / 2.0
    scale = float(np.max(np.abs(a)))
    v = np.eye(3)
    if scale > 0.0:
        for _ in range(_MAX_SWEEPS):
            off = math.sqrt(a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2)
            if off <= _OFFDIAG_TOL * scale:
                break
            for p, q in ((0, 1), (0, 2), (1, 2)):
                _rotate(a, v, p, q)
    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = v[:, order]
    for k in range(3):
        lead = int(np.argmax(np.abs(vectors[:, k])))
        if vectors[lead, k] < 0.0:
            vectors[:, k] = -vectors[:, k]
    return PcaBasis(values, vectors)


def basis_of(img: MultibandImage, standardized: bool = False) -> PcaBasis:
    """Basis from the covariance matrix, or the correlation matrix when
    ``standardized`` is set."""
    matrix = correlation3(img) if standardized else covariance3(img)
    return eigen_sym3(matrix)


def pca_forward(img: MultibandImage, basis: PcaBasis) -> PcImage:
    """Project bands onto the eigenvector axes: PC_k = sum_j v_jk * band_j.

    The projection is applied to the raw digital numbers, without mean
    centering; only the covariance that produced the basis is centered.
    """
    if len(img) != 3:
        raise DimensionError(f"PCA transform needs exactly 3 bands, got {len(img)}")
    data = img.stacked().reshape(3, -1)
    pcs = basis.eigenvectors.T @ data
    h, w = img.height, img.width
    mv = img.source_maxval
    return PcImage(tuple(Band(pcs[k].reshape(h, w), mv) for k in range(3)))


def pca_inverse(pcs: PcImage, basis: PcaBasis) -> MultibandImage:
    """Back-projection; the eigenvector matrix is orthogonal, so the
    inverse is its transpose."""
    data = np.stack([p.samples.ravel() for p in pcs.pcs])
    bands = basis.eigenvectors @ data
    h, w = pcs.pcs[0].height, pcs.pcs[0].width
    mv = pcs.pcs[0].source_maxval
    return MultibandImage.from_arrays([bands[k].reshape(h, w) for k in range(3)], mv)


def pc1_substitute(pcs: PcImage, pan: Band) -> PcImage:
    """Replace PC1 by the PAN band matched to PC1's mean and std."""
    pc1 = pcs.pcs[0]
    if (pan.width, pan.height) != (pc1.width, pc1.height):
        raise DimensionError(
            f"PAN is {pan.width}x{pan.height}, PCs are {pc1.width}x{pc1.height}"
        )
    matched = match_mean_std(pan, global_stats(pc1))
    return PcImage((pc1.with_samples(matched.samples), pcs.pcs[1], pcs.pcs[2]))


def pca_fuse_merged(ms: MultibandImage, pan: Band, standardized: bool = False) -> MultibandImage:
    """Single-expression PCA fusion.

    fused_k = ms_k + (pan_matched - PC1) * v1_k, with pan matched to PC1's
    stats and v1 the first eigenvector. Algebraically identical to the
    explicit forward / substitute / inverse route.
    """
    if (pan.width, pan.height) != (ms.width, ms.height):
        raise DimensionError(
            f"PAN is {pan.width}x{pan.height}, MS is {ms.width}x{ms.height}"
        )
    basis = basis_of(ms, standardized)
    v1 = basis.eigenvectors[:, 0]
    data = ms.stacked().reshape(3, -1)
    pc1 = Band((basis.eigenvectors[:, 0] @ data).reshape(ms.height, ms.width), ms.source_maxval)
    matched = match_mean_std(pan, global_stats(pc1))
    detail = matched.samples - pc1.samples
    fused = [ms.bands[k].samples + detail * v1[k] for k in range(3)]
    return MultibandImage.from_arrays(fused, ms.source_maxval)
