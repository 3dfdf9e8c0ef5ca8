"""Synthetic reference scenes and reference degradation.

The built-in scene is a deterministic seeded composition of per-band
gradients, random rectangles, bar edges and a shared fine texture. Its
default size (600 x 525, reducible by a factor of 5 to 120 x 105) lets the
whole bench run without any external imagery: the reference is degraded
into a PAN/MS pair, fused back and scored against itself.
"""

import numpy as np

from .colorspace import rgb_to_ihs
from .filters import BOX, convolve3
from .raster import Band, MultibandImage, downsample_box

DEFAULT_SCENE_SEED = 20110915
DEFAULT_SCENE_SIZE = (600, 525)


def synthetic_scene(width: int = 600, height: int = 525, seed: int = DEFAULT_SCENE_SEED) -> MultibandImage:
    """Deterministic RGB test scene with blocks, gradients and edges.

    The three bands share one fine high-frequency texture (with different
    gains) but carry distinct low-frequency structure, so nearest-neighbour
    degradation loses recoverable detail and the spectral bands stay
    heterogeneous.
    """
    rng = np.random.default_rng(seed)
    u = np.tile(np.linspace(0.0, 1.0, width), (height, 1))
    v = np.tile(np.linspace(0.0, 1.0, height)[:, None], (1, width))
    radial = np.hypot(u - 0.5, v - 0.5) / np.hypot(0.5, 0.5)

    planes = [
        85.0 + 80.0 * u,
        75.0 + 70.0 * v,
        150.0 - 85.0 * radial,
    ]

    # Random rectangles with independent per-band amplitudes.
    for _ in range(45):
        bw = int(rng.integers(8, width // 3))
        bh = int(rng.integers(8, height // 3))
        x0 = int(rng.integers(0, width - bw))
        y0 = int(rng.integers(0, height - bh))
        for plane, amp in zip(planes, rng.uniform(-35.0, 35.0, size=3)):
            plane[y0 : y0 + bh, x0 : x0 + bw] += amp

    # Thin high-contrast bars, off the coarse 5-pixel grid on purpose.
    for _ in range(8):
        x0 = int(rng.integers(2, width - 9))
        bw = int(rng.integers(2, 7))
        base = float(rng.uniform(25.0, 45.0)) * float(rng.choice((-1.0, 1.0)))
        for plane, gain in zip(planes, rng.uniform(0.7, 1.3, size=3)):
            plane[:, x0 : x0 + bw] += base * gain
    for _ in range(8):
        y0 = int(rng.integers(2, height - 9))
        bh = int(rng.integers(2, 7))
        base = float(rng.uniform(25.0, 45.0)) * float(rng.choice((-1.0, 1.0)))
        for plane, gain in zip(planes, rng.uniform(0.7, 1.3, size=3)):
            plane[y0 : y0 + bh, :] += base * gain

    # Diagonal step.
    step = (u + v) < 0.4
    for plane, amp in zip(planes, (22.0, -18.0, 15.0)):
        plane[step] += amp

    # Shared fine texture; one box pass stretches its correlation length to
    # a couple of pixels, still well under the degradation block size.
    noise = rng.normal(0.0, 1.0, size=(height, width))
    texture = convolve3(Band(noise), BOX).samples
    for plane, gain in zip(planes, (11.0, 13.0, 9.0)):
        plane += gain * texture

    # Keep everything in-gamut with a healthy margin above zero so that
    # relative-deviation metrics stay well conditioned.
    return MultibandImage.from_arrays([np.clip(p, 5.0, 250.0) for p in planes], 255)


def degrade_reference(reference: MultibandImage, factor: int):
    """Split a reference RGB into a (PAN, MS) pair.

    PAN is the reference's intensity plane at full resolution; MS is the
    reference box-downsampled by ``factor``. Both dimensions of the
    reference must be divisible by the factor.

    Returns the pair as in-memory real-valued images; quantization is left
    to the file writers.
    """
    pan = rgb_to_ihs(reference).intensity
    ms = MultibandImage(tuple(downsample_box(b, factor) for b in reference.bands))
    return pan, ms
