"""Core raster types, Netpbm (PGM/PPM) I/O and nearest/box resampling.

Samples are kept as double precision floats internally regardless of the
file bit depth; quantization (clamp to [0, maxval], round half away from
zero) happens only when a file is written. Binary 16-bit samples are
big-endian, following the Netpbm convention.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, NetpbmParseError, ParameterError

MAXVAL_LIMIT = 65535


def round_half_away(values):
    """Round to the nearest integer, halves away from zero."""
    values = np.asarray(values, dtype=np.float64)
    return np.sign(values) * np.floor(np.abs(values) + 0.5)


@dataclass(frozen=True)
class Band:
    """One real-valued 2-D raster plane.

    ``samples`` is a read-only (height, width) float64 array; every sample
    must be finite. ``source_maxval`` records the declared maximum of the
    file the data came from (255 for 8-bit, 65535 for 16-bit, ...).
    """

    samples: np.ndarray
    source_maxval: int = 255

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DimensionError(f"band must be 2-D and non-empty, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ParameterError("band samples must be finite (no NaN/Inf)")
        if not 1 <= int(self.source_maxval) <= MAXVAL_LIMIT:
            raise ParameterError(f"source_maxval {self.source_maxval} outside [1, {MAXVAL_LIMIT}]")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "source_maxval", int(self.source_maxval))

    @property
    def width(self):
        return self.samples.shape[1]

    @property
    def height(self):
        return self.samples.shape[0]

    def with_samples(self, samples) -> "Band":
        """New band with the same source_maxval and different samples."""
        return Band(samples, self.source_maxval)


@dataclass(frozen=True)
class MultibandImage:
    """Ordered list of same-sized bands (MS input, fused output)."""

    bands: tuple = field()

    def __post_init__(self):
        bands = tuple(self.bands)
        if not bands:
            raise DimensionError("image must have at least one band")
        w, h, mv = bands[0].width, bands[0].height, bands[0].source_maxval
        for i, b in enumerate(bands):
            if not isinstance(b, Band):
                raise ParameterError(f"band {i} is not a Band")
            if (b.width, b.height) != (w, h):
                raise DimensionError(
                    f"band {i} is {b.width}x{b.height}, expected {w}x{h}"
                )
            if b.source_maxval != mv:
                raise ParameterError(f"band {i} maxval {b.source_maxval} != {mv}")
        object.__setattr__(self, "bands", bands)

    @classmethod
    def from_arrays(cls, arrays, source_maxval=255) -> "MultibandImage":
        return cls(tuple(Band(a, source_maxval) for a in arrays))

    @property
    def width(self):
        return self.bands[0].width

    @property
    def height(self):
        return self.bands[0].height

    @property
    def source_maxval(self):
        return self.bands[0].source_maxval

    def __len__(self):
        return len(self.bands)

    def stacked(self):
        """Samples as a writable (bands, height, width) array copy."""
        return np.stack([b.samples for b in self.bands])


class _Scanner:
    """Tokenizer over the raw file bytes, tracking byte offsets.

    Whitespace separates tokens; ``#`` starts a comment running to the end
    of the line. Comments are treated as whitespace, so they may appear
    anywhere before the binary payload (and between ASCII samples).
    """

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def skip_space_and_comments(self):
        data, n = self.data, len(self.data)
        while self.pos < n:
            c = data[self.pos]
            if c == 0x23:  # '#'
                nl = data.find(b"\n", self.pos)
                self.pos = n if nl < 0 else nl + 1
            elif c in b" \t\r\n\v\f":
                self.pos += 1
            else:
                break

    def token(self, what):
        self.skip_space_and_comments()
        if self.pos >= len(self.data):
            raise NetpbmParseError(f"unexpected end of file reading {what}", self.pos)
        start = self.pos
        while self.pos < len(self.data):
            c = self.data[self.pos]
            if c in b" \t\r\n\v\f" or c == 0x23:
                break
            self.pos += 1
        return self.data[start : self.pos], start

    def integer(self, what):
        tok, start = self.token(what)
        try:
            return int(tok), start
        except ValueError:
            raise NetpbmParseError(f"invalid {what} {tok!r}", start) from None


def _parse_header(scanner, magics):
    magic, off = scanner.token("magic number")
    if magic not in magics:
        raise NetpbmParseError(
            f"unsupported magic {magic!r}, expected one of {sorted(m.decode() for m in magics)}",
            off,
        )
    width, off_w = scanner.integer("width")
    height, off_h = scanner.integer("height")
    if width < 1:
        raise NetpbmParseError(f"width {width} must be >= 1", off_w)
    if height < 1:
        raise NetpbmParseError(f"height {height} must be >= 1", off_h)
    maxval, off_m = scanner.integer("maxval")
    if not 1 <= maxval <= MAXVAL_LIMIT:
        raise NetpbmParseError(f"maxval {maxval} outside [1, {MAXVAL_LIMIT}]", off_m)
    return magic, width, height, maxval


def _read_ascii_samples(scanner, count, maxval):
    values = np.empty(count, dtype=np.float64)
    for i in range(count):
        v, off = scanner.integer("sample")
        if not 0 <= v <= maxval:
            raise NetpbmParseError(f"sample {v} outside [0, {maxval}]", off)
        values[i] = v
    return values

def _read_binary_samples(scanner, count, maxval):
    # Exactly one whitespace byte separates the maxval from the payload.
    data = scanner.data
    if scanner.pos >= len(data) or data[scanner.pos] not in b" \t\r\n\v\f":
        raise NetpbmParseError("expected single whitespace before binary payload", scanner.pos)
    start = scanner.pos + 1
    two_byte = maxval > 255
    need = count * (2 if two_byte else 1)
    payload = data[start : start + need]
    if len(payload) < need:
        raise NetpbmParseError(
            f"payload truncated: need {need} bytes, found {len(payload)}", len(data)
        )
    values = np.frombuffer(payload, dtype=">u2" if two_byte else "u1").astype(np.float64)
    bad = np.nonzero(values > maxval)[0]
    if bad.size:
        i = int(bad[0])
        raise NetpbmParseError(
            f"sample {int(values[i])} outside [0, {maxval}]",
            start + i * (2 if two_byte else 1),
        )
    return values


def _read_netpbm(path, magics):
    with open(path, "rb") as fh:
        data = fh.read()
    scanner = _Scanner(data)
    magic, width, height, maxval = _parse_header(scanner, magics)
    channels = 3 if magic in (b"P3", b"P6") else 1
    count = width * height * channels
    if magic in (b"P2", b"P3"):
        flat = _read_ascii_samples(scanner, count, maxval)
    else:
        flat = _read_binary_samples(scanner, count, maxval)
    return magic, width, height, maxval, flat


def read_pgm(path) -> Band:
    """Read a P2 (ASCII) or P5 (binary) grayscale file."""
    _, width, height, maxval, flat = _read_netpbm(path, {b"P2", b"P5"})
    return Band(flat.reshape(height, width), maxval)


def read_ppm(path) -> MultibandImage:
    """Read a P3 (ASCII) or P6 (binary) RGB file into three bands."""
    _, width, height, maxval, flat = _read_netpbm(path, {b"P3", b"P6"})
    pixels = flat.reshape(height, width, 3)
    return MultibandImage.from_arrays(
        [pixels[:, :, 0], pixels[:, :, 1], pixels[:, :, 2]], maxval
    )


def read_image(path) -> MultibandImage:
    """Read PGM or PPM, dispatching on the magic number (1 or 3 bands)."""
    magic, width, height, maxval, flat = _read_netpbm(path, {b"P2", b"P3", b"P5", b"P6"})
    if magic in (b"P2", b"P5"):
        return MultibandImage((Band(flat.reshape(height, width), maxval),))
    pixels = flat.reshape(height, width, 3)
    return MultibandImage.from_arrays(
        [pixels[:, :, 0], pixels[:, :, 1], pixels[:, :, 2]], maxval
    )


def quantize(samples, maxval):
    """Clamp to [0, maxval], then round half away from zero (uint32)."""
    clamped = np.clip(np.asarray(samples, dtype=np.float64), 0.0, float(maxval))
    return round_half_away(clamped).astype(np.uint32)


def _payload_bytes(quantized, maxval):
    if maxval > 255:
        return quantized.astype(">u2").tobytes()
    return quantized.astype("u1").tobytes()


def write_pgm(band: Band, path, maxval=None):
    """Write a binary (P5) grayscale file."""
    maxval = band.source_maxval if maxval is None else int(maxval)
    if not 1 <= maxval <= MAXVAL_LIMIT:
        raise ParameterError(f"maxval {maxval} outside [1, {MAXVAL_LIMIT}]")
    header = f"P5\n{band.width} {band.height}\n{maxval}\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(_payload_bytes(quantize(band.samples, maxval), maxval))


def write_ppm(img: MultibandImage, path, maxval=None):
    """Write a binary (P6) RGB file, re-interleaving bands[0..2]."""
    if len(img) != 3:
        raise DimensionError(f"PPM needs exactly 3 bands, got {len(img)}")
    maxval = img.source_maxval if maxval is None else int(maxval)
    if not 1 <= maxval <= MAXVAL_LIMIT:
        raise ParameterError(f"maxval {maxval} outside [1, {MAXVAL_LIMIT}]")
    interleaved = np.stack([b.samples for b in img.bands], axis=-1)
    header = f"P6\n{img.width} {img.height}\n{maxval}\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(_payload_bytes(quantize(interleaved, maxval), maxval))


def _upsample_plane(samples, factor):
    return np.repeat(np.repeat(samples, factor, axis=0), factor, axis=1)


def upsample_nearest(img: MultibandImage, factor: int) -> MultibandImage:
    """Replicate each pixel into a factor x factor block (no new values)."""
    factor = int(factor)
    if factor < 1:
        raise ParameterError(f"upsample factor {factor} must be >= 1")
    if factor == 1:
        return img
    return MultibandImage(
        tuple(b.with_samples(_upsample_plane(b.samples, factor)) for b in img.bands)
    )


def downsample_box(band: Band, factor: int) -> Band:
    """Each output pixel is the arithmetic mean of its factor x factor block."""
    factor = int(factor)
    if factor < 1:
        raise ParameterError(f"downsample factor {factor} must be >= 1")
    if factor == 1:
        return band
    h, w = band.height, band.width
    if h % factor or w % factor:
        raise DimensionError(f"dims {w}x{h} not divisible by factor {factor}")
    blocks = band.samples.reshape(h // factor, factor, w // factor, factor)
    return band.with_samples(blocks.mean(axis=(1, 3)))
