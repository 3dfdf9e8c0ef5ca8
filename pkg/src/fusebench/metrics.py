"""Quality-assessment suite: SD, first-difference entropy, SNR, NRMSE,
deviation index and correlation coefficient, plus tabular report assembly.

Metrics that have no finite value for a given input pair (identical
images, constant bands, all-zero references) raise UndefinedMetricError;
:func:`assess` records them as explicit ``None`` markers, rendered as the
literal ``NA`` in CSV output.
"""

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, FusebenchError, ParameterError, UndefinedMetricError
from .raster import Band, MultibandImage, round_half_away
from .stats import global_stats, is_constant

CSV_HEADER = ("method", "band", "sd", "en", "snr", "nrmse", "di", "cc")

_DI_EPS = 1e-12


def _require_same_dims(fused: Band, reference: Band):
    if (fused.width, fused.height) != (reference.width, reference.height):
        raise DimensionError(
            f"fused is {fused.width}x{fused.height},"
            f" reference is {reference.width}x{reference.height}"
        )


def metric_sd(band: Band) -> float:
    """Population standard deviation of the band."""
    return global_stats(band).std


def metric_entropy(band: Band) -> float:
    """Shannon entropy (bits) of the horizontal first differences.

    Differences are rounded half away from zero to integers before
    histogramming; a constant band therefore scores 0 bits.
    """
    if band.width < 2:
        raise DimensionError("entropy needs width >= 2 for first differences")
    s = band.samples
    diffs = round_half_away(s[:, 1:] - s[:, :-1])
    _, counts = np.unique(diffs, return_counts=True)
    p = counts / diffs.size
    return float(-(p * np.log2(p)).sum())


def metric_snr(fused: Band, reference: Band) -> float:
    """sqrt(sum of squared fused values / sum of squared differences)."""
    _require_same_dims(fused, reference)
    noise = float(((fused.samples - reference.samples) ** 2).sum())
    if noise == 0.0:
        raise UndefinedMetricError("images are identical; SNR is infinite")
    signal = float((fused.samples ** 2).sum())
    return float(np.sqrt(signal / noise))


def metric_nrmse(fused: Band, reference: Band, normalize_by_maxval: bool = False) -> float:
    """RMSE normalized by 255 (or by the reference maxval when asked).

    The 255 denominator is fixed regardless of bit depth; pass
    ``normalize_by_maxval=True`` to scale by the reference's declared
    maximum instead.
    """
    _require_same_dims(fused, reference)
    scale = float(reference.source_maxval) if normalize_by_maxval else 255.0
    mse = float(((fused.samples - reference.samples) ** 2).mean())
    return float(np.sqrt(mse)) / scale


def metric_di(fused: Band, reference: Band) -> float:
    """Mean of |fused - reference| / reference over usable pixels.

    Pixels whose reference magnitude is below 1e-12 are excluded; the mean
    divides by the count of included pixels.
    """
    _require_same_dims(fused, reference)
    ref = reference.samples
    mask = np.abs(ref) > _DI_EPS
    if not mask.any():
        raise UndefinedMetricError("all reference pixels are zero; DI undefined")
    return float((np.abs(fused.samples[mask] - ref[mask]) / ref[mask]).mean())


def metric_cc(fused: Band, reference: Band) -> float:
    """Pearson correlation coefficient, in [-1, 1]."""
    _require_same_dims(fused, reference)
    if is_constant(fused) or is_constant(reference):
        raise UndefinedMetricError("correlation undefined for a constant band")
    f = fused.samples - fused.samples.mean()
    m = reference.samples - reference.samples.mean()
    denom = np.sqrt((f * f).sum()) * np.sqrt((m * m).sum())
    return float(np.clip((f * m).sum() / denom, -1.0, 1.0))


@dataclass(frozen=True)
class MetricRow:
    """One band's metrics; comparative entries are None when undefined."""

    method: str
    band: int
    sd: float
    en: float | None
    snr: float | None
    nrmse: float | None
    di: float | None
    cc: float | None


@dataclass(frozen=True)
class MetricsReport:
    rows: tuple

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))


def _guarded(fn, *args):
    try:
        return fn(*args)
    except FusebenchError:
        return None


def assess(fused: MultibandImage, reference: MultibandImage, label: str) -> MetricsReport:
    """Per-band report: SD/En of the fused bands, SNR/NRMSE/DI/CC of fused
    against reference. Band indices are 1-based in the rows."""
    if len(fused) != len(reference):
        raise DimensionError(
            f"band count mismatch: fused has {len(fused)}, reference has {len(reference)}"
        )
    rows = []
    for k, (f, m) in enumerate(zip(fused.bands, reference.bands), start=1):
        _require_same_dims(f, m)
        rows.append(
            MetricRow(
                method=label,
                band=k,
                sd=metric_sd(f),
                en=_guarded(metric_entropy, f),
                snr=_guarded(metric_snr, f, m),
                nrmse=_guarded(metric_nrmse, f, m),
                di=_guarded(metric_di, f, m),
                cc=_guarded(metric_cc, f, m),
            )
        )
    return MetricsReport(tuple(rows))


def _format_value(value) -> str:
    if value is None:
        return "NA"
    return f"{value:.6g}"


def format_csv(report: MetricsReport, header: bool = True) -> str:
    """Render a report as CSV text (6 significant digits, NA for undefined)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow(CSV_HEADER)
    for r in report.rows:
        writer.writerow(
            [r.method, r.band]
            + [_format_value(v) for v in (r.sd, r.en, r.snr, r.nrmse, r.di, r.cc)]
        )
    return buf.getvalue()


def write_csv(report: MetricsReport, path, append: bool = False):
    """Write (or append to) a metrics CSV.

    Appending to an existing file requires its first line to match the
    standard header exactly.
    """
    expected = ",".join(CSV_HEADER)
    if append:
        try:
            with open(path, "r", encoding="ascii") as fh:
                first = fh.readline().rstrip("\n")
        except FileNotFoundError:
            first = None
        if first is not None:
            if first != expected:
                raise ParameterError(
                    f"cannot append: existing header {first!r} != {expected!r}"
                )
            with open(path, "a", encoding="ascii", newline="") as fh:
                fh.write(format_csv(report, header=False))
            return
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(format_csv(report, header=True))
