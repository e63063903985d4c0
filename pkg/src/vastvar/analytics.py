"""Summary statistics over GIRF arrays: peaks, size bands, and activeness.

The peak of a path is its entry of maximal absolute value, reported with its
sign; ties resolve to the smallest horizon. All percentiles use linear
interpolation (numpy's default, quantile type 7).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .girf import GirfResult


@dataclass(frozen=True)
class PeakSummary:
    variable: int
    sigma: float
    peak_value: float  # signed, reporting units (display sign may be flipped)
    peak_h: int
    p16: float
    p50: float
    p84: float


@dataclass(frozen=True)
class BandSummary:
    origin: int
    regime: str  # "small" | "large"
    sign: str  # "adverse" | "benign"
    mean_peak: float
    min_peak: float
    max_peak: float


def peak_response(path: np.ndarray) -> tuple[float, int]:
    """Signed entry of maximal absolute value and its horizon (ties: smallest h)."""
    path = np.asarray(path, dtype=float)
    if path.size == 0:
        raise ValueError("empty response path")
    h = int(np.argmax(np.abs(path)))
    return float(path[h]), h


def peak_table(girf: GirfResult, flip_benign: bool = False) -> list[PeakSummary]:
    """Per-(variable, sigma) peak statistics over draws of the time-averaged paths.

    Percentiles summarize the per-draw peak values; the reported horizon is the
    peak of the pointwise-median path. With `flip_benign`, rows for negative
    shocks are negated for display only (magnitudes and horizons unchanged).
    """
    D, S, _, M = girf.time_avg.shape
    out = []
    for si, sigma in enumerate(girf.sigmas):
        for m in range(M):
            peaks = np.array([peak_response(girf.time_avg[d, si, :, m])[0] for d in range(D)])
            median_path = np.median(girf.time_avg[:, si, :, m], axis=0)
            _, peak_h = peak_response(median_path)
            p16, p50, p84 = np.percentile(peaks, [16, 50, 84])
            value = float(np.percentile(peaks, 50))
            if flip_benign and sigma < 0:
                value, p16, p84 = -value, -p84, -p16
                p50 = -p50
            out.append(
                PeakSummary(
                    variable=m,
                    sigma=float(sigma),
                    peak_value=value,
                    peak_h=peak_h,
                    p16=float(p16),
                    p50=float(p50),
                    p84=float(p84),
                )
            )
    return out


def size_bands(
    girf: GirfResult,
    variable: int,
    sign: str,
    small: tuple[float, float] = (0.1, 1.5),
    large: tuple[float, float] = (1.5, 6.0),
) -> list[BandSummary]:
    """Per-origin min/mean/max of peak responses across each size regime.

    Peaks are taken on the posterior-median response path per (origin, sigma).
    The small band is closed, the large band half-open on the left.
    """
    if sign not in ("adverse", "benign"):
        raise ValueError(f"sign must be 'adverse' or 'benign', got {sign!r}")
    masks = {
        "small": (np.abs(girf.sigmas) >= small[0]) & (np.abs(girf.sigmas) <= small[1]),
        "large": (np.abs(girf.sigmas) > large[0]) & (np.abs(girf.sigmas) <= large[1]),
    }
    sign_mask = girf.sigmas > 0 if sign == "adverse" else girf.sigmas < 0
    median_paths = np.median(girf.responses[:, :, :, :, variable], axis=0)  # (O, S, H+1)
    out = []
    for regime, band_mask in masks.items():
        idx = np.nonzero(band_mask & sign_mask)[0]
        if idx.size == 0:
            raise ValueError(f"no shock scales in the {regime} {sign} regime")
        for o, origin in enumerate(girf.origins):
            peaks = np.array([peak_response(median_paths[o, si])[0] for si in idx])
            out.append(
                BandSummary(
                    origin=int(origin),
                    regime=regime,
                    sign=sign,
                    mean_peak=float(peaks.mean()),
                    min_peak=float(peaks.min()),
                    max_peak=float(peaks.max()),
                )
            )
    return out


def activeness(bands: list[BandSummary]) -> dict[int, float]:
    """Per-origin spread between the largest and smallest peak reaction.

    Computed over the union of the size regimes present in `bands`; all
    entries must share the same shock sign.
    """
    signs = {b.sign for b in bands}
    if len(signs) > 1:
        raise ValueError(f"bands mix shock signs: {sorted(signs)}")
    out: dict[int, float] = {}
    lo: dict[int, float] = {}
    hi: dict[int, float] = {}
    for b in bands:
        lo[b.origin] = min(lo.get(b.origin, np.inf), b.min_peak)
        hi[b.origin] = max(hi.get(b.origin, -np.inf), b.max_peak)
    for origin in lo:
        out[origin] = hi[origin] - lo[origin]
    return out
