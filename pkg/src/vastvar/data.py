"""CSV ingestion, variable transforms, standardization, and lag-matrix construction.

Estimation always runs on standardized data. Each column records the mean and
standard deviation of its transformed (pre-standardization) series so that
responses can be reported back in transformed units.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
import pandas as pd

from .errors import DataError

COUNTRIES = ("US", "EA", "UK", "GLOBAL")
TRANSFORMS = ("level", "log", "log_diff")
BLOCKS = ("macro", "policy_rate", "ebp", "long_yield", "equity", "fx")

# Blocks ordered before the financial-conditions variable react with a one-month
# delay to the financial shock; blocks after it may react contemporaneously.
SLOW_BLOCKS = ("macro", "policy_rate")
FAST_BLOCKS = ("long_yield", "equity", "fx")


@dataclass(frozen=True)
class VariableMeta:
    name: str
    country: str
    transform: str
    block: str
    order_index: int
    scale_sd: float = float("nan")
    scale_mean: float = float("nan")

    def __post_init__(self):
        if self.country not in COUNTRIES:
            raise DataError(f"unknown country {self.country!r} for variable {self.name!r}")
        if self.transform not in TRANSFORMS:
            raise DataError(f"unknown transform {self.transform!r} for variable {self.name!r}")
        if self.block not in BLOCKS:
            raise DataError(f"unknown block {self.block!r} for variable {self.name!r}")
        if self.order_index < 0:
            raise DataError(f"order_index must be >= 0 for variable {self.name!r}")


def validate_ordering(meta: Sequence[VariableMeta]) -> None:
    """Check the recursive-ordering contract on a schema."""
    orders = sorted(m.order_index for m in meta)
    if orders != list(range(len(meta))):
        raise DataError("order_index values must be a permutation of 0..M-1")
    ebp = [m for m in meta if m.block == "ebp"]
    if len(ebp) != 1:
        raise DataError(f"exactly one variable must have block 'ebp', found {len(ebp)}")
    ebp_pos = ebp[0].order_index
    for m in meta:
        if m.block in SLOW_BLOCKS and m.order_index >= ebp_pos:
            raise DataError(
                f"variable {m.name!r} (block {m.block}) must be ordered before the ebp variable"
            )
        if m.block in FAST_BLOCKS and m.order_index <= ebp_pos:
            raise DataError(
                f"variable {m.name!r} (block {m.block}) must be ordered after the ebp variable"
            )


@dataclass(frozen=True)
class PanelDataset:
    """Standardized T x M data matrix with per-variable metadata.

    Columns are ordered by ``order_index``; each column has mean 0 and sd 1.
    """

    dates: np.ndarray
    values: np.ndarray
    meta: tuple[VariableMeta, ...]

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def M(self) -> int:
        return self.values.shape[1]

    @property
    def scale_sd(self) -> np.ndarray:
        return np.array([m.scale_sd for m in self.meta])

    @property
    def scale_mean(self) -> np.ndarray:
        return np.array([m.scale_mean for m in self.meta])

    def ebp_index(self) -> int:
        return next(i for i, m in enumerate(self.meta) if m.block == "ebp")

    def destandardize(self, col: int, series: np.ndarray) -> np.ndarray:
        m = self.meta[col]
        return series * m.scale_sd + m.scale_mean


@dataclass(frozen=True)
class DesignMatrix:
    """Lagged regressor matrix X with row t holding (Y'_{t-1}, ..., Y'_{t-P})."""

    X: np.ndarray
    Y: np.ndarray
    P: int
    lag_labels: tuple[tuple[int, int], ...]  # (variable index, lag)

    @property
    def T_eff(self) -> int:
        return self.Y.shape[0]

    @property
    def M(self) -> int:
        return self.Y.shape[1]

    @property
    def K(self) -> int:
        return self.X.shape[1]


def load_csv(path, schema: Sequence[VariableMeta]) -> pd.DataFrame:
    """Read a CSV with a YYYY-MM date column and one numeric column per schema entry.

    Rows are sorted by date. Missing columns, unparseable or duplicate dates,
    and interior missing values are hard errors.
    """
    raw = pd.read_csv(path)
    if "date" not in raw.columns:
        raise DataError(f"{path}: column not found: 'date'")
    for m in schema:
        if m.name not in raw.columns:
            raise DataError(f"{path}: column not found: {m.name!r}")
    try:
        dates = pd.PeriodIndex(raw["date"].astype(str), freq="M")
    except Exception as exc:
        raise DataError(f"{path}: unparseable date in 'date' column: {exc}") from exc
    if dates.duplicated().any():
        dup = dates[dates.duplicated()][0]
        raise DataError(f"{path}: duplicate date {dup}")
    table = raw[[m.name for m in schema]].copy()
    table.index = dates
    table = table.sort_index()
    for name in table.columns:
        col = pd.to_numeric(table[name], errors="coerce")
        if col.isna().any():
            when = table.index[col.isna()][0]
            raise DataError(f"{path}: missing or non-numeric value for {name!r} at {when}")
        table[name] = col.astype(float)
    return table


def transform_and_standardize(raw: pd.DataFrame, schema: Sequence[VariableMeta]) -> PanelDataset:
    """Apply level/log/100*dlog transforms, then standardize each column.

    If any variable uses log_diff, the first row is dropped for all columns
    jointly so the panel stays balanced.
    """
    validate_ordering(schema)
    ordered = sorted(schema, key=lambda m: m.order_index)
    any_diff = any(m.transform == "log_diff" for m in ordered)

    cols = []
    for m in ordered:
        x = raw[m.name].to_numpy(dtype=float)
        if m.transform in ("log", "log_diff"):
            bad = np.nonzero(x <= 0.0)[0]
            if bad.size:
                raise DataError(
                    f"nonpositive value for {m.name!r} at {raw.index[bad[0]]} under {m.transform}"
                )
        if m.transform == "level":
            y = x
        elif m.transform == "log":
            y = np.log(x)
        else:  # log_diff, in percentage points
            y = 100.0 * np.diff(np.log(x))
        cols.append(y)

    if any_diff:
        n = min(len(c) for c in cols)
        cols = [c[-n:] for c in cols]
        dates = raw.index[-n:]
    else:
        dates = raw.index

    values = np.column_stack(cols)
    meta_out = []
    for i, m in enumerate(ordered):
        mu = float(np.mean(values[:, i]))
        sd = float(np.std(values[:, i], ddof=1))
        if sd <= 0.0 or not np.isfinite(sd):
            raise DataError(f"variable {m.name!r} has zero variance, cannot standardize")
        values[:, i] = (values[:, i] - mu) / sd
        meta_out.append(replace(m, scale_mean=mu, scale_sd=sd))

    return PanelDataset(
        dates=np.asarray(dates.astype(str)),
        values=values,
        meta=tuple(meta_out),
    )


def build_design(data: PanelDataset, P: int) -> DesignMatrix:
    """Stack P lags of the panel into the regressor matrix.

    X[t, (p-1)*M + m] = values[t + P - p, m].
    """
    if P < 1:
        raise DataError(f"lag order must be >= 1, got {P}")
    T, M = data.values.shape
    if T <= P:
        raise DataError(f"need T > P rows, got T={T}, P={P}")
    T_eff = T - P
    K = M * P
    X = np.empty((T_eff, K))
    labels = []
    for p in range(1, P + 1):
        X[:, (p - 1) * M : p * M] = data.values[P - p : T - p, :]
        labels.extend((m, p) for m in range(M))
    Y = data.values[P:, :]
    ptp = X.max(axis=0) - X.min(axis=0)
    if np.any(ptp == 0.0):
        n = int(np.argmax(ptp == 0.0))
        var, lag = labels[n]
        raise DataError(
            f"constant design column: variable {data.meta[var].name!r} at lag {lag}"
        )
    return DesignMatrix(X=X, Y=Y, P=P, lag_labels=tuple(labels))


def default_schema() -> list[VariableMeta]:
    """The 18-variable three-country schema (US, EA, UK).

    Per country: industrial production (log), CPI (log-diff), shadow rate
    (level), 10y yield (level), equity index (log); plus the US excess bond
    premium and two exchange rates. Within the fast block the order is
    yields, then exchange rates, then equities.
    """
    entries = [
        # slow block: activity, prices, policy stance
        ("ip_us", "US", "log", "macro"),
        ("cpi_us", "US", "log_diff", "macro"),
        ("sr_us", "US", "level", "policy_rate"),
        ("ip_ea", "EA", "log", "macro"),
        ("cpi_ea", "EA", "log_diff", "macro"),
        ("sr_ea", "EA", "level", "policy_rate"),
        ("ip_uk", "UK", "log", "macro"),
        ("cpi_uk", "UK", "log_diff", "macro"),
        ("sr_uk", "UK", "level", "policy_rate"),
        # financial conditions
        ("ebp_us", "US", "level", "ebp"),
        # fast block: yields, fx, equities
        ("gb10_us", "US", "level", "long_yield"),
        ("gb10_ea", "EA", "level", "long_yield"),
        ("gb10_uk", "UK", "level", "long_yield"),
        ("fx_eurusd", "GLOBAL", "log", "fx"),
        ("fx_gbpusd", "GLOBAL", "log", "fx"),
        ("eq_us", "US", "log", "equity"),
        ("eq_ea", "EA", "log", "equity"),
        ("eq_uk", "UK", "log", "equity"),
    ]
    return [
        VariableMeta(name=n, country=c, transform=t, block=b, order_index=i)
        for i, (n, c, t, b) in enumerate(entries)
    ]


def schema_from_json(entries: Sequence[dict]) -> list[VariableMeta]:
    """Build a schema from a parsed JSON list of variable descriptions."""
    metas = []
    for i, e in enumerate(entries):
        try:
            metas.append(
                VariableMeta(
                    name=e["name"],
                    country=e["country"],
                    transform=e["transform"],
                    block=e["block"],
                    order_index=int(e.get("order_index", i)),
                )
            )
        except KeyError as exc:
            raise DataError(f"schema entry {i} missing field {exc}") from exc
    validate_ordering(metas)
    return metas
