"""Price series, log-returns and integrated profiles."""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "PriceSeries",
    "ReturnSeries",
    "Profile",
    "log_returns",
    "profile",
]


@dataclass(frozen=True, eq=False)
class PriceSeries:
    """Daily closing values of one index.

    Dates must be strictly increasing (calendar gaps are fine, each recorded
    row is one step) and every close must be positive.
    """

    dates: tuple[dt.date, ...]
    closes: np.ndarray
    name: str = "series"

    def __post_init__(self) -> None:
        closes = np.asarray(self.closes, dtype=float)
        dates = tuple(self.dates)
        if closes.ndim != 1:
            raise ValueError("closes must be one-dimensional")
        if len(dates) != closes.size:
            raise ValueError(
                f"{len(dates)} dates but {closes.size} closing values"
            )
        if closes.size < 2:
            raise ValueError("a price series needs at least 2 values")
        if not np.all(np.isfinite(closes)) or np.any(closes <= 0):
            bad = int(np.flatnonzero(~(closes > 0) | ~np.isfinite(closes))[0])
            raise ValueError(f"non-positive or non-finite close at row {bad}")
        for i in range(1, len(dates)):
            if dates[i] == dates[i - 1]:
                raise ValueError(f"duplicate date {dates[i].isoformat()}")
            if dates[i] < dates[i - 1]:
                raise ValueError(
                    f"dates not increasing: {dates[i - 1].isoformat()} "
                    f"followed by {dates[i].isoformat()}"
                )
        closes.setflags(write=False)
        object.__setattr__(self, "closes", closes)
        object.__setattr__(self, "dates", dates)

    def __len__(self) -> int:
        return self.closes.size

    @classmethod
    def from_closes(cls, closes: Sequence[float], name: str = "series",
                    start: dt.date = dt.date(2000, 1, 1)) -> "PriceSeries":
        """Build a series with consecutive synthetic daily dates."""
        dates = tuple(start + dt.timedelta(days=i) for i in range(len(closes)))
        return cls(dates=dates, closes=np.asarray(closes, dtype=float), name=name)


@dataclass(frozen=True, eq=False)
class ReturnSeries:
    """Logarithmic returns R(k), one per pair of consecutive closes."""

    values: np.ndarray
    source_name: str = "series"

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim != 1:
            raise ValueError("returns must be one-dimensional")
        if not np.all(np.isfinite(values)):
            raise ValueError("returns must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True, eq=False)
class Profile:
    """Integrated, mean-removed returns y(l)."""

    values: np.ndarray
    mean_removed: float = field(default=0.0)

    def __len__(self) -> int:
        return self.values.size


def log_returns(prices: PriceSeries) -> ReturnSeries:
    """Natural-log returns ``ln(S[k+1] / S[k])`` of consecutive recorded closes."""
    closes = prices.closes
    if closes.size < 2:
        raise ValueError("need at least 2 prices to form a return")
    return ReturnSeries(np.log(closes[1:] / closes[:-1]), source_name=prices.name)


def _as_array(returns: ReturnSeries | np.ndarray | Sequence[float]) -> np.ndarray:
    if isinstance(returns, ReturnSeries):
        return returns.values
    return np.asarray(returns, dtype=float)


def profile(returns: ReturnSeries | np.ndarray | Sequence[float]) -> Profile:
    """Partial sums of the mean-removed returns.

    ``y(l) = sum_{k<=l} (R(k) - R_ave)``. The last element is zero up to
    round-off. A constant input yields an exactly zero profile.
    """
    r = _as_array(returns)
    if r.size == 0:
        raise ValueError("cannot build the profile of an empty series")
    if np.all(r == r[0]):
        # floating-point mean of identical values is not always exact
        return Profile(np.zeros(r.size), mean_removed=float(r[0]))
    mean = float(np.mean(r))
    return Profile(np.cumsum(r - mean), mean_removed=mean)
