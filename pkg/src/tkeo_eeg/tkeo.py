"""Discrete Teager-Kaiser energy operator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import TimeSeries
from .errors import EmptyResultError, TooShortError

__all__ = ["EnergySeries", "teager_kaiser", "tkeo", "mean_tkeo"]


@dataclass(frozen=True)
class EnergySeries:
    """Operator output; ``values[k]`` belongs to source sample ``k + valid_offset``."""

    values: np.ndarray
    sample_rate_hz: float
    valid_offset: int = 1

    def __len__(self) -> int:
        return self.values.shape[0]


def teager_kaiser(x: np.ndarray) -> np.ndarray:
    """Array form: ``x[n]**2 - x[n-1]*x[n+1]`` for the interior samples only.

    Negative outputs are kept as is.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] < 3:
        raise TooShortError(f"TKEO needs at least 3 samples, got {x.shape[-1]}")
    return x[..., 1:-1] ** 2 - x[..., :-2] * x[..., 2:]


def tkeo(x: TimeSeries) -> EnergySeries:
    values = teager_kaiser(x.samples)
    values.flags.writeable = False
    return EnergySeries(values, x.sample_rate_hz, 1)


def mean_tkeo(e: EnergySeries | np.ndarray) -> float:
    """Temporal mean of the energy sequence."""
    values = e.values if isinstance(e, EnergySeries) else np.asarray(e, dtype=np.float64)
    if values.size == 0:
        raise EmptyResultError("mean of an empty energy series")
    return float(np.mean(values))
