"""DESA-1 energy separation: amplitude envelope and instantaneous frequency."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import TimeSeries
from .errors import DegenerateInputError, ParameterError, TooShortError
from .tkeo import teager_kaiser

__all__ = ["Demodulation", "desa1", "inst_freq_hz"]

_DENOM_EPS = 1e-12
_REL_ENERGY_EPS = 1e-12
_ABS_ENERGY_FLOOR = 1e-30


@dataclass(frozen=True)
class Demodulation:
    """Per-sample DESA-1 estimates.

    Index ``i`` of each series refers to source sample ``i + valid_offset``.
    Samples flagged ``False`` in ``valid`` carry zeros and must be ignored.
    """

    envelope: TimeSeries
    inst_freq_rad: TimeSeries
    valid: np.ndarray
    valid_offset: int = 2

    @property
    def n_invalid(self) -> int:
        return int(self.valid.size - np.count_nonzero(self.valid))

    @property
    def invalid_fraction(self) -> float:
        return self.n_invalid / self.valid.size if self.valid.size else 1.0


def desa1(x: TimeSeries, variant: str = "standard",
          energy_eps: float | None = None) -> Demodulation:
    """Demodulate ``x`` with DESA-1.

    With ``y[n] = x[n] - x[n-1]`` the frequency estimate is
    ``arccos(1 - (Psi[y[n]] + Psi[y[n+1]]) / (4 Psi[x[n]]))``.
    ``variant="literal"`` instead applies the operator once to the summed
    differences, ``Psi[y[n] + y[n+1]]``; that form is biased on pure tones
    and is kept only for comparison runs.

    Parameters
    ----------
    x : TimeSeries
        Narrowband input, at least 5 samples.
    variant : {"standard", "literal"}
    energy_eps : float, optional
        Absolute threshold below which ``|Psi[x[n]]|`` marks a sample invalid.
        Defaults to ``1e-12 * max|Psi[x]|`` floored at ``1e-30``.
    """
    s = x.samples
    n = s.shape[0]
    if n < 5:
        raise TooShortError(f"DESA-1 needs at least 5 samples, got {n}")

    # output index i <-> source sample i + 2, i = 0 .. n-5
    psi_x = teager_kaiser(s)[1:-1]
    y = np.diff(s)  # y[j] is the backward difference at source sample j + 1
    if variant == "standard":
        psi_y = teager_kaiser(y)  # psi_y[j] at source sample j + 2
        num = psi_y[:-1] + psi_y[1:]
    elif variant == "literal":
        z = y[:-1] + y[1:]  # z[j] = y at source j+1 plus y at source j+2
        num = teager_kaiser(z)
    else:
        raise ParameterError(f"unknown DESA-1 variant {variant!r}")

    if energy_eps is None:
        peak = float(np.max(np.abs(psi_x))) if psi_x.size else 0.0
        energy_eps = max(_REL_ENERGY_EPS * peak, _ABS_ENERGY_FLOOR)
    valid = np.abs(psi_x) >= energy_eps
    if not np.any(valid):
        raise DegenerateInputError("no sample carries measurable TKEO energy")

    safe_psi = np.where(valid, psi_x, 1.0)
    g = 1.0 - num / (4.0 * safe_psi)
    g = np.clip(g, -1.0, 1.0)
    omega = np.arccos(g)
    amp = np.sqrt(np.maximum(safe_psi, 0.0) / np.maximum(1.0 - g * g, _DENOM_EPS))
    omega = np.where(valid, omega, 0.0)
    amp = np.where(valid, amp, 0.0)

    fs = x.sample_rate_hz
    valid.flags.writeable = False
    return Demodulation(TimeSeries(amp, fs), TimeSeries(omega, fs), valid, 2)


def inst_freq_hz(d: Demodulation) -> TimeSeries:
    fs = d.inst_freq_rad.sample_rate_hz
    return TimeSeries(d.inst_freq_rad.samples * fs / (2.0 * np.pi), fs)
