"""Power-law fitting of h-indexed tables, with an exact-zero sentinel.

Decay and defect checks all reduce to fitting log(value) against log(h).
Entries at or below a zero tolerance are dropped before fitting (their logs
are undefined); when too few points survive, the slope is reported as the
+infinity sentinel, meaning "decays faster than any tested power".
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["FitResult", "fit_loglog"]


@dataclass(frozen=True)
class FitResult:
    """Least-squares slope of log(value) vs log(h).

    slope is math.inf when the table is (effectively) all zeros; residual_rms
    is the root-mean-square misfit in log units over the points actually used.
    """

    slope: float
    intercept: float
    residual_rms: float
    n_used: int
    n_dropped: int

    @property
    def is_sentinel(self) -> bool:
        return math.isinf(self.slope)


def fit_loglog(
    table, zero_tol: float = 0.0, min_points: int = 2
) -> FitResult:
    """Fit value ~ C * h^slope on the (h, value) pairs of `table`.

    Parameters
    ----------
    table : sequence of (h, value)
        Scales must be positive; values must be nonnegative.
    zero_tol : float
        Values <= zero_tol are treated as exact zeros and dropped.
    min_points : int
        Fewer surviving points than this yields the +inf sentinel.
    """
    hs, vs = [], []
    dropped = 0
    for h, v in table:
        if v < 0:
            raise ValueError(f"negative value {v} in fit table")
        if v <= zero_tol or v < 1e-300:
            dropped += 1
            continue
        hs.append(float(h))
        vs.append(float(v))
    if len(hs) < max(min_points, 2):
        return FitResult(math.inf, 0.0, 0.0, len(hs), dropped)
    x = np.log(np.asarray(hs))
    y = np.log(np.asarray(vs))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    rms = float(np.sqrt(np.mean(resid * resid)))
    return FitResult(float(slope), float(intercept), rms, len(hs), dropped)
