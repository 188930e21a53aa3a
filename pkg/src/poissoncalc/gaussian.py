"""Standard normal density, distribution, quantile and the Gaussian
isoperimetric function I(t) = phi(Phi^{-1}(t)), together with the variance
profile I_var(t) = t(1-t).

The cdf and quantile are delegated to scipy.special (ndtr / ndtri); the
surrounding checks in the test suite verify the round-trip and the classical
inequality I >= sqrt(2/pi) * I_var on a dense grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri


@dataclass(frozen=True)
class GaussianKit:
    """Bundle of standard normal functions used by inequality checks."""

    def pdf(self, x):
        return np.exp(-0.5 * np.square(x)) / math.sqrt(2.0 * math.pi)

    def cdf(self, x):
        return ndtr(x)

    def quantile(self, p):
        return ndtri(p)

    def iso(self, t):
        """Gaussian isoperimetric function, with iso(0) = iso(1) = 0."""
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        inner = (t > 0.0) & (t < 1.0)
        out[inner] = self.pdf(self.quantile(t[inner]))
        if out.ndim == 0:
            return float(out)
        return out

    def iso_var(self, t):
        t = np.asarray(t, dtype=float)
        out = t * (1.0 - t)
        if out.ndim == 0:
            return float(out)
        return out

    def z_value(self, ci_level: float) -> float:
        """Two-sided normal quantile for a confidence level in (0, 1)."""
        if not 0.0 < ci_level < 1.0:
            raise ValueError(f"ci_level must be in (0, 1), got {ci_level}")
        return float(ndtri(0.5 + 0.5 * ci_level))


gaussian = GaussianKit()
