"""Least-squares models for sweep observables.

Three models cover the scalings of interest: a power law ``A x^p`` (transit
time and flux versus depth), a square-root threshold ``A sqrt(x - x0)``
(flux onset above a barrier), and a straight line.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

__all__ = ["FitResult", "fit_power_law", "fit_sqrt_threshold", "fit_linear"]


@dataclass(frozen=True)
class FitResult:
    """Fitted parameters with 1-sigma uncertainties from the residual
    covariance, plus the Euclidean norm of the residuals in linear space."""

    model: str
    params: dict[str, float]
    uncertainties: dict[str, float]
    residual_norm: float


def _as_xy(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-d arrays of equal length")
    if x.size < 3:
        raise ValueError(f"need at least 3 points to fit, got {x.size}")
    if np.all(x == x[0]):
        raise ValueError("degenerate data: all x values are equal")
    return x, y


def fit_power_law(x, y) -> FitResult:
    """Fit y = A x^p by linear regression in log-log space."""
    x, y = _as_xy(x, y)
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise ValueError("power-law fit requires strictly positive x and y")
    lx = np.log(x)
    ly = np.log(y)
    coef, cov = np.polyfit(lx, ly, 1, cov=True)
    p, ln_a = coef
    a = float(np.exp(ln_a))
    sig_p = float(np.sqrt(cov[0, 0]))
    sig_ln_a = float(np.sqrt(cov[1, 1]))
    resid = y - a * x ** p
    return FitResult(
        model="power",
        params={"amplitude": a, "exponent": float(p)},
        uncertainties={"amplitude": a * sig_ln_a, "exponent": sig_p},
        residual_norm=float(np.linalg.norm(resid)),
    )


def fit_sqrt_threshold(x, y) -> FitResult:
    """Fit y = A sqrt(max(x - x0, 0)), the generic flux onset above a barrier."""
    x, y = _as_xy(x, y)

    def model(xv, a, x0):
        return a * np.sqrt(np.clip(xv - x0, 0.0, None))

    a0 = float(np.max(np.abs(y)) / np.sqrt(np.max(x) - np.min(x) / 2.0))
    p0 = (max(a0, 1e-300), float(np.min(x)) / 2.0)
    popt, pcov = curve_fit(model, x, y, p0=p0, maxfev=20000)
    resid = y - model(x, *popt)
    sig = np.sqrt(np.diag(pcov))
    return FitResult(
        model="sqrt-threshold",
        params={"amplitude": float(popt[0]), "threshold": float(popt[1])},
        uncertainties={"amplitude": float(sig[0]), "threshold": float(sig[1])},
        residual_norm=float(np.linalg.norm(resid)),
    )


def fit_linear(x, y) -> FitResult:
    """Fit y = slope x + intercept."""
    x, y = _as_xy(x, y)
    coef, cov = np.polyfit(x, y, 1, cov=True)
    resid = y - np.polyval(coef, x)
    sig = np.sqrt(np.diag(cov))
    return FitResult(
        model="linear",
        params={"slope": float(coef[0]), "intercept": float(coef[1])},
        uncertainties={"slope": float(sig[0]), "intercept": float(sig[1])},
        residual_norm=float(np.linalg.norm(resid)),
    )
