"""Principal branch of the Lambert W function."""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

_INV_E = math.exp(-1.0)
_BRANCH_SLACK = 1e-15
_LOG_FORM_THRESHOLD = 1e2
# e = _E_HI + _E_LO to double-double precision
_E_HI = math.e
_E_LO = 1.4456468917292502e-16
# series of W0 about the branch point in p = sqrt(2(e x + 1))
_BRANCH_SERIES = (
    -1.0,
    1.0,
    -1.0 / 3.0,
    11.0 / 72.0,
    -43.0 / 540.0,
    769.0 / 17280.0,
    -221.0 / 8505.0,
    680863.0 / 43545600.0,
    -1963.0 / 204120.0,
    226287557.0 / 37623398400.0,
)
_SERIES_P_MAX = 0.03


def _split(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    c = 134217729.0 * a
    hi = c - (c - a)
    return hi, a - hi


def _branch_distance(x: np.ndarray) -> np.ndarray:
    """e*x + 1 evaluated without the cancellation of the naive product."""
    prod = _E_HI * x
    ah, al = _split(np.full_like(x, _E_HI))
    bh, bl = _split(x)
    err = ((ah * bh - prod) + ah * bl + al * bh) + al * bl
    return (prod + 1.0) + (err + _E_LO * x)


def _initial_guess(x: np.ndarray) -> np.ndarray:
    w = np.empty_like(x)

    near_branch = x < -0.25
    # expansion about the branch point in p = sqrt(2(e x + 1))
    p = np.sqrt(np.maximum(2.0 * (math.e * x[near_branch] + 1.0), 0.0))
    w[near_branch] = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3

    mid = (~near_branch) & (x < 3.0)
    xm = x[mid]
    w[mid] = xm * (1.0 + 4.0 / 3.0 * xm) / (1.0 + 7.0 / 3.0 * xm + 5.0 / 6.0 * xm * xm)

    large = x >= 3.0
    lx = np.log(x[large])
    llx = np.log(lx)
    w[large] = lx - llx + llx / lx
    return w


def _halley(x: np.ndarray) -> np.ndarray:
    w = _initial_guess(x)
    p = np.sqrt(np.maximum(2.0 * _branch_distance(np.minimum(x, 0.0)), 0.0))
    series = (x < 0.0) & (p < _SERIES_P_MAX)
    log_form = x > _LOG_FORM_THRESHOLD
    lx = np.log(np.where(log_form, x, 1.0))
    active = ~series
    for _ in range(40):
        if not active.any():
            break
        wa = w[active]
        xa = x[active]
        la = log_form[active]
        ew = np.exp(np.where(la, 0.0, wa))
        # direct form: f = w e^w - x;  log form: f = w + ln w - ln x
        # (np.where evaluates both forms; the unused one may divide by zero)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            f = np.where(la, wa + np.log(np.abs(wa)) - lx[active], wa * ew - xa)
            fp = np.where(la, 1.0 + 1.0 / wa, ew * (wa + 1.0))
            fpp = np.where(la, -1.0 / (wa * wa), ew * (wa + 2.0))
            step = f / (fp - 0.5 * f * fpp / fp)
        step = np.where(np.isfinite(step), step, 0.0)
        w_new = wa - step
        w_new = np.where(w_new <= -1.0, 0.5 * (wa - 1.0), w_new)
        done = np.abs(w_new - wa) <= 4e-16 * np.maximum(1.0, np.abs(w_new))
        w[active] = w_new
        idx = np.flatnonzero(active)
        active[idx[done]] = False
    ps = p[series]
    w[series] = np.polynomial.polynomial.polyval(ps, _BRANCH_SERIES)
    return w


def lambert_w0(x):
    """Principal branch W0 of the Lambert W function.

    Solves ``w * exp(w) = x`` for ``w >= -1`` by Halley iteration from a
    piecewise initial guess. Accepts a scalar or an array; arguments within
    ``1e-15`` below ``-1/e`` are clamped to the branch point.

    Raises
    ------
    DomainError
        If any ``x < -1/e - 1e-15``.
    """
    scalar = np.ndim(x) == 0
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(arr < -_INV_E - _BRANCH_SLACK):
        bad = arr[arr < -_INV_E - _BRANCH_SLACK].min()
        raise DomainError(f"lambert_w0 undefined for x={bad!r} < -1/e")

    out = np.empty_like(arr)
    branch = arr <= -_INV_E
    zero = arr == 0.0
    inf = np.isposinf(arr)
    nan = np.isnan(arr)
    out[branch] = -1.0
    out[zero] = 0.0
    out[inf] = np.inf
    out[nan] = np.nan
    rest = ~(branch | zero | inf | nan)
    if rest.any():
        out[rest] = _halley(arr[rest])
    if scalar:
        return float(out[0])
    return out.reshape(np.shape(x))
