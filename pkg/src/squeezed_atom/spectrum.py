"""Fluorescence power spectra as functions of the detuning delta = w - w0.

Analytic forms:

* ``spectrum_paper``: (1/(2N+1)) * 2N / (delta^2 + gamma^2 (N - M + 1/2)^2).
  The numerator lacks the linewidth factor, so its area is not 2 pi rho_a.
* ``spectrum_consistent``: 2 rho_a * w / (delta^2 + w^2) with
  w = gamma (N - M + 1/2), i.e. the transform of ``correlator_paper``.
* ``spectrum_exact``: rho_a * sum of Lorentzians of widths gamma (N + 1/2 -/+ M),
  the transform of ``correlator_exact``.

``spectrum_numeric`` transforms any correlator by Simpson quadrature and is
used to cross-check the closed forms.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.integrate
import scipy.optimize
import scipy.signal

from .correlation import CORRELATORS, bloch_coefficients, decay_rates
from .errors import (
    DegenerateSeries,
    DegenerateWidth,
    FitDiverged,
    NoHalfCrossing,
    NonDecayedTail,
    ParameterError,
    TruncationWarning,
)

MODES = ("paper", "consistent", "exact", "numeric")

TAIL_WARN = 1e-10
TAIL_FAIL = 1e-4


@dataclass(frozen=True)
class DetuningGrid:
    delta_min: float = -20.0
    delta_max: float = 20.0
    points: int = 2001

    def __post_init__(self):
        if not self.delta_min < 0.0 < self.delta_max:
            raise ParameterError("detuning grid must satisfy delta_min < 0 < delta_max")
        if self.points < 3 or self.points % 2 == 0:
            raise ParameterError(f"grid needs an odd number of points >= 3, got {self.points}")

    @property
    def deltas(self):
        if self.delta_min == -self.delta_max:
            # mirror one half so the grid is exactly even and hits 0.0
            half = np.linspace(0.0, self.delta_max, (self.points + 1) // 2)
            return np.concatenate([-half[:0:-1], half])
        return np.linspace(self.delta_min, self.delta_max, self.points)

    @property
    def spacing(self):
        return (self.delta_max - self.delta_min) / (self.points - 1)


@dataclass(frozen=True)
class SpectrumSeries:
    grid: DetuningGrid
    values: np.ndarray
    warnings: tuple = field(default=())

    @property
    def deltas(self):
        return self.grid.deltas


class Peak(NamedTuple):
    peak_delta: float
    height: float
    hwhm: float


@dataclass(frozen=True)
class LorentzianFit:
    amplitude: float
    center: float
    half_width: float
    residual_norm: float


def _lorentz(delta, width):
    return width / (delta * delta + width * width)


def spectrum_paper(params, delta, squeeze_sign=1):
    """Spectrum with the unnormalised numerator, taken at face value.

    ``squeeze_sign=-1`` evaluates the opposite squeezing convention, where
    the width is gamma (N + M + 1/2).
    """
    delta = np.asarray(delta, dtype=float)
    g, N, M = params.gamma, params.N, params.M
    width = g * (N - squeeze_sign * M + 0.5)
    val = (1.0 / (2.0 * N + 1.0)) * (2.0 * N / (delta * delta + width * width))
    return val.item() if val.ndim == 0 else val


def spectrum_thermal(gamma, nbar, delta):
    delta = np.asarray(delta, dtype=float)
    width = gamma * (nbar + 0.5)
    val = (1.0 / (2.0 * nbar + 1.0)) * (2.0 * nbar / (delta * delta + width * width))
    return val.item() if val.ndim == 0 else val


def spectrum_consistent(params, delta):
    half_a = 0.5 * bloch_coefficients(params).a
    if half_a <= 1e-12:
        raise DegenerateWidth(f"linewidth a/2 = {half_a} is not positive")
    val = 2.0 * params.steady_upper * _lorentz(np.asarray(delta, dtype=float), half_a)
    return val.item() if val.ndim == 0 else val


def spectrum_exact(params, delta):
    slow, fast = decay_rates(params)
    if slow <= 1e-12:
        raise DegenerateWidth(f"slow decay rate {slow} is not positive")
    delta = np.asarray(delta, dtype=float)
    val = params.steady_upper * (_lorentz(delta, slow) + _lorentz(delta, fast))
    return val.item() if val.ndim == 0 else val


def simpson_weights(n_intervals, h):
    """Composite Simpson weights; an odd interval count ends with a 3/8 panel."""
    if n_intervals < 2:
        raise ParameterError("Simpson quadrature needs at least two intervals")
    w = np.zeros(n_intervals + 1)
    m = n_intervals if n_intervals % 2 == 0 else n_intervals - 3
    if m > 0:
        w[0:m + 1:2] += 2.0
        w[1:m:2] += 4.0
        w[0] -= 1.0
        w[m] -= 1.0
        w[: m + 1] *= h / 3.0
    if m != n_intervals:
        w[m:] += 3.0 * h / 8.0 * np.array([1.0, 3.0, 3.0, 1.0])
    return w


def spectrum_numeric(correlator, grid, tau_max, tau_steps):
    """2 Re int_0^tau_max exp(i delta tau) C(tau) dtau on every grid point.

    ``correlator`` must accept an array of delays. Raises NonDecayedTail if
    |C(tau_max)| > 1e-4 |C(0)|; a smaller but non-negligible tail (above
    1e-10) is reported through a TruncationWarning and the series'
    ``warnings`` field.
    """
    if tau_max <= 0:
        raise ParameterError("tau_max must be positive")
    if tau_steps < 100:
        raise ParameterError("tau_steps must be at least 100")
    taus = np.linspace(0.0, tau_max, int(tau_steps) + 1)
    c = np.asarray(correlator(taus), dtype=complex)
    c0, tail = abs(c[0]), abs(c[-1])
    notes = ()
    if tail > TAIL_FAIL * c0:
        raise NonDecayedTail(f"|C(tau_max)|/|C(0)| = {tail / c0:.3g} exceeds {TAIL_FAIL}")
    if tail > TAIL_WARN * c0:
        msg = f"correlator tail |C(tau_max)|/|C(0)| = {tail / c0:.3g} exceeds {TAIL_WARN}"
        warnings.warn(msg, TruncationWarning, stacklevel=2)
        notes = (msg,)

    h = taus[1] - taus[0]
    wc = simpson_weights(len(taus) - 1, h) * c
    # sum_k wc_k exp(i (d0 + j dd) k h) over a uniform detuning grid is a chirp-z transform
    z = scipy.signal.czt(
        wc,
        m=grid.points,
        w=np.exp(1j * grid.spacing * h),
        a=np.exp(-1j * grid.delta_min * h),
    )
    return SpectrumSeries(grid, 2.0 * z.real, notes)


def slowest_rate(params, mode):
    if mode in ("paper", "consistent"):
        return 0.5 * bloch_coefficients(params).a
    return decay_rates(params)[0]


def default_tau_window(params, mode, grid):
    """(tau_max, tau_steps) long enough for a 1e-10 tail and fine enough for the grid.

    tau_max = max(40 / slowest rate, 8 / gamma); at least 16000 steps, more if
    needed to keep the phase step max|delta| * h at or below 0.1.
    """
    tau_max = max(40.0 / slowest_rate(params, mode), 8.0 / params.gamma)
    widest = max(abs(grid.delta_min), abs(grid.delta_max))
    steps = max(16000, math.ceil(tau_max * widest / 0.1))
    steps += steps % 2
    return tau_max, steps


def spectrum_series(params, mode="consistent", grid=None, tau_max=None, tau_steps=None):
    """Evaluate one of the spectrum ``MODES`` on a detuning grid."""
    grid = grid or DetuningGrid()
    deltas = grid.deltas
    if mode == "paper":
        return SpectrumSeries(grid, spectrum_paper(params, deltas))
    if mode == "consistent":
        return SpectrumSeries(grid, spectrum_consistent(params, deltas))
    if mode == "exact":
        return SpectrumSeries(grid, spectrum_exact(params, deltas))
    if mode == "numeric":
        if tau_max is None or tau_steps is None:
            auto_max, auto_steps = default_tau_window(params, mode, grid)
            tau_max = auto_max if tau_max is None else tau_max
            tau_steps = auto_steps if tau_steps is None else tau_steps
        corr = CORRELATORS["numeric"]
        return spectrum_numeric(lambda t: corr(params, t), grid, tau_max, tau_steps)
    raise ParameterError(f"unknown spectrum mode {mode!r}; choose from {MODES}")


def spectral_weight(series):
    """Trapezoid-rule area under the series."""
    return float(scipy.integrate.trapezoid(series.values, series.deltas))


def peak_and_hwhm(series):
    """Locate the on-grid maximum and the half width at half maximum.

    Ties for the maximum go to the smallest |delta|, then the smaller delta.
    Each half-height crossing is linearly interpolated and the two
    half-widths are averaged.
    """
    d = series.deltas
    y = np.asarray(series.values, dtype=float)
    top = y.max()
    cand = np.flatnonzero(y == top)
    i = min(cand, key=lambda k: (abs(d[k]), d[k]))
    half = 0.5 * top

    right = np.flatnonzero(y[i:] < half)
    left = np.flatnonzero(y[:i + 1][::-1] < half)
    if top <= 0.0 or not len(right) or not len(left):
        raise NoHalfCrossing("spectrum does not fall below half height inside the grid")
    j = i + right[0]
    x_r = d[j - 1] + (half - y[j - 1]) * (d[j] - d[j - 1]) / (y[j] - y[j - 1])
    k = i - left[0]
    x_l = d[k + 1] + (half - y[k + 1]) * (d[k] - d[k + 1]) / (y[k] - y[k + 1])
    hwhm = 0.5 * ((x_r - d[i]) + (d[i] - x_l))
    return Peak(float(d[i]), float(top), float(hwhm))


def lorentzian(delta, amplitude, center, half_width):
    """amplitude * w / (w^2 + (delta - center)^2)."""
    return amplitude * _lorentz(np.asarray(delta, dtype=float) - center, half_width)


def _lorentz_jac(p, x):
    A, c, w = p
    u = x - c
    den = w * w + u * u
    return np.column_stack([
        w / den,
        2.0 * A * w * u / den**2,
        A * (u * u - w * w) / den**2,
    ])


def lorentzian_fit(series, max_iter=200, xtol=1e-10):
    """Least-squares single-Lorentzian fit, seeded from :func:`peak_and_hwhm`."""
    x = series.deltas
    y = np.asarray(series.values, dtype=float)
    if len(y) < 7:
        raise DegenerateSeries(f"need at least 7 points to fit, got {len(y)}")
    if np.all(y == y[0]):
        raise DegenerateSeries("all values are equal")
    if np.any(y < 0) or y.max() <= 0:
        raise DegenerateSeries("fit needs a non-negative series with a positive maximum")

    try:
        pk = peak_and_hwhm(series)
        c0, w0 = pk.peak_delta, pk.hwhm
    except NoHalfCrossing:
        c0, w0 = float(x[np.argmax(y)]), 0.25 * (x[-1] - x[0])
    p0 = np.array([y.max() * w0, c0, w0])

    try:
        res = scipy.optimize.least_squares(
            lambda p: lorentzian(x, *p) - y,
            p0,
            jac=lambda p: _lorentz_jac(p, x),
            method="lm",
            xtol=xtol,
            ftol=1e-15,
            gtol=1e-15,
            max_nfev=max_iter * 4,
        )
    except (ValueError, FloatingPointError) as exc:
        raise FitDiverged(str(exc)) from exc

    A, c, w = res.x
    if w < 0:
        A, w = -A, -w
    if res.status <= 0 or not np.all(np.isfinite(res.x)) or A <= 0 or w == 0:
        raise FitDiverged(f"fit did not converge: {res.message}")
    rms = float(np.sqrt(np.mean(res.fun**2)))
    return LorentzianFit(float(A), float(c), float(w), rms)
