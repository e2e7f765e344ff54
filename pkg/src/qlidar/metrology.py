"""Figures of merit extracted from observable-versus-phase curves.

Resolution is quantified by the full width at half maximum of the principal
fringe; foldness by counting fringe peaks per phase window; sensitivity by
error propagation of the binary observables against the shot-noise floor
1/sqrt(total input photons).  Curves carry an evaluator of the continuous
observable so crossing and extremum positions can be refined well below the
sampling step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import detection
from .detection import Scheme
from .interferometer import MziConfig
from .states import SuperposedState, mean_photon_number

TWO_PI = 2.0 * math.pi
REFINE_TOL = 1e-8
PEAK_NOISE_THRESHOLD = 1e-9
DERIVATIVE_FLOOR = 1e-14
ZERO_ENERGY_THRESHOLD = 1e-12
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class NoPeak(ValueError):
    """The curve has no interior extremum to measure."""


class ZeroEnergy(ValueError):
    """Both inputs carry (numerically) no photons; no shot-noise reference."""


@dataclass(frozen=True)
class SignalCurve:
    """Sampled observable-vs-phase curve plus an optional continuous evaluator."""

    phis: np.ndarray
    values: np.ndarray
    scheme: Scheme
    provenance: Mapping = field(default_factory=dict)
    evaluator: Callable[[float], float] | None = None

    def __post_init__(self):
        phis = np.asarray(self.phis, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if phis.ndim != 1 or phis.shape != values.shape:
            raise ValueError("phis and values must be matching 1-D arrays")
        if len(phis) < 2 or np.any(np.diff(phis) <= 0):
            raise ValueError("phis must be strictly increasing with at least 2 samples")
        object.__setattr__(self, "phis", phis)
        object.__setattr__(self, "values", values)

    @property
    def span(self) -> float:
        return float(self.phis[-1] - self.phis[0])

    def samples_per_period(self) -> float:
        return len(self.phis) * TWO_PI / (self.span + (self.phis[1] - self.phis[0]))


def periodic_phase_grid(samples: int = 4096, start: float = -math.pi) -> np.ndarray:
    """Uniform grid over one full period, endpoint excluded."""
    return np.linspace(start, start + TWO_PI, samples, endpoint=False)


def sample_curve(
    state_a: SuperposedState,
    state_b: SuperposedState,
    scheme: Scheme,
    phis=None,
    loss_r: float = 0.0,
) -> SignalCurve:
    """Evaluate the detection signal on a phase grid (default: one period)."""
    if phis is None:
        phis = periodic_phase_grid()
    phis = np.asarray(phis, dtype=float)
    values = detection.expectation_curve(state_a, state_b, scheme, phis, loss_r)

    def evaluator(phi: float) -> float:
        return detection.expectation(state_a, state_b, MziConfig(phi=phi, loss_r=loss_r), scheme)

    provenance = {"scheme": scheme.value, "loss_r": loss_r}
    return SignalCurve(phis=phis, values=values, scheme=scheme, provenance=provenance, evaluator=evaluator)


@dataclass(frozen=True)
class SensitivityPoint:
    """Error-propagation sensitivity at one phase, against the shot-noise floor."""

    phi: float
    delta_phi: float  # +inf at stationary points
    snl: float

    @property
    def ratio(self) -> float:
        return self.delta_phi / self.snl


def snl(state_a: SuperposedState, state_b: SuperposedState) -> float:
    """Shot-noise sensitivity floor 1/sqrt(total mean input photons)."""
    total = mean_photon_number(state_a) + mean_photon_number(state_b)
    if total < ZERO_ENERGY_THRESHOLD:
        raise ZeroEnergy("total input photon number is zero")
    return 1.0 / math.sqrt(total)


def phase_sensitivity(
    state_a: SuperposedState,
    state_b: SuperposedState,
    config: MziConfig,
    scheme: Scheme,
) -> SensitivityPoint:
    """Delta-phi from the binary observable's variance and analytic slope.

    A vanishing slope is a legitimate operating point (stationary phase), so
    it yields an infinite sensitivity marker rather than an exception.
    """
    floor = snl(state_a, state_b)
    value = detection.expectation(state_a, state_b, config, scheme)
    slope = detection.expectation_derivative(state_a, state_b, config, scheme)
    if scheme is Scheme.PARITY:
        variance = max(0.0, 1.0 - value * value)
    else:
        variance = max(0.0, value - value * value)
    if abs(slope) < DERIVATIVE_FLOOR:
        return SensitivityPoint(phi=config.phi, delta_phi=math.inf, snl=floor)
    return SensitivityPoint(phi=config.phi, delta_phi=math.sqrt(variance) / abs(slope), snl=floor)


def sensitivity_curve(
    state_a: SuperposedState,
    state_b: SuperposedState,
    scheme: Scheme,
    phis,
    loss_r: float = 0.0,
) -> list[SensitivityPoint]:
    """Vectorized sensitivity sweep over a phase grid."""
    floor = snl(state_a, state_b)
    phis = np.asarray(phis, dtype=float)
    values = detection.expectation_curve(state_a, state_b, scheme, phis, loss_r)
    slopes = detection.expectation_derivative_curve(state_a, state_b, scheme, phis, loss_r)
    points = []
    for phi, value, slope in zip(phis, values, slopes):
        if scheme is Scheme.PARITY:
            variance = max(0.0, 1.0 - value * value)
        else:
            variance = max(0.0, value - value * value)
        if abs(slope) < DERIVATIVE_FLOOR:
            points.append(SensitivityPoint(phi=float(phi), delta_phi=math.inf, snl=floor))
        else:
            points.append(SensitivityPoint(phi=float(phi), delta_phi=math.sqrt(variance) / abs(slope), snl=floor))
    return points


def _golden_extremum(f: Callable[[float], float], lo: float, hi: float, tol: float = REFINE_TOL) -> float:
    """Golden-section maximizer of f on [lo, hi]."""
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _bisect_crossing(f: Callable[[float], float], lo: float, hi: float, tol: float = REFINE_TOL) -> float:
    """Bisection root of f on a sign-changing bracket [lo, hi]."""
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo < 0.0) == (fhi < 0.0):
        raise ValueError("bracket does not change sign")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _interior_extrema(values: np.ndarray) -> tuple[list[int], list[int]]:
    maxima, minima = [], []
    for i in range(1, len(values) - 1):
        if values[i] > values[i - 1] and values[i] > values[i + 1]:
            maxima.append(i)
        elif values[i] < values[i - 1] and values[i] < values[i + 1]:
            minima.append(i)
    return maxima, minima


def fwhm(curve: SignalCurve, baseline: float | None = None) -> float:
    """Full width at half maximum of the principal fringe, in radians.

    The principal peak is the interior extremum farthest from the baseline;
    by default the baseline is the curve minimum for upright peaks and the
    maximum for inverted ones (upright preferred on ties), but an explicit
    value may be supplied (e.g. the zero line of a parity signal).  The half
    level sits midway between peak and baseline, and both crossings are
    refined by bisection on the continuous observable.
    """
    phis, values = curve.phis, curve.values
    maxima, minima = _interior_extrema(values)
    if not maxima and not minima:
        raise NoPeak("curve is monotone over its domain")
    vmin, vmax = float(np.min(values)), float(np.max(values))
    base_up = vmin if baseline is None else float(baseline)
    base_down = vmax if baseline is None else float(baseline)
    up_dev, up_idx = -math.inf, None
    for i in maxima:
        dev = values[i] - base_up
        if dev > up_dev:
            up_dev, up_idx = dev, i
    down_dev, down_idx = -math.inf, None
    for i in minima:
        dev = base_down - values[i]
        if dev > down_dev:
            down_dev, down_idx = dev, i
    inverted = down_dev > up_dev + 1e-12 * max(1.0, vmax - vmin)
    best_idx = down_idx if inverted else up_idx
    if best_idx is None or (not inverted and up_dev <= 0.0) or (inverted and down_dev <= 0.0):
        raise NoPeak("no extremum stands out from the baseline")
    sign = -1.0 if inverted else 1.0
    baseline = base_down if inverted else base_up

    if curve.evaluator is not None:
        f = curve.evaluator
        peak_phi = _golden_extremum(lambda x: sign * f(x), phis[best_idx - 1], phis[best_idx + 1])
        peak_val = f(peak_phi)
    else:
        f = lambda x: float(np.interp(x, phis, values))
        peak_phi, peak_val = float(phis[best_idx]), float(values[best_idx])

    half = 0.5 * (peak_val + baseline)
    level = lambda x: sign * (f(x) - half)

    left = None
    for i in range(best_idx, 0, -1):
        if sign * (values[i - 1] - half) < 0.0 <= sign * (values[i] - half):
            left = _bisect_crossing(level, phis[i - 1], phis[i])
            break
    right = None
    for i in range(best_idx, len(values) - 1):
        if sign * (values[i + 1] - half) < 0.0 <= sign * (values[i] - half):
            right = _bisect_crossing(level, phis[i], phis[i + 1])
            break
    if left is None or right is None:
        raise NoPeak("half level is never crossed on both sides of the peak")
    return float(right - left)


def peak_locations(
    curve: SignalCurve,
    window: tuple[float, float],
    side: str = "upper",
    midline: float | None = None,
    threshold: float = PEAK_NOISE_THRESHOLD,
) -> list[float]:
    """Refined positions of one-sided fringe peaks inside a phase window.

    The curve is treated as 2-pi periodic.  ``side`` selects which features
    count: strict local maxima above the midline ("upper"), strict local
    minima below it ("lower"), or extrema of the distance from the midline
    ("folded", which sees an inverted fringe as a peak).  ``midline``
    defaults to the mid-range of the windowed samples; peaks closer to the
    midline than ``threshold`` are ignored as noise.
    """
    if side not in ("upper", "lower", "folded"):
        raise ValueError("side must be 'upper', 'lower' or 'folded'")
    lo, hi = float(window[0]), float(window[1])
    if not hi > lo:
        raise ValueError("window must have positive width")
    if curve.samples_per_period() < 1000:
        raise ValueError("peak counting needs at least 1000 samples per period")
    phis, values = curve.phis, curve.values
    n = len(phis)
    periodic = abs(curve.span + (phis[1] - phis[0]) - TWO_PI) < 1e-9

    if midline is None:
        shifted = (phis - lo) % TWO_PI
        in_window = shifted <= (hi - lo) % TWO_PI if (hi - lo) < TWO_PI else np.ones(n, bool)
        if not np.any(in_window):
            return []
        windowed = values[in_window]
        mid = 0.5 * (float(np.max(windowed)) + float(np.min(windowed)))
    else:
        mid = float(midline)

    if side == "upper":
        signal = values - mid
    elif side == "lower":
        signal = mid - values
    else:
        signal = np.abs(values - mid)

    def neighbor(i: int, step: int) -> float | None:
        j = i + step
        if 0 <= j < n:
            return signal[j]
        return signal[j % n] if periodic else None

    raw = []
    for i in range(n):
        left, right = neighbor(i, -1), neighbor(i, 1)
        if left is None or right is None:
            continue
        if signal[i] > left and signal[i] > right and signal[i] > threshold:
            raw.append(i)

    positions = []
    for i in raw:
        phi0 = float(phis[i])
        if curve.evaluator is not None:
            step = phis[1] - phis[0]
            if side == "upper":
                g = curve.evaluator
            elif side == "lower":
                g = lambda x: -curve.evaluator(x)
            else:
                g = lambda x: abs(curve.evaluator(x) - mid)
            phi0 = _golden_extremum(g, phi0 - step, phi0 + step)
        positions.append(phi0)

    width = hi - lo
    result = []
    for phi0 in positions:
        mapped = lo + ((phi0 - lo) % TWO_PI)
        if mapped <= hi or (width >= TWO_PI - 1e-12):
            result.append(mapped)
    return sorted(result)


def peak_count(
    curve: SignalCurve,
    window: tuple[float, float],
    side: str = "upper",
    midline: float | None = None,
    threshold: float = PEAK_NOISE_THRESHOLD,
) -> int:
    """Number of one-sided fringe peaks inside the window; see peak_locations."""
    return len(peak_locations(curve, window, side=side, midline=midline, threshold=threshold))


def loss_sweep(
    state_a: SuperposedState,
    state_b: SuperposedState,
    phi: float,
    scheme: Scheme,
    r_grid,
    metric: str = "ratio",
) -> list[tuple[float, float]]:
    """Recompute a figure of merit over a grid of loss reflectivities.

    ``metric='ratio'`` evaluates delta-phi over the shot-noise floor at the
    fixed phase; ``metric='fwhm'`` measures the principal fringe width at
    fixed input energy.  loss_t follows from each grid value.
    """
    if metric not in ("ratio", "fwhm"):
        raise ValueError("metric must be 'ratio' or 'fwhm'")
    rows = []
    for r in r_grid:
        r = float(r)
        if not 0.0 <= r < 1.0:
            raise ValueError("loss grid values must lie in [0, 1)")
        if metric == "ratio":
            point = phase_sensitivity(state_a, state_b, MziConfig(phi=phi, loss_r=r), scheme)
            rows.append((r, point.ratio))
        else:
            curve = sample_curve(state_a, state_b, scheme, loss_r=r)
            rows.append((r, fwhm(curve)))
    return rows


def range_from_phase(phi: float, wavelength: float) -> float:
    """Target distance for a measured round-trip phase at the given wavelength."""
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    return phi * wavelength / (4.0 * math.pi)
