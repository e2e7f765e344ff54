"""Port-a photon statistics and binary-outcome observables.

Everything here is evaluated with one generic pair-sum over the output terms:
for any single-mode observable X with coherent matrix elements <a_i|X|a_j>,

    <X> = sum_ij conj(w_i) w_j <a_i|X|a_j> prod_{m in b, env_a, env_b} <u_i[m]|u_j[m]>.

Parity uses <a|Pi|b> = <a|-b>, the zero/nonzero scheme uses the vacuum
projector, and P(n) the number-state projector.  Pair sums are Hermitian by
construction, so the imaginary residue is asserted small and dropped rather
than silently discarded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import gammainc, gammaln

from .interferometer import FourModeOutput, MziConfig, mode_transform, mode_transform_derivative
from .states import CoherentDyad, CoherentDyadMixture, SuperposedState

IMAG_RESIDUE_TOL = 1e-12
NEGATIVE_PROBABILITY_TOL = -1e-10


class NegativeProbability(ArithmeticError):
    """A probability fell below the numerical floor; signals an engine bug."""


class Scheme(Enum):
    """Binary-outcome detection scheme at port a."""

    PARITY = "parity"
    Z = "z"

    @classmethod
    def parse(cls, name: str) -> "Scheme":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ValueError(f"unknown scheme {name!r} (expected 'parity' or 'z')") from None


@dataclass(frozen=True)
class PortDistribution:
    """P(n) at port a for n = 0..cutoff plus a bound on the truncated tail."""

    probs: np.ndarray
    cutoff: int
    tail_bound: float


def _real_part(value: complex, what: str) -> float:
    if abs(value.imag) > IMAG_RESIDUE_TOL * max(1.0, abs(value.real)):
        raise ArithmeticError(f"{what} has imaginary residue {value.imag:.3e}")
    return float(value.real)


def _pair_data(out: FourModeOutput):
    """Weights, port-a amplitudes, and the product of the three traced-mode overlaps."""
    w = out.weights()
    amps = out.amplitude_matrix()
    rest = np.ones((len(w), len(w)), dtype=complex)
    for m in (1, 2, 3):
        u = amps[:, m]
        uu = np.abs(u) ** 2
        rest *= np.exp(-0.5 * (uu[:, None] + uu[None, :]) + np.conj(u)[:, None] * u[None, :])
    return w, amps[:, 0], rest


def photon_probability(out: FourModeOutput, n: int) -> float:
    """Probability of counting exactly n photons at port a."""
    if n < 0:
        raise ValueError("photon number must be nonnegative")
    w, a, rest = _pair_data(out)
    aa = np.abs(a) ** 2
    gauss = -0.5 * (aa[:, None] + aa[None, :])
    z = np.conj(a)[:, None] * a[None, :]
    if n == 0:
        port = np.exp(gauss)
    else:
        port = np.zeros_like(z)
        nz = z != 0
        port[nz] = np.exp(gauss[nz] + n * np.log(z[nz]) - gammaln(n + 1))
    val = _real_part(np.conj(w) @ (port * rest) @ w, f"P({n})")
    if val < NEGATIVE_PROBABILITY_TOL:
        raise NegativeProbability(f"P({n}) = {val:.3e}")
    return min(max(val, 0.0), 1.0)


def default_cutoff(out: FourModeOutput) -> int:
    """Truncation making the port-a Poisson tails negligible for every term."""
    mean = float(np.max(np.abs(out.amplitude_matrix()[:, 0]) ** 2))
    return int(math.ceil(mean + 10.0 * math.sqrt(mean) + 20.0))


def port_distribution(out: FourModeOutput, cutoff: int | None = None) -> PortDistribution:
    """P(n) for n = 0..cutoff with a Cauchy-Schwarz bound on the dropped tail."""
    if cutoff is None:
        cutoff = default_cutoff(out)
    probs = np.array([photon_probability(out, n) for n in range(cutoff + 1)])
    w, a, rest = _pair_data(out)
    # Poisson survival beyond the cutoff for each term's port intensity.
    tails = gammainc(cutoff + 1, np.abs(a) ** 2)
    bound = np.abs(np.conj(w)[:, None] * w[None, :] * rest) * np.sqrt(tails[:, None] * tails[None, :])
    return PortDistribution(probs=probs, cutoff=cutoff, tail_bound=float(np.sum(bound)))


def parity_expectation(out: FourModeOutput) -> float:
    """<Pi> at port a, the (-1)^n-weighted photon sum in closed form."""
    w, a, rest = _pair_data(out)
    aa = np.abs(a) ** 2
    port = np.exp(-0.5 * (aa[:, None] + aa[None, :]) - np.conj(a)[:, None] * a[None, :])
    val = _real_part(np.conj(w) @ (port * rest) @ w, "parity")
    return min(max(val, -1.0), 1.0)


def z_expectation(out: FourModeOutput) -> float:
    """<Z> = P(0), the vacuum-projector expectation at port a."""
    return photon_probability(out, 0)


def binary_probabilities(out: FourModeOutput) -> tuple[float, float]:
    """(P(+), P(-)) for even/odd photon counts at port a."""
    parity = parity_expectation(out)
    p_plus = 0.5 * (1.0 + parity)
    p_minus = 0.5 * (1.0 - parity)
    return min(max(p_plus, 0.0), 1.0), min(max(p_minus, 0.0), 1.0)


def expectation_derivative(
    state_a: SuperposedState,
    state_b: SuperposedState,
    config: MziConfig,
    scheme: Scheme,
) -> float:
    """Analytic d<X>/dphi for X = parity or the vacuum projector.

    Every output amplitude depends smoothly on phi through the transfer
    matrix, so each pair term differentiates to itself times the derivative of
    its exponent; no finite differencing is involved.
    """
    if not (state_a.normalized and state_b.normalized):
        raise ValueError("derivative requires normalized input states")
    weights = []
    amps_in = []
    for ta in state_a.terms:
        for tb in state_b.terms:
            weights.append(ta.weight * tb.weight)
            amps_in.append((ta.amplitude, tb.amplitude))
    w = np.array(weights, dtype=complex)
    vin = np.array(amps_in, dtype=complex)
    u = vin @ mode_transform(config).T
    du = vin @ mode_transform_derivative(config).T

    # cross coefficient per mode: +1 for traced modes, -1 (parity) / 0 (Z) at port a
    cross = {Scheme.PARITY: -1.0, Scheme.Z: 0.0}[scheme]
    coeffs = np.array([cross, 1.0, 1.0, 1.0])

    exponent = np.zeros((len(w), len(w)), dtype=complex)
    dexp = np.zeros_like(exponent)
    for m in range(4):
        um, dum = u[:, m], du[:, m]
        uu = np.abs(um) ** 2
        duu = 2.0 * np.real(np.conj(um) * dum)
        exponent += -0.5 * (uu[:, None] + uu[None, :]) + coeffs[m] * np.conj(um)[:, None] * um[None, :]
        dexp += -0.5 * (duu[:, None] + duu[None, :]) + coeffs[m] * (
            np.conj(dum)[:, None] * um[None, :] + np.conj(um)[:, None] * dum[None, :]
        )
    val = np.conj(w) @ (np.exp(exponent) * dexp) @ w
    return _real_part(val, "expectation derivative")


def expectation(state_a: SuperposedState, state_b: SuperposedState, config: MziConfig, scheme: Scheme) -> float:
    """<Pi> or <Z> for the given inputs and interferometer setting."""
    from .interferometer import propagate

    out = propagate(state_a, state_b, config)
    if scheme is Scheme.PARITY:
        return parity_expectation(out)
    return z_expectation(out)


def _phase_resolved_amplitudes(state_a, state_b, phis: np.ndarray, loss_r: float):
    """Output amplitudes and their phase derivatives over a whole phi grid.

    Returns (w, u, du) with w of shape (K,) and u, du of shape (K, 4, P) for
    K input term pairs and P phase samples.  Mirrors the transfer matrix rows
    so sweeps avoid per-sample object construction.
    """
    t = math.sqrt(max(0.0, 1.0 - loss_r**2))
    weights, amps_in = [], []
    for ta in state_a.terms:
        for tb in state_b.terms:
            weights.append(ta.weight * tb.weight)
            amps_in.append((ta.amplitude, tb.amplitude))
    w = np.array(weights, dtype=complex)
    vin = np.array(amps_in, dtype=complex)
    aa, ab = vin[:, 0][:, None], vin[:, 1][:, None]
    half = np.exp(0.5j * phis)[None, :]
    full = np.exp(1j * phis)[None, :]
    sin_h = np.sin(0.5 * phis)[None, :]
    cos_h = np.cos(0.5 * phis)[None, :]
    theta = 1j * t * half * sin_h
    sigma = 1j * t * half * cos_h
    rbar = 1j * loss_r / math.sqrt(2.0)
    ones = np.ones_like(full)
    u = np.stack(
        [
            aa * theta + ab * sigma,
            aa * sigma - ab * theta,
            (aa + 1j * ab) * rbar * full,
            (1j * aa + ab) * rbar * ones,
        ],
        axis=1,
    )
    dtheta = 0.5j * t * full
    dsigma = -0.5 * t * full
    du = np.stack(
        [
            aa * dtheta + ab * dsigma,
            aa * dsigma - ab * dtheta,
            (aa + 1j * ab) * 1j * rbar * full,
            np.zeros((len(w), len(phis)), dtype=complex),
        ],
        axis=1,
    )
    return w, u, du


def _curve_values(w, u, du, scheme: Scheme, want_derivative: bool) -> np.ndarray:
    cross = {Scheme.PARITY: -1.0, Scheme.Z: 0.0}[scheme]
    coeffs = (cross, 1.0, 1.0, 1.0)
    n_pairs, _, n_phi = u.shape
    exponent = np.zeros((n_pairs, n_pairs, n_phi), dtype=complex)
    dexp = np.zeros_like(exponent) if want_derivative else None
    for m in range(4):
        um, dum = u[:, m, :], du[:, m, :]
        uu = np.abs(um) ** 2
        exponent += -0.5 * (uu[:, None, :] + uu[None, :, :]) + coeffs[m] * np.conj(um)[:, None, :] * um[None, :, :]
        if want_derivative:
            duu = 2.0 * np.real(np.conj(um) * dum)
            dexp += -0.5 * (duu[:, None, :] + duu[None, :, :]) + coeffs[m] * (
                np.conj(dum)[:, None, :] * um[None, :, :] + np.conj(um)[:, None, :] * dum[None, :, :]
            )
    pair_w = (np.conj(w)[:, None] * w[None, :])[:, :, None]
    terms = pair_w * np.exp(exponent)
    if want_derivative:
        terms = terms * dexp
    vals = np.sum(terms, axis=(0, 1))
    residue = float(np.max(np.abs(vals.imag)))
    if residue > IMAG_RESIDUE_TOL * max(1.0, float(np.max(np.abs(vals.real)))):
        raise ArithmeticError(f"curve has imaginary residue {residue:.3e}")
    return vals.real


def expectation_curve(
    state_a: SuperposedState,
    state_b: SuperposedState,
    scheme: Scheme,
    phis,
    loss_r: float = 0.0,
    chunk: int = 1024,
) -> np.ndarray:
    """Vectorized <Pi> or <Z> over a grid of phase values."""
    if not (state_a.normalized and state_b.normalized):
        raise ValueError("curve evaluation requires normalized input states")
    phis = np.asarray(phis, dtype=float)
    out = np.empty(phis.shape)
    for lo in range(0, len(phis), chunk):
        w, u, du = _phase_resolved_amplitudes(state_a, state_b, phis[lo : lo + chunk], loss_r)
        out[lo : lo + chunk] = _curve_values(w, u, du, scheme, want_derivative=False)
    return out


def expectation_derivative_curve(
    state_a: SuperposedState,
    state_b: SuperposedState,
    scheme: Scheme,
    phis,
    loss_r: float = 0.0,
    chunk: int = 1024,
) -> np.ndarray:
    """Vectorized analytic d<X>/dphi over a grid of phase values."""
    if not (state_a.normalized and state_b.normalized):
        raise ValueError("curve evaluation requires normalized input states")
    phis = np.asarray(phis, dtype=float)
    out = np.empty(phis.shape)
    for lo in range(0, len(phis), chunk):
        w, u, du = _phase_resolved_amplitudes(state_a, state_b, phis[lo : lo + chunk], loss_r)
        out[lo : lo + chunk] = _curve_values(w, u, du, scheme, want_derivative=True)
    return out


def reduced_port_a(out: FourModeOutput) -> CoherentDyadMixture:
    """Reduced density operator of port a as a coherent dyad mixture."""
    w, a, rest = _pair_data(out)
    dyads = []
    n = len(w)
    for i in range(n):
        for j in range(n):
            coeff = w[j] * np.conj(w[i]) * rest[i, j]
            dyads.append(CoherentDyad(complex(coeff), complex(a[j]), complex(a[i])))
    return CoherentDyadMixture(tuple(dyads))
