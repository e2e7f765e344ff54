"""Finite superpositions of coherent states.

Every input state of the interferometer (laser light, even cat states, the
four-component multi-photonic superpositions) is represented as a finite list
of weighted coherent amplitudes.  Normalization, overlaps and photon-number
moments are computed from the Gram matrix of the amplitude set, so one code
path serves every state kind; the per-kind closed forms live in
:mod:`qlidar.closedform` and are used only as regression checks.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

GRAM_DEGENERACY_THRESHOLD = 1e-12


class DegenerateState(ValueError):
    """Term list with numerically zero norm (e.g. MPS with j != 0 at alpha -> 0)."""


def _require_finite(z: complex, what: str) -> None:
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"{what} must be finite, got {z!r}")


def overlap(a: complex, b: complex) -> complex:
    """Overlap <a|b> of two coherent states: exp(-|a|^2/2 - |b|^2/2 + conj(a)*b)."""
    a = complex(a)
    b = complex(b)
    _require_finite(a, "amplitude")
    _require_finite(b, "amplitude")
    return cmath.exp(-0.5 * (abs(a) ** 2 + abs(b) ** 2) + a.conjugate() * b)


@dataclass(frozen=True)
class CoherentTerm:
    """One weighted coherent component of a superposition."""

    weight: complex
    amplitude: complex

    def __post_init__(self):
        object.__setattr__(self, "weight", complex(self.weight))
        object.__setattr__(self, "amplitude", complex(self.amplitude))
        _require_finite(self.weight, "weight")
        _require_finite(self.amplitude, "amplitude")


class StateKind(Enum):
    """The six parametric input states plus explicit term lists."""

    CS = "cs"
    ECSS = "ecss"
    MPS0 = "mps0"
    MPS1 = "mps1"
    MPS2 = "mps2"
    MPS3 = "mps3"
    CUSTOM = "custom"

    @classmethod
    def parse(cls, name: str) -> "StateKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown state kind {name!r} (expected one of: {valid})") from None


MPS_INDEX = {StateKind.MPS0: 0, StateKind.MPS1: 1, StateKind.MPS2: 2, StateKind.MPS3: 3}


@dataclass(frozen=True)
class SuperposedState:
    """Ordered list of coherent terms with a normalization status flag."""

    terms: tuple[CoherentTerm, ...]
    normalized: bool = False

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise ValueError("state needs at least one term")
        object.__setattr__(self, "terms", terms)

    def weights(self) -> np.ndarray:
        return np.array([t.weight for t in self.terms], dtype=complex)

    def amplitudes(self) -> np.ndarray:
        return np.array([t.amplitude for t in self.terms], dtype=complex)


def gram_sum(terms) -> float:
    """sum_ij conj(w_i) w_j <a_i|a_j> for a term list; the squared norm."""
    terms = list(terms)
    if not terms:
        raise ValueError("empty term list")
    w = np.array([t.weight for t in terms], dtype=complex)
    a = np.array([t.amplitude for t in terms], dtype=complex)
    aa = np.abs(a) ** 2
    gram = np.exp(-0.5 * (aa[:, None] + aa[None, :]) + np.conj(a)[:, None] * a[None, :])
    total = np.conj(w) @ gram @ w
    if abs(total.imag) > 1e-12 * max(1.0, abs(total.real)):
        raise ArithmeticError(f"Gram sum not real: {total!r}")
    return float(total.real)


def normalization_constant(terms) -> float:
    """Scale factor that normalizes a term list, (sum_ij conj(w_i) w_j <a_i|a_j>)^(-1/2)."""
    total = gram_sum(terms)
    if total < GRAM_DEGENERACY_THRESHOLD:
        raise DegenerateState(f"Gram sum {total:.3e} below {GRAM_DEGENERACY_THRESHOLD:g}")
    return 1.0 / math.sqrt(total)


def _normalize_terms(terms) -> SuperposedState:
    scale = normalization_constant(terms)
    scaled = tuple(CoherentTerm(t.weight * scale, t.amplitude) for t in terms)
    return SuperposedState(scaled, normalized=True)


def custom_state(terms) -> SuperposedState:
    """Normalized state from an explicit term list."""
    return _normalize_terms([CoherentTerm(t.weight, t.amplitude) for t in terms])


def make_state(kind: StateKind, alpha: complex) -> SuperposedState:
    """Build a normalized state of the given kind with coherent amplitude ``alpha``.

    CS is the single coherent state |alpha>; ECSS the even superposition of
    |i alpha> and |-i alpha>; MPS_j the four-component superposition over
    (alpha, i alpha, -alpha, -i alpha) with weights (-i)^(j m).
    """
    alpha = complex(alpha)
    _require_finite(alpha, "alpha")
    if kind is StateKind.CS:
        return SuperposedState((CoherentTerm(1.0, alpha),), normalized=True)
    if kind is StateKind.ECSS:
        return _normalize_terms([CoherentTerm(1.0, 1j * alpha), CoherentTerm(1.0, -1j * alpha)])
    if kind in MPS_INDEX:
        j = MPS_INDEX[kind]
        terms = [CoherentTerm((-1j) ** (j * m), 1j**m * alpha) for m in range(4)]
        return _normalize_terms(terms)
    raise ValueError("custom states carry explicit term lists; use custom_state()")


def vacuum() -> SuperposedState:
    """The vacuum as a coherent state of amplitude zero."""
    return make_state(StateKind.CS, 0.0)


def mean_photon_number(state: SuperposedState) -> float:
    """<n> = sum_ij conj(w_i) w_j conj(a_i) a_j <a_i|a_j> of a normalized state."""
    if not state.normalized:
        raise ValueError("state must be normalized")
    w = state.weights()
    a = state.amplitudes()
    aa = np.abs(a) ** 2
    gram = np.exp(-0.5 * (aa[:, None] + aa[None, :]) + np.conj(a)[:, None] * a[None, :])
    val = np.conj(w) @ (np.conj(a)[:, None] * a[None, :] * gram) @ w
    if abs(val.imag) > 1e-12 * max(1.0, abs(val.real)):
        raise ArithmeticError(f"mean photon number not real: {val!r}")
    return max(float(val.real), 0.0)


@dataclass(frozen=True)
class CoherentDyad:
    """coeff * |ket><bra| between coherent states; building block of mixed states."""

    coeff: complex
    ket: complex
    bra: complex


@dataclass(frozen=True)
class CoherentDyadMixture:
    """Operator given as a finite sum of coherent dyads (e.g. a reduced port state)."""

    dyads: tuple[CoherentDyad, ...]

    def trace(self) -> complex:
        return sum(d.coeff * overlap(d.bra, d.ket) for d in self.dyads)


def as_dyad_mixture(state: SuperposedState) -> CoherentDyadMixture:
    """Density operator |psi><psi| of a pure superposition in dyad form."""
    if not state.normalized:
        raise ValueError("state must be normalized")
    dyads = []
    for ti in state.terms:
        for tj in state.terms:
            dyads.append(CoherentDyad(tj.weight * ti.weight.conjugate(), tj.amplitude, ti.amplitude))
    return CoherentDyadMixture(tuple(dyads))
