"""Finite sideband spectra and exact phase modulation.

A field is a carrier at ``carrier_freq`` plus sidebands at ``carrier_freq +
n * rf_freq``.  Amplitudes are dimensionless and stored as a centred complex
array (index ``order`` is the carrier); ``power_scale`` carries the watts so
nW-level sidebands never get anywhere near underflow.

Phase modulation uses the Jacobi-Anger identity

    exp(i m cos(theta + phi)) = sum_n i^n J_n(m) exp(i n (theta + phi))

so modulating a field is a discrete convolution of its amplitudes with that
kernel.  The familiar three-term small-index form (carrier ~ 1, sidebands
+-i m/2) falls out as the m -> 0 limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .bessel import MAX_ARGUMENT, bessel_j_table

TWO_PI = 2.0 * math.pi
DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class ModulationParams:
    index: float
    rf_phase: float = 0.0

    def __post_init__(self) -> None:
        if not (self.index >= 0.0) or not math.isfinite(self.index):
            raise ValueError(f"modulation index must be finite and >= 0, got {self.index!r}")
        object.__setattr__(self, "rf_phase", float(self.rf_phase) % TWO_PI)


@dataclass(frozen=True, eq=False)
class OpticalField:
    """Carrier plus sidebands; ``amplitudes[order + n]`` is sideband ``n``."""

    amplitudes: np.ndarray
    power_scale: float = 1.0
    carrier_freq: float = 0.0
    rf_freq: float = 0.0

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex).copy()
        if amps.ndim != 1 or amps.size % 2 != 1:
            raise ValueError("amplitudes must be a 1-D array of odd length (centred on the carrier)")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        if not (self.power_scale >= 0.0) or not math.isfinite(self.power_scale):
            raise ValueError(f"power_scale must be finite and >= 0, got {self.power_scale!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def carrier(cls, power: float, carrier_freq: float = 0.0, rf_freq: float = 0.0) -> "OpticalField":
        return cls(np.array([1.0 + 0j]), float(power), carrier_freq, rf_freq)

    @classmethod
    def from_dict(
        cls,
        coeffs: Mapping[int, complex],
        power_scale: float = 1.0,
        carrier_freq: float = 0.0,
        rf_freq: float = 0.0,
    ) -> "OpticalField":
        order = max((abs(int(n)) for n in coeffs), default=0)
        amps = np.zeros(2 * order + 1, dtype=complex)
        for n, a in coeffs.items():
            amps[order + int(n)] = a
        return cls(amps, power_scale, carrier_freq, rf_freq)

    @property
    def order(self) -> int:
        return (self.amplitudes.size - 1) // 2

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.order, self.order + 1)

    def coefficient(self, n: int) -> complex:
        if abs(n) > self.order:
            return 0j
        return complex(self.amplitudes[self.order + n])

    def as_dict(self) -> dict[int, complex]:
        return {int(n): complex(a) for n, a in zip(self.indices, self.amplitudes) if a != 0 or n == 0}

    def padded(self, order: int) -> np.ndarray:
        """Amplitudes zero-padded (or cut) to span -order..order."""
        out = np.zeros(2 * order + 1, dtype=complex)
        k = min(order, self.order)
        out[order - k : order + k + 1] = self.amplitudes[self.order - k : self.order + k + 1]
        return out

    def with_amplitudes(self, amplitudes: np.ndarray) -> "OpticalField":
        return OpticalField(amplitudes, self.power_scale, self.carrier_freq, self.rf_freq)

    def with_power_scale(self, power_scale: float) -> "OpticalField":
        return OpticalField(self.amplitudes, power_scale, self.carrier_freq, self.rf_freq)

    def trimmed(self, tol: float = DEFAULT_TOL) -> "OpticalField":
        """Drop outer sideband pairs whose amplitudes are both below ``tol``
        (relative to the rms amplitude of the whole spectrum)."""
        amps = self.amplitudes
        norm = math.sqrt(float(np.sum(np.abs(amps) ** 2)))
        cut = tol * norm
        k = self.order
        while k > 0 and abs(amps[self.order - k]) < cut and abs(amps[self.order + k]) < cut:
            k -= 1
        if k == self.order:
            return self
        return self.with_amplitudes(amps[self.order - k : self.order + k + 1])

    def power_at(self, n: int) -> float:
        return abs(self.coefficient(n)) ** 2 * self.power_scale

    def carrier_power(self) -> float:
        return self.power_at(0)

    def sideband_power(self) -> float:
        return total_power(self) - self.carrier_power()


def total_power(field: OpticalField) -> float:
    """Optical power in watts."""
    return float(np.sum(np.abs(field.amplitudes) ** 2)) * field.power_scale


def truncation_order(m: float, tol: float = DEFAULT_TOL) -> int:
    """Smallest N with sum_{|n|>N} J_n(m)^2 < tol.

    The tail is summed directly from the squared Bessel values; by
    sum_n J_n(m)^2 = 1 it equals one minus the retained power.
    """
    if not (0.0 < tol <= 1e-3):
        raise ValueError(f"tol must lie in (0, 1e-3], got {tol!r}")
    if m < 0:
        raise ValueError(f"modulation index must be >= 0, got {m!r}")
    if m == 0.0:
        return 0
    n_max = int(m) + 40 + int(4.0 * math.sqrt(m + 1.0)) + int(-math.log10(tol))
    j = bessel_j_table(n_max, m)
    # tails[k] = sum_{n >= k} J_n^2
    tails = np.cumsum((j**2)[::-1])[::-1]
    for n in range(n_max):
        if 2.0 * tails[n + 1] < tol:
            return n
    return n_max


def jacobi_anger_kernel(params: ModulationParams, order: int) -> np.ndarray:
    """Coefficients i^n J_n(m) e^{i n phi} for n = -order..order."""
    j = bessel_j_table(order, params.index)
    n = np.arange(-order, order + 1)
    jn = j[np.abs(n)] * np.where((n < 0) & (n % 2 == 1), -1.0, 1.0)
    return (1j**n) * jn * np.exp(1j * n * params.rf_phase)


def modulate(field: OpticalField, params: ModulationParams, tol: float = DEFAULT_TOL) -> OpticalField:
    """Pass ``field`` through a phase modulator driven at its own rf_freq.

    The kernel is kept out to ``truncation_order(m, tol**2)``, so every
    dropped kernel coefficient is below ~tol in amplitude; the output is then
    trimmed of outer pairs below tol.  Power is conserved to far better than
    tol.
    """
    if params.index == 0.0:
        return field
    if params.index > MAX_ARGUMENT:
        raise ValueError(f"modulation index above {MAX_ARGUMENT} is outside the simulation range")
    k_order = truncation_order(params.index, min(max(tol * tol, 1e-300), 1e-3))
    kernel = jacobi_anger_kernel(params, k_order)
    out = np.convolve(field.amplitudes, kernel)
    return field.with_amplitudes(out).trimmed(tol)


def compose_check(m1: float, phi1: float, m2: float, phi2: float) -> ModulationParams:
    """Single modulator equivalent to two cascaded ones at the same RF frequency.

    m1 cos(t + phi1) + m2 cos(t + phi2) is one sinusoid with phasor
    m1 e^{i phi1} + m2 e^{i phi2}.
    """
    if m1 < 0 or m2 < 0:
        raise ValueError("modulation indices must be >= 0")
    re = m1 * math.cos(phi1) + m2 * math.cos(phi2)
    im = m1 * math.sin(phi1) + m2 * math.sin(phi2)
    m_eff = math.hypot(re, im)
    if m_eff == 0.0:
        return ModulationParams(0.0, 0.0)
    return ModulationParams(m_eff, math.atan2(im, re))


def synthesize_time_domain(field: OpticalField, n_samples: int) -> np.ndarray:
    """Complex envelope sum_n a_n e^{i n theta_k} at theta_k = 2 pi k / n_samples."""
    if n_samples < 2 * field.order + 1:
        raise ValueError(
            f"{n_samples} samples alias a spectrum of order {field.order}; "
            f"need at least {2 * field.order + 1}"
        )
    spectrum = np.zeros(n_samples, dtype=complex)
    spectrum[field.indices % n_samples] = field.amplitudes
    return np.fft.ifft(spectrum) * n_samples


def spectrum_from_samples(samples: np.ndarray, order: int) -> np.ndarray:
    """Inverse of synthesize_time_domain: DFT coefficients for n = -order..order."""
    samples = np.asarray(samples, dtype=complex)
    coeffs = np.fft.fft(samples) / samples.size
    return coeffs[np.arange(-order, order + 1) % samples.size]
