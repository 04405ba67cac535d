"""Passive optics between the two modulators and the photodiodes.

Losses are spectrally flat: every sideband sees the same attenuation, which
is reasonable across a few GHz of fiber.  The Bragg-grating filter is a
binary two-port: the carrier bin goes one way, every other bin the other,
with a finite extinction leaking power into the wrong port.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT
from scipy.constants import h as PLANCK

from .spectra import OpticalField

# at or above this the filter is treated as ideal
IDEAL_EXTINCTION_DB = 200.0


@dataclass(frozen=True)
class FilterSpec:
    extinction_db: float = 30.0
    insertion_loss_db: float = 0.0

    def __post_init__(self) -> None:
        if not self.extinction_db > 0:
            raise ValueError(f"extinction_db must be > 0, got {self.extinction_db!r}")
        if not self.insertion_loss_db >= 0:
            raise ValueError(f"insertion_loss_db must be >= 0, got {self.insertion_loss_db!r}")

    @property
    def leakage(self) -> float:
        """Power fraction routed to the wrong port."""
        if self.extinction_db >= IDEAL_EXTINCTION_DB:
            return 0.0
        return 10.0 ** (-self.extinction_db / 10.0)


@dataclass(frozen=True)
class ChannelSpec:
    length_km: float = 0.0
    attenuation_db_per_km: float = 0.2
    excess_loss_db: float = 0.0

    def __post_init__(self) -> None:
        for name in ("length_km", "attenuation_db_per_km", "excess_loss_db"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)!r}")

    @property
    def loss_db(self) -> float:
        return self.length_km * self.attenuation_db_per_km + self.excess_loss_db


@dataclass(frozen=True)
class AttenuatorSpec:
    loss_db: float = 0.0

    def __post_init__(self) -> None:
        if not self.loss_db >= 0:
            raise ValueError(f"loss_db must be >= 0, got {self.loss_db!r}")


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def apply_loss(field: OpticalField, loss_db: float) -> OpticalField:
    if not loss_db >= 0:
        raise ValueError(f"loss must be >= 0 dB, got {loss_db!r}")
    if loss_db == 0:
        return field
    return field.with_power_scale(field.power_scale / db_to_linear(loss_db))


def apply_channel(field: OpticalField, spec: ChannelSpec) -> OpticalField:
    return apply_loss(field, spec.loss_db)


def apply_attenuator(field: OpticalField, spec: AttenuatorSpec) -> OpticalField:
    return apply_loss(field, spec.loss_db)


def split_filter(field: OpticalField, spec: FilterSpec) -> tuple[OpticalField, OpticalField]:
    """Return (transmitted, reflected).

    Sidebands go to the transmitted port, the carrier is reflected; each
    leaks a fraction ``spec.leakage`` of its power into the other port.
    """
    eps = spec.leakage
    is_carrier = field.indices == 0
    through = np.where(is_carrier, math.sqrt(eps), math.sqrt(1.0 - eps))
    back = np.where(is_carrier, math.sqrt(1.0 - eps), math.sqrt(eps))
    transmitted = apply_loss(field.with_amplitudes(field.amplitudes * through), spec.insertion_loss_db)
    reflected = apply_loss(field.with_amplitudes(field.amplitudes * back), spec.insertion_loss_db)
    return transmitted, reflected


def photon_energy(wavelength: float) -> float:
    return PLANCK * SPEED_OF_LIGHT / wavelength


def photons_per_bit(power: float, bit_duration: float, wavelength: float) -> float:
    """Mean photon number P*T*lambda/(h c) in one bit window."""
    if power < 0 or bit_duration <= 0 or wavelength <= 0:
        raise ValueError("power must be >= 0; bit_duration and wavelength must be > 0")
    return power * bit_duration / photon_energy(wavelength)
