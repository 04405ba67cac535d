"""Subcarrier-wave quantum link simulator with self-heterodyne balanced detection."""

from .bessel import bessel_j, equality_index
from .config import LinkConfig, load_config
from .link import derive_sender_index
from .spectra import ModulationParams, OpticalField, compose_check, modulate, total_power

__all__ = [
    "LinkConfig",
    "ModulationParams",
    "OpticalField",
    "bessel_j",
    "compose_check",
    "derive_sender_index",
    "equality_index",
    "load_config",
    "modulate",
    "total_power",
]
