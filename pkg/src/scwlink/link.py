"""Noiseless forward model of the whole link.

sender modulator -> fiber -> attenuator -> receiver modulator -> filter ->
balanced detector.  Phase convention: the interference phase is
``alice_phase - bob_phase``; zero is constructive.
"""

from __future__ import annotations

import dataclasses
import math

from scipy.constants import c as SPEED_OF_LIGHT

from .bessel import bessel_j, equality_index
from .components import apply_attenuator, apply_channel, split_filter
from .config import LinkConfig
from .detection import DetectionRecord, NoiseSpec, detect
from .spectra import ModulationParams, OpticalField, modulate, total_power

# first zero of J0; 1 - J0(m)^2 is monotone below it
J0_FIRST_ZERO = 2.404825557695773


def derive_sender_index(carrier_power: float, sideband_power: float, tol: float = 1e-12) -> float:
    """Modulation index that splits power carrier:sidebands as given.

    Solves 1 - J0(m)^2 = sideband / (carrier + sideband) by bisection.
    """
    if carrier_power <= 0 or sideband_power < 0:
        raise ValueError("carrier power must be > 0 and sideband power >= 0")
    ratio = sideband_power / (carrier_power + sideband_power)
    if ratio >= 0.5:
        raise ValueError(f"sideband fraction {ratio:.3g} is not a weak modulation (must be < 0.5)")
    if ratio == 0:
        return 0.0

    def excess(m: float) -> float:
        return 1.0 - bessel_j(0, m) ** 2 - ratio

    seed = math.sqrt(2.0 * ratio)
    lo, hi = 0.0, min(J0_FIRST_ZERO, 2.0 * seed)
    while excess(hi) < 0:
        lo, hi = hi, min(J0_FIRST_ZERO, 2.0 * hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if excess(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sender_index(cfg: LinkConfig) -> float:
    if cfg.sender.mod_index is not None:
        return cfg.sender.mod_index
    return derive_sender_index(cfg.sender.carrier_power_w, cfg.sender.sideband_power_w)


def receiver_index(cfg: LinkConfig) -> float:
    if cfg.receiver.mod_index is not None:
        return cfg.receiver.mod_index
    return equality_index()


def sender_field(cfg: LinkConfig, alice_phase: float) -> OpticalField:
    m_a = sender_index(cfg)
    # scale so the modulated carrier carries exactly carrier_power_w
    total = cfg.sender.carrier_power_w / bessel_j(0, m_a) ** 2
    carrier = OpticalField.carrier(
        total, carrier_freq=SPEED_OF_LIGHT / cfg.laser.wavelength_m, rf_freq=cfg.sender.rf_freq_hz
    )
    return modulate(carrier, ModulationParams(m_a, alice_phase))


def bob_input_field(cfg: LinkConfig, alice_phase: float) -> OpticalField:
    return apply_attenuator(apply_channel(sender_field(cfg, alice_phase), cfg.channel), cfg.attenuator)


def receiver_ports(
    cfg: LinkConfig, incoming: OpticalField, bob_phase: float
) -> tuple[OpticalField, OpticalField]:
    remodulated = modulate(incoming, ModulationParams(receiver_index(cfg), bob_phase))
    return split_filter(remodulated, cfg.receiver.filter)


def record_for_input(cfg: LinkConfig, incoming: OpticalField, bob_phase: float) -> DetectionRecord:
    """Noiseless detection of an arbitrary field arriving at the receiver."""
    transmitted, reflected = receiver_ports(cfg, incoming, bob_phase)
    det = cfg.detection
    return detect(transmitted, reflected, det.pd1, det.pd2, det.amp, NoiseSpec(shot_noise=False))


def noiseless_record(cfg: LinkConfig, alice_phase: float, bob_phase: float) -> DetectionRecord:
    return record_for_input(cfg, bob_input_field(cfg, alice_phase), bob_phase)


def readout_voltage(cfg: LinkConfig, record: DetectionRecord) -> float:
    return record.v_out if cfg.detection.readout == "balanced" else record.v_pd1


def voltage_at(cfg: LinkConfig, delta_phi: float) -> float:
    """Noiseless readout voltage at interference phase ``delta_phi``."""
    return readout_voltage(cfg, noiseless_record(cfg, delta_phi, 0.0))


def levels(cfg: LinkConfig) -> tuple[float, float, float]:
    """Noiseless (constructive, quadrature, destructive) readout voltages."""
    return voltage_at(cfg, 0.0), voltage_at(cfg, math.pi / 2), voltage_at(cfg, math.pi)


def bob_input_power(cfg: LinkConfig) -> float:
    return total_power(bob_input_field(cfg, 0.0))


def with_changes(cfg: LinkConfig, **sections: dict) -> LinkConfig:
    """Copy of ``cfg`` with fields of named sections replaced,
    e.g. ``with_changes(cfg, receiver={"mod_index": 1.7})``."""
    updates = {}
    for name, changes in sections.items():
        updates[name] = dataclasses.replace(getattr(cfg, name), **changes)
    return dataclasses.replace(cfg, **updates)
