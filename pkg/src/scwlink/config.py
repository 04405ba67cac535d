"""Link configuration: nested dataclasses, YAML in and out.

Every key has a default taken from the reference experiment, so an empty
file is a valid config.  Unknown keys and out-of-range values are rejected
with the dotted key path in the message.
"""

from __future__ import annotations

import dataclasses
import re
import typing
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal, Optional

import yaml

from .components import AttenuatorSpec, ChannelSpec, FilterSpec
from .detection import AmplifierSpec, NoiseSpec, PhotodiodeSpec

Readout = Literal["balanced", "single_ended"]


class ConfigError(ValueError):
    pass


class _Loader(yaml.SafeLoader):
    pass


# plain YAML 1.1 resolves 1e-9 and 2.0e10 to strings; read them as floats
_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(
        r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
        |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
        |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
        |[-+]?\.(?:inf|Inf|INF)
        |\.(?:nan|NaN|NAN))$""",
        re.X,
    ),
    list("-+0123456789."),
)


@dataclass(frozen=True)
class LaserConfig:
    wavelength_nm: float = 1550.12
    power_w: float = 20e-3
    linewidth_hz: float = 1e6  # informational only

    def __post_init__(self) -> None:
        if not self.wavelength_nm > 0:
            raise ValueError("wavelength_nm must be > 0")
        if not self.power_w > 0:
            raise ValueError("power_w must be > 0")
        if not self.linewidth_hz >= 0:
            raise ValueError("linewidth_hz must be >= 0")

    @property
    def wavelength_m(self) -> float:
        return self.wavelength_nm * 1e-9


@dataclass(frozen=True)
class SenderConfig:
    """Sender modulator output.  With ``mod_index`` unset the index is
    solved from the carrier/sideband power split."""

    carrier_power_w: float = 600e-6
    sideband_power_w: float = 500e-9
    mod_index: Optional[float] = None
    rf_freq_hz: float = 4.8e9
    rf_bandwidth_hz: float = 10e9

    def __post_init__(self) -> None:
        if not self.carrier_power_w > 0:
            raise ValueError("carrier_power_w must be > 0")
        if not self.sideband_power_w >= 0:
            raise ValueError("sideband_power_w must be >= 0")
        if self.mod_index is not None and not self.mod_index >= 0:
            raise ValueError("mod_index must be >= 0")
        if not self.rf_freq_hz > 0 or not self.rf_bandwidth_hz > 0:
            raise ValueError("rf_freq_hz and rf_bandwidth_hz must be > 0")


@dataclass(frozen=True)
class ReceiverConfig:
    """Receiver modulator and spectral filter.  ``mod_index`` unset means
    "not calibrated yet"; the model then uses the J0 = J1 point."""

    mod_index: Optional[float] = None
    rf_bandwidth_hz: float = 10e9
    filter: FilterSpec = field(default_factory=FilterSpec)

    def __post_init__(self) -> None:
        if self.mod_index is not None and not self.mod_index > 0:
            raise ValueError("mod_index must be > 0")
        if not self.rf_bandwidth_hz > 0:
            raise ValueError("rf_bandwidth_hz must be > 0")


@dataclass(frozen=True)
class DetectionConfig:
    pd1: PhotodiodeSpec = field(default_factory=PhotodiodeSpec)
    pd2: PhotodiodeSpec = field(default_factory=PhotodiodeSpec)
    amp: AmplifierSpec = field(default_factory=AmplifierSpec)
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    readout: Readout = "balanced"

    def __post_init__(self) -> None:
        if self.readout not in ("balanced", "single_ended"):
            raise ValueError(f"readout must be 'balanced' or 'single_ended', got {self.readout!r}")


@dataclass(frozen=True)
class ProtocolConfig:
    symbol_rate_hz: float = 12.5e6
    guard_fraction: float = 0.5
    # decision levels; unset means "take them from the noiseless model"
    v_high: Optional[float] = None
    v_low: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.symbol_rate_hz > 0:
            raise ValueError("symbol_rate_hz must be > 0")
        if not 0 <= self.guard_fraction < 1:
            raise ValueError("guard_fraction must lie in [0, 1)")
        if (self.v_high is None) != (self.v_low is None):
            raise ValueError("v_high and v_low must be given together")
        if self.v_high is not None and not self.v_high > self.v_low:
            raise ValueError("v_high must exceed v_low")

    @property
    def bit_duration(self) -> float:
        return 1.0 / self.symbol_rate_hz


@dataclass(frozen=True)
class LinkConfig:
    laser: LaserConfig = field(default_factory=LaserConfig)
    sender: SenderConfig = field(default_factory=SenderConfig)
    channel: ChannelSpec = field(default_factory=ChannelSpec)
    attenuator: AttenuatorSpec = field(default_factory=AttenuatorSpec)
    receiver: ReceiverConfig = field(default_factory=ReceiverConfig)
    detection: DetectionConfig = field(default_factory=DetectionConfig)
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)

    def __post_init__(self) -> None:
        if self.sender.rf_freq_hz > self.sender.rf_bandwidth_hz:
            raise ValueError("sender.rf_freq_hz exceeds the sender modulator bandwidth")
        if self.sender.rf_freq_hz > self.receiver.rf_bandwidth_hz:
            raise ValueError("sender.rf_freq_hz exceeds the receiver modulator bandwidth")
        if self.sender.carrier_power_w + self.sender.sideband_power_w > self.laser.power_w:
            raise ValueError("sender output power exceeds the laser power")


def _coerce(tp: Any, value: Any, path: str) -> Any:
    origin = typing.get_origin(tp)
    if origin is typing.Union:
        args = [a for a in typing.get_args(tp) if a is not type(None)]
        if value is None:
            return None
        return _coerce(args[0], value, path)
    if origin is Literal:
        if value not in typing.get_args(tp):
            raise ConfigError(f"{path}: expected one of {typing.get_args(tp)}, got {value!r}")
        return value
    if tp is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected a boolean, got {value!r}")
        return value
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return value
    if tp is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        return float(value)
    if tp is str:
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        return value
    raise ConfigError(f"{path}: unsupported field type {tp!r}")


def from_dict(cls: type, data: Any, path: str = "") -> Any:
    """Build dataclass ``cls`` from plain nested mappings, strictly."""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path or '<root>'}: expected a mapping, got {type(data).__name__}")
    hints = typing.get_type_hints(cls)
    names = [f.name for f in dataclasses.fields(cls)]
    for key in data:
        if key not in names:
            raise ConfigError(f"{path + '.' if path else ''}{key}: unknown key")
    kwargs = {}
    for name in names:
        if name not in data:
            continue
        sub = f"{path}.{name}" if path else name
        tp = hints[name]
        if dataclasses.is_dataclass(tp):
            kwargs[name] = from_dict(tp, data[name], sub)
        else:
            kwargs[name] = _coerce(tp, data[name], sub)
    try:
        return cls(**kwargs)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path or '<root>'}: {exc}") from exc


def to_dict(cfg: LinkConfig) -> dict:
    return dataclasses.asdict(cfg)


def load_config(path: str | Path | None) -> LinkConfig:
    if path is None:
        return LinkConfig()
    text = Path(path).read_text()
    try:
        data = yaml.load(text, Loader=_Loader)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: parse error: {exc}") from exc
    return from_dict(LinkConfig, data)


def loads_config(text: str) -> LinkConfig:
    try:
        data = yaml.load(text, Loader=_Loader)
    except yaml.YAMLError as exc:
        raise ConfigError(f"parse error: {exc}") from exc
    return from_dict(LinkConfig, data)


def dumps_config(cfg: LinkConfig) -> str:
    return yaml.safe_dump(to_dict(cfg), sort_keys=False)


def save_config(cfg: LinkConfig, path: str | Path) -> None:
    Path(path).write_text(dumps_config(cfg))


def with_noise(cfg: LinkConfig, seed: int | None = None, disable: bool = False) -> LinkConfig:
    """Override the noise seed and/or switch all noise off."""
    noise = cfg.detection.noise
    if seed is not None:
        noise = dataclasses.replace(noise, seed=seed)
    if disable:
        noise = dataclasses.replace(noise, shot_noise=False, thermal_current_density=0.0)
    return dataclasses.replace(cfg, detection=dataclasses.replace(cfg.detection, noise=noise))
