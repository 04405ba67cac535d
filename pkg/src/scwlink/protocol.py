"""Four-phase encoding, bit decisions, sessions and sifting.

Bases: 0 uses phases {0, pi}, 1 uses {pi/2, 3pi/2}; bit 0 is the first phase
of each pair.  Bob re-modulates at his basis' bit-0 phase, so a matched
basis puts the interference phase at 0 (bit 0, high level) or pi (bit 1,
low level) and a mismatched basis lands on the mid level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .config import LinkConfig
from .detection import DetectionRecord, balanced_output, sample_noisy_current
from .link import levels, noiseless_record

INCONCLUSIVE = None


@dataclass(frozen=True)
class PhaseAlphabet:
    states: tuple[float, ...] = (0.0, math.pi / 2, math.pi, 3 * math.pi / 2)

    def __post_init__(self) -> None:
        if len(self.states) != 4:
            raise ValueError("alphabet needs exactly four phases")
        reduced = [s % (2 * math.pi) for s in self.states]
        for i in range(4):
            for j in range(i + 1, 4):
                if math.isclose(reduced[i], reduced[j], abs_tol=1e-12):
                    raise ValueError("alphabet phases must be distinct mod 2pi")
        for basis in (0, 1):
            gap = (self.states[basis + 2] - self.states[basis]) % (2 * math.pi)
            if not math.isclose(gap, math.pi, abs_tol=1e-12):
                raise ValueError("the two phases of a basis must differ by pi")

    def phase(self, bit: int, basis: int) -> float:
        return self.states[basis + 2 * bit]


DEFAULT_ALPHABET = PhaseAlphabet()


def encode(bit: int, basis: int, alphabet: PhaseAlphabet = DEFAULT_ALPHABET) -> float:
    if bit not in (0, 1) or basis not in (0, 1):
        raise ValueError("bit and basis must be 0 or 1")
    return alphabet.phase(bit, basis)


@dataclass(frozen=True)
class Thresholds:
    v_high: float
    v_low: float
    guard_fraction: float = 0.5

    def __post_init__(self) -> None:
        if not self.v_high > self.v_low:
            raise ValueError(f"v_high ({self.v_high}) must exceed v_low ({self.v_low})")
        if not 0 <= self.guard_fraction < 1:
            raise ValueError("guard_fraction must lie in [0, 1)")

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.v_high + self.v_low)

    @property
    def guard(self) -> float:
        return self.guard_fraction * 0.5 * (self.v_high - self.v_low)

    @property
    def upper(self) -> float:
        return self.midpoint + self.guard

    @property
    def lower(self) -> float:
        return self.midpoint - self.guard


def decide_level(v: float, thresholds: Thresholds) -> Optional[int]:
    if v > thresholds.upper:
        return 0
    if v < thresholds.lower:
        return 1
    return INCONCLUSIVE


def decide_bit(record: DetectionRecord, thresholds: Thresholds, readout: str = "balanced") -> Optional[int]:
    """Bit 0 above the upper threshold, bit 1 below the lower, else None."""
    v = record.v_out if readout == "balanced" else record.v_pd1
    return decide_level(v, thresholds)


def session_thresholds(cfg: LinkConfig) -> Thresholds:
    proto = cfg.protocol
    if proto.v_high is not None:
        return Thresholds(proto.v_high, proto.v_low, proto.guard_fraction)
    v_high, _, v_low = levels(cfg)
    return Thresholds(v_high, v_low, proto.guard_fraction)


@dataclass(frozen=True)
class Frame:
    index: int
    alice_basis: int
    alice_bit: int
    alice_phase: float
    bob_basis: int
    bob_phase: float
    detection: DetectionRecord
    bob_bit: Optional[int]

    @property
    def matched(self) -> bool:
        return self.alice_basis == self.bob_basis


@dataclass
class SiftResult:
    kept_indices: list[int] = field(default_factory=list)
    alice_key: list[int] = field(default_factory=list)
    bob_key: list[int] = field(default_factory=list)
    qber: float = 0.0
    sift_ratio: float = 0.0
    empty: bool = True


def _as_generator(rng: np.random.Generator | int | None, default_seed: int) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(default_seed if rng is None else rng)


def run_session(
    n_frames: int,
    cfg: LinkConfig,
    rng: np.random.Generator | int | None = None,
    alphabet: PhaseAlphabet = DEFAULT_ALPHABET,
    thresholds: Thresholds | None = None,
) -> list[Frame]:
    """Simulate ``n_frames`` symbols end to end.

    Basis/bit choices and detector noise come from separate child streams of
    ``rng`` (a Generator or a seed; default the config's noise seed), so the
    noise draws do not depend on how the choices were consumed.
    """
    if n_frames < 1:
        raise ValueError("n_frames must be >= 1")
    gen = _as_generator(rng, cfg.detection.noise.seed)
    choice_rng, noise_rng = gen.spawn(2)
    if thresholds is None:
        thresholds = session_thresholds(cfg)

    alice_bits = choice_rng.integers(0, 2, n_frames)
    alice_bases = choice_rng.integers(0, 2, n_frames)
    bob_bases = choice_rng.integers(0, 2, n_frames)

    # the optical chain is deterministic in the phase pair; evaluate each once
    chain: dict[tuple[int, int, int], DetectionRecord] = {}
    i1 = np.empty(n_frames)
    i2 = np.empty(n_frames)
    for k in range(n_frames):
        key = (int(alice_bits[k]), int(alice_bases[k]), int(bob_bases[k]))
        rec = chain.get(key)
        if rec is None:
            rec = noiseless_record(cfg, alphabet.phase(key[0], key[1]), alphabet.phase(0, key[2]))
            chain[key] = rec
        i1[k] = rec.i_pd1
        i2[k] = rec.i_pd2

    det = cfg.detection
    if det.noise.enabled:
        i1 = sample_noisy_current(i1, det.pd1, det.noise, noise_rng)
        i2 = sample_noisy_current(i2, det.pd2, det.noise, noise_rng)
    delta_i, v_out = balanced_output(i1, i2, det.amp)
    v_pd1 = i1 * det.amp.conversion
    readout = v_out if det.readout == "balanced" else v_pd1

    frames = []
    for k in range(n_frames):
        record = DetectionRecord(float(i1[k]), float(i2[k]), float(delta_i[k]), float(v_out[k]), float(v_pd1[k]))
        frames.append(
            Frame(
                index=k,
                alice_basis=int(alice_bases[k]),
                alice_bit=int(alice_bits[k]),
                alice_phase=alphabet.phase(int(alice_bits[k]), int(alice_bases[k])),
                bob_basis=int(bob_bases[k]),
                bob_phase=alphabet.phase(0, int(bob_bases[k])),
                detection=record,
                bob_bit=decide_level(float(readout[k]), thresholds),
            )
        )
    return frames


def sift(frames: Sequence[Frame]) -> SiftResult:
    """Keep matched-basis frames with a conclusive decision."""
    kept = [f for f in frames if f.matched and f.bob_bit is not INCONCLUSIVE]
    result = SiftResult(
        kept_indices=[f.index for f in kept],
        alice_key=[f.alice_bit for f in kept],
        bob_key=[f.bob_bit for f in kept],
        sift_ratio=len(kept) / len(frames) if frames else 0.0,
        empty=not kept,
    )
    if kept:
        errors = sum(a != b for a, b in zip(result.alice_key, result.bob_key))
        result.qber = errors / len(kept)
    return result


def conclusive_fraction(frames: Sequence[Frame]) -> float:
    if not frames:
        return 0.0
    return sum(f.bob_bit is not INCONCLUSIVE for f in frames) / len(frames)
