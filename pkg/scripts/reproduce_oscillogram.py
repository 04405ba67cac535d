"""Calibrate the default link to 3.5 V / 3.2 V and print the four-state staircase.

    python scripts/reproduce_oscillogram.py [--noise] [--out trace.csv]
"""

import argparse

from scwlink.config import LinkConfig, with_noise
from scwlink.link import bob_input_power, with_changes
from scwlink.scenarios import apply_calibration, calibrate_to_levels, run_oscillogram, state_levels, write_trace


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--noise", action="store_true")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=None)
    args = parser.parse_args()

    cfg = with_noise(LinkConfig(), seed=args.seed, disable=not args.noise)
    for readout in ("balanced", "single_ended"):
        trial = with_changes(cfg, detection={"readout": readout})
        cal = calibrate_to_levels(trial)
        calibrated = apply_calibration(trial, cal)
        rows = run_oscillogram(calibrated, frames_per_state=4, seed=args.seed)
        levels = state_levels(rows)
        print(f"{readout:>12}: m_B={cal.m_b:.5f}  P_bob={bob_input_power(calibrated) * 1e6:.2f} uW  "
              f"loss={cal.implied_link_loss_db(trial):.2f} dB  "
              + "  ".join(f"{k}={v:.4f} V" for k, v in levels.items()))
        if args.out and readout == "balanced":
            write_trace(rows, args.out)


if __name__ == "__main__":
    main()
