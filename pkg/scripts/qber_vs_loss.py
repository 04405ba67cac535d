"""QBER and sift ratio against extra channel loss, shot noise on.

    python scripts/qber_vs_loss.py [--frames 20000]
"""

import argparse

import numpy as np

from scwlink.config import LinkConfig
from scwlink.scenarios import ensure_calibrated, sweep


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--frames", type=int, default=20_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    cfg, _ = ensure_calibrated(LinkConfig())
    rows = sweep(cfg, "channel_loss_db", np.arange(0.0, 45.0, 5.0), n_frames=args.frames, seed=args.seed)
    print(f"{'loss dB':>8} {'contrast V':>11} {'QBER':>8}")
    for r in rows:
        print(f"{r['value']:8.1f} {r['contrast']:11.4g} {r['qber']:8.4f}")


if __name__ == "__main__":
    main()
