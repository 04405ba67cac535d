"""Levels, visibility and heterodyne gain against the receiver modulation index.

Marks the J0 = J1 point and the index the 3.5/3.2 V calibration lands on.
"""

import numpy as np

from scwlink.bessel import equality_index
from scwlink.config import LinkConfig, with_noise
from scwlink.scenarios import calibrate_to_levels, ensure_calibrated, sweep


def main():
    cfg, cal = ensure_calibrated(with_noise(LinkConfig(), disable=True))
    grid = sorted(set(np.round(np.linspace(0.4, 2.4, 21), 3)) | {round(equality_index(), 4), round(cal.m_b, 4)})
    print(f"J0=J1 at m={equality_index():.4f}; calibrated m_B={cal.m_b:.4f}")
    print(f"{'m_B':>7} {'v_high':>8} {'v_low':>8} {'visib.':>8} {'gain dB(P)':>10} {'gain dB(A)':>10}")
    for r in sweep(cfg, "m_B", grid):
        print(f"{r['value']:7.4f} {r['v_high']:8.4f} {r['v_low']:8.4f} {r['visibility']:8.4f} "
              f"{r['gain_db_power']:10.2f} {r['gain_db_amplitude']:10.2f}")


if __name__ == "__main__":
    main()
