import math

import numpy as np
import pytest
from scipy.special import jv

from scwlink.config import LinkConfig, with_noise
from scwlink.detection import NoiseSpec
from scwlink.link import (
    J0_FIRST_ZERO,
    bob_input_power,
    derive_sender_index,
    levels,
    sender_field,
    with_changes,
)
from scwlink.scenarios import (
    CalibrationError,
    apply_calibration,
    calibrate_to_levels,
    gain_report,
    run_oscillogram,
    run_protocol,
    state_levels,
    sweep,
    write_trace,
)
from scwlink.spectra import total_power

from conftest import bisect

QUIET = with_noise(LinkConfig(), disable=True)


class TestSenderIndex:
    def test_no_sidebands(self):
        assert derive_sender_index(600e-6, 0.0) == 0.0

    def test_published_powers(self):
        ratio = 500e-9 / (600e-6 + 500e-9)
        oracle = bisect(lambda m: 1 - jv(0, m) ** 2 - ratio, 0.0, 1.0)
        m = derive_sender_index(600e-6, 500e-9)
        assert m == pytest.approx(oracle, abs=1e-11)
        assert m == pytest.approx(0.0408, abs=5e-4)
        assert m == pytest.approx(math.sqrt(2 * ratio), rel=1e-3)

    def test_small_index_round_trip(self):
        p = 1e-3
        assert derive_sender_index(p, p * 0.01**2 / 2) == pytest.approx(0.01, abs=1e-6)

    def test_rejects_strong_modulation(self):
        with pytest.raises(ValueError):
            derive_sender_index(1e-3, 1e-3)

    def test_sender_field_powers(self):
        f = sender_field(QUIET, 0.3)
        assert f.carrier_power() == pytest.approx(600e-6, rel=1e-12)
        assert f.sideband_power() == pytest.approx(500e-9, rel=1e-9)


class TestCalibration:
    def test_paper_levels(self, paper_calibration):
        cal = paper_calibration
        assert cal.residual < 1e-6
        assert 0.01 < cal.m_b < 2.40
        assert 0 < cal.bob_input_power <= 600e-6
        assert cal.v_constructive == pytest.approx(3.5, rel=1e-9)
        assert cal.v_destructive == pytest.approx(3.2, rel=1e-9)
        # about 10.8 dB of link loss absorbed
        assert cal.implied_link_loss_db(QUIET) == pytest.approx(10.8, abs=0.05)

    def test_applied_config_reproduces_levels(self, calibrated):
        v_high, v_mid, v_low = levels(calibrated)
        assert v_high == pytest.approx(3.5, rel=1e-9)
        assert v_low == pytest.approx(3.2, rel=1e-9)
        assert v_low < v_mid < v_high
        assert bob_input_power(calibrated) == pytest.approx(50e-6, rel=0.01)

    def test_equal_targets_fail(self):
        with pytest.raises(CalibrationError):
            calibrate_to_levels(QUIET, 3.5, 3.5)

    @pytest.mark.parametrize("m_b, power", [(1.6, 120e-6), (2.1, 20e-6), (1.3, 300e-6)])
    def test_round_trip(self, m_b, power):
        loss = 10 * math.log10(total_power(sender_field(QUIET, 0.0)) / power)
        forward = with_changes(QUIET, receiver={"mod_index": m_b}, attenuator={"loss_db": loss})
        v_high, _, v_low = levels(forward)
        cal = calibrate_to_levels(QUIET, v_high, v_low)
        assert cal.m_b == pytest.approx(m_b, abs=1e-8)
        assert cal.bob_input_power == pytest.approx(power, rel=1e-8)

    def test_single_ended_interpretation(self):
        cfg = with_changes(QUIET, detection={"readout": "single_ended"})
        cal = calibrate_to_levels(cfg, 3.5, 3.2)
        assert cal.residual < 1e-6
        assert levels(apply_calibration(cfg, cal))[0] == pytest.approx(3.5, rel=1e-9)

    def test_unreachable_targets_dump_curve(self, tmp_path):
        # 35 V at the constructive level needs more power than the sender emits
        cal = calibrate_to_levels(QUIET, 350.0, 320.0)
        with pytest.raises(CalibrationError):
            apply_calibration(QUIET, cal)
        with pytest.raises(CalibrationError) as info:
            calibrate_to_levels(QUIET, 3.5, 3.2, bracket=(0.01, 0.5))
        info.value.dump_curve(tmp_path / "curve.csv")
        assert (tmp_path / "curve.csv").read_text().startswith("m_B,")


class TestOscillogram:
    def test_four_level_staircase(self, calibrated):
        rows = run_oscillogram(calibrated, frames_per_state=2, samples_per_frame=4)
        lv = state_levels(rows)
        assert lv["0"] == pytest.approx(3.5, rel=1e-9)
        assert lv["pi"] == pytest.approx(3.2, rel=1e-9)
        assert abs(lv["pi/2"] - lv["3pi/2"]) < 1e-10
        assert lv["pi/2"] == pytest.approx(3.35, abs=0.01)
        assert len(rows) == 4 * 2 * 4
        assert rows[1].time_s == pytest.approx(1 / (12.5e6 * 4))

    def test_single_state(self, calibrated):
        rows = run_oscillogram(calibrated, [0.0], frames_per_state=3)
        assert all(r.v_out == pytest.approx(3.5, rel=1e-9) for r in rows)

    def test_noisy_means_and_spread(self, calibrated_noisy):
        rows = run_oscillogram(calibrated_noisy, [0.0], frames_per_state=500, samples_per_frame=20, seed=3)
        v = np.array([r.v_out for r in rows])
        # independent PD1/PD2 shot noise add in quadrature through 1e5 V/A
        from scwlink.link import noiseless_record

        rec = noiseless_record(calibrated_noisy, 0.0, 0.0)
        sigma = 1e5 * math.sqrt(2 * 1.602176634e-19 * 2e9 * (rec.i_pd1 + rec.i_pd2))
        assert v.mean() == pytest.approx(3.5, abs=4 * sigma / math.sqrt(v.size))
        assert v.std() == pytest.approx(sigma, rel=0.05)

    def test_trace_is_bit_identical(self, calibrated_noisy, tmp_path):
        write_trace(run_oscillogram(calibrated_noisy, seed=7), tmp_path / "a.csv")
        write_trace(run_oscillogram(calibrated_noisy, seed=7), tmp_path / "b.csv")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        header = (tmp_path / "a.csv").read_text().splitlines()[0]
        assert header == "time_s,v_out_V,alice_phase_rad,bob_phase_rad,state_label"


class TestSweep:
    def test_visibility(self, calibrated):
        rows = sweep(calibrated, "delta_phi", [0.0, math.pi])
        assert rows[0]["v_at"] == pytest.approx(3.5, rel=1e-9)
        assert rows[1]["v_at"] == pytest.approx(3.2, rel=1e-9)
        assert rows[0]["visibility"] == pytest.approx(0.3 / 6.7, rel=1e-8)

    def test_extinction_converges_to_ideal(self, calibrated):
        rows = sweep(calibrated, "extinction_db", [20, 30, 40, 50, 60])
        ideal = sweep(calibrated, "extinction_db", [250])[0]
        gaps = [abs(r["v_high"] - ideal["v_high"]) for r in rows]
        assert all(a > b for a, b in zip(gaps, gaps[1:]))
        highs = [r["v_high"] for r in rows]
        assert all(a < b for a, b in zip(highs, highs[1:]))

    def test_equality_point_in_m_b_sweep(self, calibrated):
        m_star = bisect(lambda m: jv(0, m) - jv(1, m), 1.0, 2.0)
        rows = sweep(calibrated, "m_B", [m_star])
        assert m_star == pytest.approx(1.4347, abs=5e-4)
        assert rows[0]["contrast"] > 0

    def test_sideband_power_sweep_gain(self, calibrated):
        rows = sweep(calibrated, "sideband_power", [50e-9, 500e-9])
        assert rows[1]["contrast"] > rows[0]["contrast"]
        assert rows[1]["gain_db_amplitude"] == pytest.approx(2 * rows[1]["gain_db_power"])

    def test_unknown_parameter(self, calibrated):
        with pytest.raises(ValueError):
            sweep(calibrated, "temperature", [1.0])

    def test_qber_rises_with_loss(self, calibrated_noisy):
        rows = sweep(calibrated_noisy, "channel_loss_db", [0.0, 10.0, 20.0, 30.0, 40.0], n_frames=3000, seed=4)
        qber = [r["qber"] for r in rows]
        assert qber[0] == 0.0
        assert all(a <= b for a, b in zip(qber, qber[1:]))
        assert qber[-1] > 0.1


class TestProtocolRun:
    def test_noiseless(self, calibrated):
        report, frames = run_protocol(calibrated, 10_000, seed=0)
        assert report["qber"] == 0.0
        assert len(frames) == 10_000
        assert report["photons_per_bit_sender_sidebands"] == pytest.approx(3.12e5, rel=2e-3)

    def test_noisy_classical(self, calibrated_noisy):
        report, _ = run_protocol(calibrated_noisy, 10_000, seed=0)
        assert report["qber"] < 1e-6
        assert report["sift_ratio"] == pytest.approx(0.5, abs=3 * math.sqrt(0.25 / 10_000))


def test_gain_report(calibrated):
    report = gain_report(calibrated)
    assert report["published_currents"]["gain_db_power"] == pytest.approx(8.2, abs=0.05)
    assert report["published_currents"]["gain_db_amplitude"] == pytest.approx(16.5, abs=0.05)
    assert report["model"]["delta_i_variable_a"] == pytest.approx(3e-6, rel=1e-8)
    assert report["model"]["gain_db_power"] == pytest.approx(report["published_currents"]["gain_db_power"], abs=1e-6)
    assert report["published_claim_db"] == 18.0
    assert "power or an amplitude ratio" in report["note"]


def test_first_j0_zero():
    assert jv(0, J0_FIRST_ZERO) == pytest.approx(0.0, abs=1e-15)
