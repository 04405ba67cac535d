import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scwlink.components import (
    ChannelSpec,
    FilterSpec,
    AttenuatorSpec,
    apply_channel,
    apply_loss,
    photon_energy,
    photons_per_bit,
    split_filter,
)
from scwlink.spectra import ModulationParams, OpticalField, modulate, total_power

H = 6.62607015e-34
C = 299792458.0


def test_apply_loss():
    f = OpticalField.carrier(600e-6)
    assert total_power(apply_loss(f, 0.0)) == pytest.approx(600e-6)
    assert total_power(apply_loss(f, 10 * math.log10(2))) == pytest.approx(300e-6)
    assert total_power(apply_loss(f, 10.8)) == pytest.approx(600e-6 * 10**-1.08, rel=1e-12)
    assert total_power(apply_loss(f, 10.8)) == pytest.approx(50e-6, rel=2e-3)
    with pytest.raises(ValueError):
        apply_loss(f, -1.0)


def test_loss_keeps_spectral_shape():
    f = modulate(OpticalField.carrier(1.0), ModulationParams(0.9, 0.3))
    g = apply_loss(f, 7.0)
    np.testing.assert_array_equal(f.amplitudes, g.amplitudes)


@pytest.mark.parametrize(
    "spec, expected",
    [
        (ChannelSpec(0.0, 0.2, 0.0), 600e-6),
        (ChannelSpec(50.0, 0.2, 0.0), 60e-6),
        (ChannelSpec(25.0, 0.2, 5.0), 60e-6),
    ],
)
def test_apply_channel(spec, expected):
    assert total_power(apply_channel(OpticalField.carrier(600e-6), spec)) == pytest.approx(expected)


def test_channel_commutes_with_modulation():
    f = OpticalField.carrier(1e-3)
    p = ModulationParams(1.1, 0.4)
    spec = ChannelSpec(12.0, 0.2, 1.5)
    a = apply_channel(modulate(f, p), spec)
    b = modulate(apply_channel(f, spec), p)
    assert a.power_scale == pytest.approx(b.power_scale)
    np.testing.assert_allclose(a.amplitudes, b.amplitudes, atol=1e-15)


@pytest.mark.parametrize("kwargs", [{"length_km": -1}, {"attenuation_db_per_km": -0.1}, {"excess_loss_db": -2}])
def test_channel_validation(kwargs):
    with pytest.raises(ValueError):
        ChannelSpec(**kwargs)


def test_attenuator_validation():
    with pytest.raises(ValueError):
        AttenuatorSpec(-3.0)


class TestFilter:
    def test_carrier_leaks_extinction(self):
        t, r = split_filter(OpticalField.carrier(1.0), FilterSpec(30.0))
        assert total_power(t) == pytest.approx(1e-3, rel=1e-12)
        assert total_power(r) == pytest.approx(0.999, rel=1e-12)

    def test_ideal_filter_routes_sidebands(self):
        f = OpticalField.from_dict({-1: 0.5j, 1: 0.5j})
        t, r = split_filter(f, FilterSpec(250.0))
        assert total_power(t) == pytest.approx(0.5)
        assert total_power(r) == 0.0

    def test_higher_orders_go_to_transmitted_port(self):
        f = OpticalField.from_dict({0: 0.0, 3: 1.0, -2: 1.0})
        t, r = split_filter(f, FilterSpec(200.0))
        assert total_power(t) == pytest.approx(2.0)
        assert total_power(r) == 0.0

    def test_insertion_loss_applies_to_both_ports(self):
        f = OpticalField.from_dict({0: 1.0, 1: 1.0})
        t, r = split_filter(f, FilterSpec(30.0, 3.0))
        assert total_power(t) + total_power(r) == pytest.approx(2.0 * 10 ** -0.3)

    @settings(max_examples=100, deadline=None)
    @given(
        st.lists(st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False), min_size=1, max_size=4),
        st.floats(0.1, 300.0),
    )
    def test_conserves_power(self, coeffs, extinction):
        amps = np.array(coeffs + [0j] * (1 - len(coeffs) % 2))
        f = OpticalField(amps, 3e-5)
        t, r = split_filter(f, FilterSpec(extinction))
        assert total_power(t) + total_power(r) == pytest.approx(total_power(f), rel=1e-12, abs=1e-30)

    @pytest.mark.parametrize("bad", [0.0, -5.0])
    def test_validation(self, bad):
        with pytest.raises(ValueError):
            FilterSpec(bad)


class TestPhotons:
    def test_zero_power(self):
        assert photons_per_bit(0.0, 80e-9, 1550.12e-9) == 0.0

    def test_one_photon(self):
        e = H * C / 1550.12e-9
        assert e == pytest.approx(1.2815e-19, rel=1e-4)
        assert photons_per_bit(e / 1e-9, 1e-9, 1550.12e-9) == pytest.approx(1.0)
        assert photon_energy(1550.12e-9) == pytest.approx(e, rel=1e-12)

    def test_sender_sidebands_are_classical(self):
        n = photons_per_bit(500e-9, 1 / 12.5e6, 1550.12e-9)
        assert n == pytest.approx(500e-9 * 80e-9 / (H * C / 1550.12e-9), rel=1e-12)
        assert n == pytest.approx(3.12e5, rel=2e-3)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            photons_per_bit(-1.0, 1.0, 1.0)
