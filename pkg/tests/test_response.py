"""Transition matrices, scattering, susceptibility and polarizability."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qubit_qed import (
    CouplingTooLarge,
    DomainError,
    NonPositiveFrequency,
    WrongVariant,
    coefficients_b_delta,
    crossing_residual,
    hydrogen_dipole,
    locate_poles,
    make_model,
    polarizability,
    polarizability_resonant_decomposition,
    scan_points,
    scattering_amplitude,
    scattering_simple_fractions,
    susceptibility,
    transition_matrix,
)


class TestTransition:
    """Dressed transition matrix values."""

    def test_frozen_twolevel(self, twolevel_model):
        np.testing.assert_allclose(
            transition_matrix(twolevel_model, 2, 1.3).scalar_value,
            -1.7264647530533335 - 0.012049896034099597j,
            rtol=1e-9,
        )
        np.testing.assert_allclose(
            transition_matrix(twolevel_model, 4, 1.3).scalar_value,
            -1.7244271058800018 - 0.01202146783750319j,
            rtol=1e-9,
        )

    def test_atom_even_in_frequency(self, twolevel_model):
        a = transition_matrix(twolevel_model, 4, 1.3).scalar_value
        b = transition_matrix(twolevel_model, 4, -1.3).scalar_value
        assert a == b

    def test_order_validation(self, twolevel_model):
        with pytest.raises(DomainError):
            transition_matrix(twolevel_model, 3, 1.0)


class TestScattering:
    """Photon scattering amplitude and its two-fraction form."""

    def test_frozen_fractions(self, twolevel_model):
        fr = scattering_simple_fractions(twolevel_model, 1.2)
        np.testing.assert_allclose(
            fr.resonant, -0.004492340548038481 - 2.6417942576336547e-05j, rtol=1e-9
        )
        np.testing.assert_allclose(
            fr.nonresonant, -0.001124408388389842 - 1.6549608542565437e-06j, rtol=1e-9
        )
        np.testing.assert_allclose(fr.total, fr.resonant + fr.nonresonant, rtol=1e-14)

    def test_fractions_track_amplitude(self, twolevel_model):
        """The two-fraction form tracks the full amplitude to O(coupling^4)."""
        for w in (1.2, 2.4):
            fr = scattering_simple_fractions(twolevel_model, w)
            am = scattering_amplitude(twolevel_model, 4, w).scalar_value
            assert abs(fr.total - am) / abs(am) < 5e-3

    def test_spin_has_no_two_fraction_form(self, spin_model):
        with pytest.raises(WrongVariant):
            scattering_simple_fractions(spin_model, 1.0)


class TestSusceptibilityPolarizability:
    """Retarded response functions, frozen and crossing-checked."""

    def test_frozen_spin_susceptibility(self, spin_model):
        v = susceptibility(spin_model, 4, 0.5)
        np.testing.assert_allclose(
            v.plus, -1.396492915000847 - 0.010148305733570312j, rtol=1e-9
        )
        np.testing.assert_allclose(
            v.minus, -0.8202842262308124 - 0.0035013035821751647j, rtol=1e-9
        )
        np.testing.assert_allclose(v.zero, -0.0034726892833626156, rtol=1e-9)

    def test_frozen_spin_susceptibility_second_order(self, spin_model):
        v = susceptibility(spin_model, 2, 1.5)
        np.testing.assert_allclose(
            v.plus, -4.161450676219879 - 0.5286078426878308j, rtol=1e-9
        )
        np.testing.assert_allclose(
            v.minus, -0.5757036784248004 - 0.009959109434201118j, rtol=1e-9
        )
        assert v.zero == 0.0

    def test_frozen_polarizability(self, twolevel_kk, dipole_asym):
        np.testing.assert_allclose(
            polarizability(twolevel_kk, 2, 0.8),
            0.42149440750355743 + 0.009591607925758146j,
            rtol=1e-9,
        )
        np.testing.assert_allclose(
            polarizability(twolevel_kk, 4, 2.5),
            -0.5949076564529032 + 0.03733207419724158j,
            rtol=1e-9,
        )
        np.testing.assert_allclose(
            polarizability(dipole_asym, 4, 1.1),
            0.4767129632195155 + 0.003640625068274973j,
            rtol=1e-9,
        )

    def test_variant_gates(self, spin_model, twolevel_model):
        with pytest.raises(WrongVariant):
            polarizability(spin_model, 2, 0.5)
        with pytest.raises(WrongVariant):
            susceptibility(twolevel_model, 2, 0.5)

    def test_crossing_residual_tiny(self, twolevel_kk, spin_model):
        assert crossing_residual(twolevel_kk, 4, [0.3, 1.1, 2.7]) < 1e-12
        assert crossing_residual(spin_model, 4, [0.3, 1.1, 2.7]) < 1e-12

    @given(w=st.floats(0.05, 3.0))
    @settings(max_examples=20, deadline=None, derandomize=True)
    def test_polarizability_crossing_property(self, twolevel_kk, w):
        """Negative frequencies are the conjugates of positive ones."""
        plus = polarizability(twolevel_kk, 4, w)
        minus = polarizability(twolevel_kk, 4, -w)
        np.testing.assert_allclose(minus, np.conj(plus), rtol=1e-13)


class TestDecomposition:
    """Resonant pole decomposition of the polarizability."""

    def test_tracks_exact_at_weak_coupling(self, twolevel_model, twolevel_strong):
        stronger = []
        for model in (twolevel_model, twolevel_strong):
            devs = []
            for w in (1.6, 2.3):
                dec = polarizability_resonant_decomposition(model, w)
                exact = polarizability(model, 4, w)
                devs.append(abs(dec.total - exact) / abs(exact))
            stronger.append(max(devs))
        assert stronger[0] < 0.01
        assert stronger[1] < 0.3
        assert stronger[1] > stronger[0]

    def test_forms_share_real_part(self, twolevel_strong):
        a = polarizability_resonant_decomposition(twolevel_strong, 1.6, form="sign_rule")
        b = polarizability_resonant_decomposition(twolevel_strong, 1.6, form="resonant")
        assert a.form == "sign_rule" and b.form == "resonant"
        np.testing.assert_allclose(a.total.real, b.total.real, rtol=1e-12)

    def test_frozen_strong_totals(self, twolevel_strong):
        a = polarizability_resonant_decomposition(twolevel_strong, 1.6)
        np.testing.assert_allclose(
            a.total, 0.8915187766586419 + 4.204210388310656j, rtol=1e-9
        )
        b = polarizability_resonant_decomposition(twolevel_strong, 1.6, form="resonant")
        np.testing.assert_allclose(
            b.total, 0.8915187766586419 + 4.087153952097694j, rtol=1e-9
        )


class TestPoles:
    """Resonance pole pair in the complex frequency plane."""

    def test_frozen_locations(self, spin_model, twolevel_model, dipole_asym):
        cases = (
            (spin_model, 2, 2.001626758457301 + 0.055240580154575454j, "plus"),
            (twolevel_model, 2, 2.0017139812605858 + 0.0009181108874460629j, "scalar"),
            (twolevel_model, 4, 2.0017119533170717 + 0.0009170307891454416j, "scalar"),
            (dipole_asym, 4, 2.001711135190166 + 0.0009165950443365971j, "scalar"),
        )
        for model, order, ref, channel in cases:
            plus, minus = locate_poles(model, order)
            assert plus.channel == channel
            np.testing.assert_allclose(plus.location, ref, rtol=1e-9)
            assert minus.location == -plus.location

    def test_coupling_gate(self):
        ok = make_model("two_level", {"m": 1.0}, hydrogen_dipole(1.0, d=20.0))
        locate_poles(ok, 4)
        too_strong = make_model("two_level", {"m": 1.0}, hydrogen_dipole(1.0, d=22.0))
        with pytest.raises(CouplingTooLarge):
            locate_poles(too_strong, 4)


class TestScanPoints:
    """Grid evaluation row layout and gates."""

    def test_row_order_frequency_major(self, spin_model):
        rows = scan_points(spin_model, "susceptibility", 2, [0.4, 0.9])
        assert [(r.omega, r.channel) for r in rows] == [
            (0.4, "plus"),
            (0.4, "minus"),
            (0.4, "zero"),
            (0.9, "plus"),
            (0.9, "minus"),
            (0.9, "zero"),
        ]

    def test_scalar_rows(self, twolevel_model):
        rows = scan_points(twolevel_model, "polarizability", 4, [0.5])
        assert len(rows) == 1 and rows[0].channel == "scalar"

    def test_scattering_needs_positive_frequency(self, twolevel_model):
        with pytest.raises(NonPositiveFrequency):
            scan_points(twolevel_model, "scattering", 2, [0.5, -0.5])

    def test_unknown_quantity(self, twolevel_model):
        with pytest.raises(DomainError):
            scan_points(twolevel_model, "reflectivity", 2, [0.5])
