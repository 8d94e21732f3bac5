"""Mass corrections, self-energies and the resummation coefficients."""

import numpy as np
import pytest

from qubit_qed import (
    CouplingTooLarge,
    NotApplicable,
    PoleError,
    QuadratureSpec,
    UnknownDiagram,
    coefficients_b_delta,
    electron_self_energy_2,
    fourth_order_diagram,
    hydrogen_spin,
    make_model,
    mass_correction,
    photon_self_energy_2,
    photon_self_energy_24,
)


class TestMassCorrection:
    """On-shell counter-terms, frozen against the validated quadratures."""

    def test_spin_values(self, spin_model):
        mc = mass_correction(spin_model)
        np.testing.assert_allclose(mc.delta_m_e, 0.024520821217917706, rtol=1e-10)
        np.testing.assert_allclose(mc.m_t, 0.026525823848649228, rtol=1e-10)
        assert mc.delta_m_g == -mc.delta_m_e

    def test_twolevel_values(self, twolevel_model):
        mc = mass_correction(twolevel_model)
        np.testing.assert_allclose(mc.delta_m_e, 0.0007062282740113418, rtol=1e-10)
        assert mc.delta_m_g == -mc.delta_m_e
        assert mc.m_t == 0.0

    def test_dipole_ground_triples(self, dipole_model):
        """The threefold excited level feeds back three times on the ground."""
        mc = mass_correction(dipole_model)
        np.testing.assert_allclose(mc.delta_m_e, 0.0007062282740113418, rtol=1e-10)
        assert mc.delta_m_g == -3.0 * mc.delta_m_e
        assert mc.m_t == 0.0

    def test_dipole_corrections_depend_on_splitting_only(self, dipole_model, dipole_asym):
        """Shifting both levels rigidly leaves the counter-terms unchanged."""
        a = mass_correction(dipole_model)
        b = mass_correction(dipole_asym)
        assert a.delta_m_e == b.delta_m_e
        assert a.delta_m_g == b.delta_m_g


class TestElectronSelfEnergy:
    """Renormalized matter self-energy at second order."""

    def test_on_shell_vanishes(self, spin_model, twolevel_model, dipole_asym):
        for m in (spin_model, twolevel_model, dipole_asym):
            assert abs(electron_self_energy_2(m, m.m_e).c_e) < 1e-12
            assert abs(electron_self_energy_2(m, m.m_g).c_g) < 1e-12

    def test_below_threshold_real(self, spin_model, twolevel_model, dipole_model):
        table = {
            "spin": (0.007126849551975123, -0.01259437000537164),
            "two_level": (0.00022085544084578961, -0.0005705312284043247),
            "dipole": (0.00022085544084578961, -0.0017115936852129744),
        }
        for m in (spin_model, twolevel_model, dipole_model):
            s = electron_self_energy_2(m, 0.3)
            ce, cg = table[m.variant.value]
            np.testing.assert_allclose(s.c_e, ce, rtol=1e-9)
            np.testing.assert_allclose(s.c_g, cg, rtol=1e-9)
            assert s.c_e.imag == 0.0 and s.c_g.imag == 0.0

    def test_above_threshold_complex(self, spin_model, twolevel_model, dipole_model):
        table = {
            "spin": (
                0.0030700194193669303 - 0.03003948964935491j,
                -0.011986796467521176 - 0.06007897929870982j,
            ),
            "two_level": (
                -0.0002365146431367381 + 0.0j,
                0.0036551175238191324 - 0.002797645484037223j,
            ),
            "dipole": (
                -0.0002365146431367381 + 0.0j,
                0.010965352571457396 - 0.00839293645211167j,
            ),
        }
        for m in (spin_model, twolevel_model, dipole_model):
            s = electron_self_energy_2(m, 2.5)
            ce, cg = table[m.variant.value]
            np.testing.assert_allclose(s.c_e, ce, rtol=1e-9, atol=1e-15)
            np.testing.assert_allclose(s.c_g, cg, rtol=1e-9, atol=1e-15)


class TestPhotonSelfEnergy2:
    """Second-order transition self-energy closed forms."""

    def test_spin_channels(self, spin_model):
        m = spin_model.m
        for k0 in (0.3, -1.2):
            v = photon_self_energy_2(spin_model, k0)
            np.testing.assert_allclose(v.plus, -2.0 / (2.0 * m - k0), rtol=1e-14)
            np.testing.assert_allclose(v.minus, -2.0 / (2.0 * m + k0), rtol=1e-14)
            assert v.zero == 0.0

    def test_twolevel_scalar(self, twolevel_model):
        m = twolevel_model.m
        for k0 in (0.5, 1.7):
            v = photon_self_energy_2(twolevel_model, k0).scalar_value
            np.testing.assert_allclose(v, -4.0 * m / (4.0 * m**2 - k0**2), rtol=1e-14)

    def test_dipole_scalar(self, dipole_asym):
        dm = dipole_asym.delta_m
        v = photon_self_energy_2(dipole_asym, 0.9).scalar_value
        np.testing.assert_allclose(v, -2.0 * dm / (dm**2 - 0.81), rtol=1e-14)

    def test_pole_rejected(self, twolevel_model):
        with pytest.raises(PoleError):
            photon_self_energy_2(twolevel_model, 2.0 * twolevel_model.m)


class TestFourthOrder:
    """Frozen fourth-order diagram values at k0 = 0.5."""

    def test_spin_diagrams(self, spin_model):
        table = {
            "b": (-0.011565174448595382, -0.0031805067177397466, -0.0034726892833626156),
            "c": (0.00823444852035922, 0.004418280771957748, -0.0017363446416813078),
            "d": (-0.02179628552703796, -0.007846662789733666, 0.0),
            "e": (0.0235785100876882, 0.008488263631567752, 0.0),
        }
        for diagram, (p, m, z) in table.items():
            v = fourth_order_diagram(spin_model, 0.5, diagram)
            np.testing.assert_allclose(v.plus, p, rtol=1e-9, atol=1e-15)
            np.testing.assert_allclose(v.minus, m, rtol=1e-9, atol=1e-15)
            np.testing.assert_allclose(v.zero, z, rtol=1e-9, atol=1e-15)

    def test_twolevel_diagrams(self, twolevel_model):
        table = {
            "b": 0.0007533101589454312,
            "c": 0.0006815847637234875,
            "d": -0.00042687575673574433,
            "f": 0.0006815847637234875,
            "g": -0.00042687575673574433,
        }
        for diagram, ref in table.items():
            v = fourth_order_diagram(twolevel_model, 0.5, diagram).scalar_value
            np.testing.assert_allclose(v, ref, rtol=1e-9)
            assert v.imag == 0.0

    def test_dipole_diagrams(self, dipole_model):
        table = {
            "b": 0.0007533101589454312,
            "c": 0.0016277294882460255,
            "d": -0.0010546342225236035,
            "f": 0.001098609566647924,
            "g": -0.0006528688044193737,
        }
        for diagram, ref in table.items():
            v = fourth_order_diagram(dipole_model, 0.5, diagram).scalar_value
            np.testing.assert_allclose(v, ref, rtol=1e-9)

    def test_twolevel_vertex_pair_symmetric(self, twolevel_model):
        """The symmetric two-level spectrum makes c and f coincide."""
        c = fourth_order_diagram(twolevel_model, 1.1, "c").scalar_value
        f = fourth_order_diagram(twolevel_model, 1.1, "f").scalar_value
        np.testing.assert_allclose(c, f, rtol=1e-12)

    def test_atom_tadpoles_not_applicable(self, twolevel_model, dipole_model):
        for m in (twolevel_model, dipole_model):
            for diagram in ("e", "h"):
                with pytest.raises(NotApplicable):
                    fourth_order_diagram(m, 0.5, diagram)

    def test_unknown_diagram(self, spin_model):
        with pytest.raises(UnknownDiagram):
            fourth_order_diagram(spin_model, 0.5, "q")

    def test_window_override_stable(self, dipole_model):
        """Widening the momentum window does not move the answer."""
        a = fourth_order_diagram(dipole_model, 0.5, "c").scalar_value
        b = fourth_order_diagram(
            dipole_model, 0.5, "c", quad=QuadratureSpec(k_max=300.0)
        ).scalar_value
        np.testing.assert_allclose(a, b, rtol=1e-12)


class TestCoefficients:
    """Pole-part coefficients and the resummed self-energy."""

    def test_frozen_values(
        self, spin_model, twolevel_model, twolevel_kk, twolevel_strong, dipole_model
    ):
        table = (
            (spin_model, 0.00601500789219458, 0.01334317120442614),
            (twolevel_model, 0.00118380766211336, 0.0),
            (twolevel_kk, 0.013111534092635446, 0.0),
            (twolevel_strong, 0.13412805071210415, 0.0),
            (dipole_model, 0.0016613870502153784, 0.0),
        )
        for model, b_ref, d_ref in table:
            b, delta = coefficients_b_delta(model)
            np.testing.assert_allclose(b, b_ref, rtol=1e-9)
            np.testing.assert_allclose(delta, d_ref, rtol=1e-9, atol=1e-15)

    def test_dipole_insensitive_to_rigid_shift(self, dipole_model, dipole_asym):
        assert coefficients_b_delta(dipole_model) == coefficients_b_delta(dipole_asym)

    def test_coupling_too_large(self):
        m = make_model("spin", {"m": 1.0}, hydrogen_spin(13.0, 1.0))
        with pytest.raises(CouplingTooLarge):
            coefficients_b_delta(m)

    def test_atom_residue_factorization(self, twolevel_model, dipole_asym):
        """The resummed atom fractions are the bare ones scaled by 1 - b."""
        for m in (twolevel_model, dipole_asym):
            b, _ = coefficients_b_delta(m)
            for k0 in (0.4, 1.6):
                p2 = photon_self_energy_2(m, k0).scalar_value
                p24 = photon_self_energy_24(m, k0).scalar_value
                np.testing.assert_allclose(p24, (1.0 - b) * p2, rtol=1e-12)

    def test_spin_resummed_fractions(self, spin_model):
        """Spin fractions pick up both the residue and the frequency shift."""
        b, delta = coefficients_b_delta(spin_model)
        m = spin_model.m
        v = photon_self_energy_24(spin_model, 0.5)
        np.testing.assert_allclose(v.plus, -2.0 * (1.0 - b) / (2.0 * m - 0.5 - delta), rtol=1e-12)
        np.testing.assert_allclose(v.minus, -2.0 * (1.0 - b) / (2.0 * m + 0.5 - delta), rtol=1e-12)
        np.testing.assert_allclose(v.zero, -0.0034726892833626156, rtol=1e-9)

    def test_frozen_resummed_values(self, spin_model, twolevel_model, dipole_model):
        np.testing.assert_allclose(
            photon_self_energy_24(spin_model, 0.5).plus, -1.3372083897977851, rtol=1e-9
        )
        np.testing.assert_allclose(
            photon_self_energy_24(twolevel_model, 0.5).scalar_value,
            -1.0654039384937457,
            rtol=1e-9,
        )
        np.testing.assert_allclose(
            photon_self_energy_24(dipole_model, 0.5).scalar_value,
            -1.0648945204797704,
            rtol=1e-9,
        )
