"""Brute-force loop machinery against the closed-form implementations."""

import json

import numpy as np
import pytest

from qubit_qed import (
    GridTooCoarse,
    NotApplicable,
    UnknownDiagram,
    WrongVariant,
    fourth_order_diagram,
    photon_self_energy_2,
)
from qubit_qed.oracle import (
    CheckResult,
    LoopIntegrandSpec,
    PROJ_E2,
    PROJ_E4,
    PROJ_G2,
    PROJ_G4,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    TAU_X,
    TAU_Y,
    TAU_Z,
    _chain_set,
    _contour_eval,
    _half_width,
    _l0_centers,
    _p0_centers,
    _propagator_diag,
    acceptance_suite,
    build_integrand,
    chain_trace,
    diagram_value,
    kramers_kronig_check,
    loop_integral_numeric,
    reference_models,
    report_json,
    report_text,
    stacked_propagator,
    two_loop,
)
from qubit_qed.quadrature import pole_graded_line


class TestMatrixAlgebra:
    """Vertex matrices used by the explicit-matrix chains."""

    def test_ladder_nilpotent(self):
        np.testing.assert_allclose(SIGMA_PLUS @ SIGMA_PLUS, 0.0, atol=1e-15)
        np.testing.assert_allclose(SIGMA_MINUS @ SIGMA_MINUS, 0.0, atol=1e-15)

    def test_ladder_products_project(self):
        np.testing.assert_allclose(SIGMA_PLUS @ SIGMA_MINUS, 2.0 * PROJ_E2, atol=1e-15)
        np.testing.assert_allclose(SIGMA_MINUS @ SIGMA_PLUS, 2.0 * PROJ_G2, atol=1e-15)

    def test_spin_vertex_completeness(self):
        total = sum(s @ PROJ_E2 @ s for s in (SIGMA_X, SIGMA_Y, SIGMA_Z))
        np.testing.assert_allclose(total, PROJ_E2 + 2.0 * PROJ_G2, atol=1e-15)

    def test_dipole_vertex_completeness(self):
        total = sum(t @ t for t in (TAU_X, TAU_Y, TAU_Z))
        np.testing.assert_allclose(total, PROJ_E4 + 3.0 * PROJ_G4, atol=1e-15)
        sandwich = sum(t @ PROJ_E4 @ t for t in (TAU_X, TAU_Y, TAU_Z))
        np.testing.assert_allclose(sandwich, 3.0 * PROJ_G4, atol=1e-15)


class TestStackedPropagator:
    """Diagonal matter propagator stacks with opposite regulator signs."""

    def test_regulator_signs(self):
        s = stacked_propagator(np.array([0.2]), 1.0, -1.0, 1e-3, 2)[0]
        assert s[0, 0].imag < 0.0
        assert s[1, 1].imag > 0.0
        assert s[0, 1] == 0.0

    def test_chain_trace(self):
        mats = [PROJ_E2 + 2.0 * PROJ_G2, 3.0 * PROJ_E2 + PROJ_G2]
        assert chain_trace(mats) == pytest.approx(5.0)


class TestNumericLoops:
    """Regulated explicit loops against the dispersion-based closed forms."""

    def test_second_order_bubble(self, spin_model):
        spec = LoopIntegrandSpec(variant="spin", diagram="2", channel="plus", k0=0.5)
        res = loop_integral_numeric(spec)
        ref = photon_self_energy_2(spin_model, 0.5).plus
        assert abs(res.value - ref) / abs(ref) < 1e-4
        assert res.estimated_error < 1e-3

    def test_extrapolation_beats_finest_raw(self, spin_model):
        spec = LoopIntegrandSpec(variant="spin", diagram="2", channel="minus", k0=0.5)
        res = loop_integral_numeric(spec)
        ref = photon_self_energy_2(spin_model, 0.5).minus
        assert abs(res.value - ref) < abs(res.raw[-1] - ref)

    def test_counterterm_loop(self, twolevel_model):
        got = diagram_value(twolevel_model, "d", "scalar", 0.5)
        ref = fourth_order_diagram(twolevel_model, 0.5, "d").scalar_value
        assert abs(got.value - ref) / abs(ref) < 5e-3

    def test_two_loop_brute_matches_contour(self):
        """Literal 2-d quadrature agrees with residue closure at fixed eps."""
        cases = (
            ("spin", "b", "plus", 1.0, -1.0),
            ("two_level", "c", "scalar", 1.0, -1.0),
            ("dipole", "f", "scalar", 0.7, -1.3),
        )
        for variant, diagram, channel, m_e, m_g in cases:
            spec = LoopIntegrandSpec(
                variant=variant, diagram=diagram, channel=channel,
                k0=0.5, k=0.8, eps=5e-3, m_e=m_e, m_g=m_g,
            )
            fn = build_integrand(spec)
            brute = two_loop(
                fn, _p0_centers(spec), lambda p0: _l0_centers(spec, p0),
                spec.eps, _half_width(spec), n_core=20,
            )
            cs = _chain_set(spec.variant, spec.channel)
            p0, w = pole_graded_line(_p0_centers(spec), spec.eps, _half_width(spec), 44)
            s1 = _propagator_diag(p0 + spec.k0, spec.m_e, spec.m_g, spec.eps, cs.dim)
            s4 = _propagator_diag(p0, spec.m_e, spec.m_g, spec.eps, cs.dim)
            vals = _contour_eval(
                spec.diagram, cs, s1, s4, p0, np.full(p0.shape, spec.k),
                spec.k0, spec.m_e, spec.m_g, spec.eps,
            )
            contour = complex(w @ vals) / (2.0 * np.pi)
            assert abs(brute - contour) / abs(contour) < 0.08

    def test_atom_tadpole_not_applicable(self):
        spec = LoopIntegrandSpec(variant="two_level", diagram="e", channel="scalar")
        with pytest.raises(NotApplicable):
            build_integrand(spec)

    def test_unknown_diagram(self):
        spec = LoopIntegrandSpec(variant="spin", diagram="z", channel="plus")
        with pytest.raises(UnknownDiagram):
            build_integrand(spec)


class TestKramersKronigGates:
    """Grid prerequisites of the dispersion-relation reconstruction."""

    def test_coarse_grid_rejected(self, twolevel_kk):
        with pytest.raises(GridTooCoarse):
            kramers_kronig_check(twolevel_kk, 4, np.linspace(-10.0, 10.0, 11))

    def test_nonuniform_grid_rejected(self, twolevel_kk):
        grid = np.concatenate([np.linspace(-10.0, 0.0, 200), np.linspace(0.1, 10.0, 150)])
        with pytest.raises(GridTooCoarse):
            kramers_kronig_check(twolevel_kk, 4, grid)

    def test_asymmetric_grid_rejected(self, twolevel_kk):
        with pytest.raises(GridTooCoarse):
            kramers_kronig_check(twolevel_kk, 4, np.linspace(-5.0, 10.0, 3001))

    def test_spin_channels_do_not_reconstruct(self, spin_model):
        with pytest.raises(WrongVariant):
            kramers_kronig_check(spin_model, 4, np.linspace(-10.0, 10.0, 4001))


class TestSuitePlumbing:
    """Reference models, filtering and report formatting."""

    def test_reference_model_keys(self):
        assert sorted(reference_models()) == [
            "dipole_asym",
            "dipole_default",
            "spin_default",
            "twolevel_default",
            "twolevel_kk",
            "twolevel_strong",
        ]

    def test_reference_models_frozen(self):
        models = reference_models()
        assert models["twolevel_strong"].formfactor.coupling == 2.2
        assert models["dipole_asym"].m_e == 0.7
        assert models["spin_default"].variant.value == "spin"

    def test_filter_no_match(self):
        assert acceptance_suite(only="no_such_check") == []

    def test_report_formats(self):
        res = CheckResult(
            name="example", computed=1e-3, tolerance=1e-2, passed=True, detail="ok"
        )
        text = report_text([res])
        assert text.startswith("PASS example:")
        parsed = json.loads(report_json([res]))
        assert parsed[0]["name"] == "example"
        assert parsed[0]["passed"] is True
