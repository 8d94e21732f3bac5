"""Perturbative electrodynamics of spin and atom qubits.

Dressed propagators, on-shell mass renormalization, second- and
fourth-order self-energies, transition matrices, scattering amplitudes,
spin susceptibility and atomic polarizability for three matter variants:
a spin coupled to all three field components, a two-level atom, and a
three-fold degenerate dipole atom.  A brute-force oracle layer rebuilds
the loop integrals from explicit matrices for verification.
"""

from .cli import main, read_scan_csv, render_scan
from .dispersion import (
    DispersionValue,
    h_branch,
    h_closed_hydrogen,
    h_complex,
    h_function,
    h_real_grid,
    h_small_xi,
    pv_integral,
    shift_width,
)
from .errors import (
    ConfigError,
    CouplingTooLarge,
    DegenerateLevels,
    DomainError,
    ExtrapolationUnstable,
    GridTooCoarse,
    IntegrabilityError,
    NoConvergence,
    NonPositiveFrequency,
    NotApplicable,
    PoleError,
    QuadratureError,
    QubitQedError,
    UnknownDiagram,
    WrongVariant,
)
from .model import (
    FormFactor,
    SystemModel,
    Variant,
    formfactor_eval,
    hydrogen_dipole,
    hydrogen_spin,
    make_model,
    parse_config,
    tabulated,
)
from .oracle import (
    CheckResult,
    acceptance_suite,
    diagram_value,
    kramers_kronig_check,
    loop_integral_numeric,
    reference_models,
    report_json,
    report_text,
)
from .propagator import (
    ChannelValue,
    PhotonLineValue,
    ProjectorValue,
    dyson_resum,
    dyson_truncate,
    electron_propagator,
    photon_line,
)
from .quadrature import DEFAULT_QUAD, QuadratureSpec, half_line_rule, pole_graded_line, richardson_linear
from .response import (
    PoleReport,
    QUANTITIES,
    ResonantDecomposition,
    ResponsePoint,
    TwoFractionAmplitude,
    crossing_residual,
    locate_poles,
    polarizability,
    polarizability_grid,
    polarizability_resonant_decomposition,
    scan_points,
    scattering_amplitude,
    scattering_simple_fractions,
    susceptibility,
    susceptibility_grid,
    transition_grid,
    transition_matrix,
)
from .selfenergy import (
    MassCorrections,
    coefficients_b_delta,
    electron_self_energy_2,
    fourth_order_diagram,
    mass_correction,
    photon_self_energy_2,
    photon_self_energy_24,
    tadpole_mass,
)

__version__ = "0.1.0"

__all__ = [
    "CheckResult",
    "ChannelValue",
    "ConfigError",
    "CouplingTooLarge",
    "DEFAULT_QUAD",
    "DegenerateLevels",
    "DispersionValue",
    "DomainError",
    "ExtrapolationUnstable",
    "FormFactor",
    "GridTooCoarse",
    "IntegrabilityError",
    "MassCorrections",
    "NoConvergence",
    "NonPositiveFrequency",
    "NotApplicable",
    "PhotonLineValue",
    "PoleError",
    "PoleReport",
    "ProjectorValue",
    "QUANTITIES",
    "QuadratureError",
    "QuadratureSpec",
    "QubitQedError",
    "ResonantDecomposition",
    "ResponsePoint",
    "SystemModel",
    "TwoFractionAmplitude",
    "UnknownDiagram",
    "Variant",
    "WrongVariant",
    "acceptance_suite",
    "coefficients_b_delta",
    "crossing_residual",
    "diagram_value",
    "dyson_resum",
    "dyson_truncate",
    "electron_propagator",
    "electron_self_energy_2",
    "formfactor_eval",
    "fourth_order_diagram",
    "h_branch",
    "h_closed_hydrogen",
    "h_complex",
    "h_function",
    "h_real_grid",
    "h_small_xi",
    "half_line_rule",
    "hydrogen_dipole",
    "hydrogen_spin",
    "kramers_kronig_check",
    "locate_poles",
    "loop_integral_numeric",
    "main",
    "make_model",
    "mass_correction",
    "parse_config",
    "photon_line",
    "photon_self_energy_2",
    "photon_self_energy_24",
    "polarizability",
    "polarizability_grid",
    "polarizability_resonant_decomposition",
    "pole_graded_line",
    "pv_integral",
    "read_scan_csv",
    "reference_models",
    "render_scan",
    "report_json",
    "report_text",
    "richardson_linear",
    "scan_points",
    "scattering_amplitude",
    "scattering_simple_fractions",
    "shift_width",
    "susceptibility",
    "susceptibility_grid",
    "tabulated",
    "tadpole_mass",
    "transition_grid",
    "transition_matrix",
    "__version__",
]
