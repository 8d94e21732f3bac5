"""Transition matrices and physical response functions.

The transition matrix resums the photon dressing of a transition
self-energy P through T = 1 / (P**-1 + h).  Observables derive from it:

* scattering amplitudes f = g(omega)**2 * T(omega) for omega > 0,
* the spin susceptibility and the atomic polarizability, which are the
  retarded counterparts of T obtained by conjugating negative frequencies,
* resonance poles of T continued to complex frequency.

Frequency grids are evaluated vectorized; scalar calls go through the same
code path, so scans and point evaluations agree bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dispersion import h_branch, h_complex, h_real_grid, shift_width
from .errors import (
    CouplingTooLarge,
    DomainError,
    NoConvergence,
    NonPositiveFrequency,
    PoleError,
    WrongVariant,
)
from .model import Variant
from .propagator import ChannelValue
from .quadrature import DEFAULT_QUAD
from .selfenergy import _z_integral, coefficients_b_delta

QUANTITIES = ("transition", "scattering", "susceptibility", "polarizability")


def _check_order(order):
    order = int(order)
    if order not in (2, 4):
        raise DomainError("order must be 2 or 4")
    return order


def _feynman_h_grid(ff, omegas, quad):
    aw = np.abs(omegas)
    him = np.where(aw > 0.0, np.pi * ff.g2(aw) / np.where(aw > 0.0, 2.0 * aw, 1.0), 0.0)
    return h_real_grid(ff, aw, quad) + 1j * him


def _spin_zero_channel(model, omegas, order, quad):
    if order == 2:
        return np.zeros(omegas.shape, dtype=complex)
    return np.array([-4.0 * _z_integral(model.formfactor, 2.0 * model.m, w, quad) for w in omegas])


def transition_grid(model, order, omegas, quad=DEFAULT_QUAD):
    """Feynman transition matrix on an array of real frequencies.

    Returns a :class:`ChannelValue` whose channel entries are arrays.
    """
    order = _check_order(order)
    om = np.asarray(omegas, dtype=float)
    ff = model.formfactor
    h = _feynman_h_grid(ff, om, quad)
    if order == 4:
        b, delta = coefficients_b_delta(model, quad)
    else:
        b, delta = 0.0, 0.0
    fac = 1.0 - b
    if model.variant is Variant.SPIN:
        m = model.m
        den_p = 2.0 * m - om - delta - 2.0 * fac * h
        den_m = 2.0 * m + om - delta - 2.0 * fac * h
        if np.any(den_p == 0) or np.any(den_m == 0):
            raise PoleError("transition matrix evaluated exactly on a resonance")
        return ChannelValue.spin(
            -2.0 * fac / den_p, -2.0 * fac / den_m, _spin_zero_channel(model, om, order, quad)
        )
    E = model.delta_m
    den = E**2 - om**2 - 2.0 * E * fac * h
    if np.any(den == 0):
        raise PoleError("transition matrix evaluated exactly on a resonance")
    return ChannelValue.scalar(-2.0 * E * fac / den)


def transition_matrix(model, order, k0, quad=DEFAULT_QUAD):
    """Dressed transition matrix T = 1 / (P**-1 + h) at one frequency.

    Real k0 uses the even-in-k0 dispersion function; complex k0 continues
    h by direct integration.

    Parameters
    ----------
    model : SystemModel
    order : int
        2 for the leading self-energy, 4 to include the fourth-order
        residue factor (1 - b) and pole shift.
    k0 : complex
    quad : QuadratureSpec
    """
    order = _check_order(order)
    k0 = complex(k0)
    if k0.imag == 0.0:
        cv = transition_grid(model, order, np.array([k0.real]), quad)
        return cv.map(lambda a: complex(a[0]))
    h = h_complex(model.formfactor, k0, quad)
    if order == 4:
        b, delta = coefficients_b_delta(model, quad)
    else:
        b, delta = 0.0, 0.0
    fac = 1.0 - b
    if model.variant is Variant.SPIN:
        m = model.m
        den_p = 2.0 * m - k0 - delta - 2.0 * fac * h
        den_m = 2.0 * m + k0 - delta - 2.0 * fac * h
        if den_p == 0 or den_m == 0:
            raise PoleError(f"transition matrix pole at k0={k0}")
        zero = 0.0j if order == 2 else -4.0 * _z_integral(model.formfactor, 2.0 * m, k0, quad)
        return ChannelValue.spin(-2.0 * fac / den_p, -2.0 * fac / den_m, zero)
    E = model.delta_m
    den = E**2 - k0**2 - 2.0 * E * fac * h
    if den == 0:
        raise PoleError(f"transition matrix pole at k0={k0}")
    return ChannelValue.scalar(-2.0 * E * fac / den)


def scattering_amplitude(model, order, omega, quad=DEFAULT_QUAD):
    """Photon scattering amplitude g(omega)**2 * T(omega) for omega > 0."""
    omega = float(omega)
    if not omega > 0.0:
        raise NonPositiveFrequency("scattering requires omega > 0")
    g2 = model.formfactor.g2(omega)
    return transition_matrix(model, order, omega, quad).map(lambda t: g2 * t)


@dataclass(frozen=True)
class TwoFractionAmplitude:
    """Resonant and nonresonant parts of the two-level amplitude.

    Both denominators carry the same -i*gamma: the decomposition keeps the
    exact pole position in the resonant term and mirrors it in the
    nonresonant one.
    """

    resonant: complex
    nonresonant: complex

    @property
    def total(self):
        return self.resonant + self.nonresonant


def scattering_simple_fractions(model, omega, quad=DEFAULT_QUAD):
    """Two-fraction form of the two-level scattering amplitude.

    -g**2/(2m - shift - omega - i*gamma) - g**2/(2m - shift + omega - i*gamma)

    Valid near resonance where shift and width are evaluated at omega.
    """
    if model.variant is not Variant.TWO_LEVEL:
        raise WrongVariant("the two-fraction amplitude is a two-level form")
    omega = float(omega)
    if not omega > 0.0:
        raise NonPositiveFrequency("scattering requires omega > 0")
    sw = shift_width(model, omega, quad)
    g2 = model.formfactor.g2(omega)
    e0 = 2.0 * model.m - sw.delta
    return TwoFractionAmplitude(
        resonant=-g2 / (e0 - omega - 1j * sw.gamma),
        nonresonant=-g2 / (e0 + omega - 1j * sw.gamma),
    )


def _crossing_rule(values, omegas):
    """Retarded values from Feynman ones: conjugate negative frequencies."""
    v = np.asarray(values, dtype=complex)
    out = np.where(omegas < 0.0, np.conj(v), v)
    return np.where(omegas == 0.0, out.real + 0.0j, out)


def susceptibility_grid(model, order, omegas, quad=DEFAULT_QUAD):
    """Spin susceptibility channels on a frequency array."""
    if model.variant is not Variant.SPIN:
        raise WrongVariant("susceptibility is a spin quantity")
    om = np.asarray(omegas, dtype=float)
    t = transition_grid(model, order, om, quad)
    return t.map(lambda a: _crossing_rule(a, om))


def susceptibility(model, order, omega, quad=DEFAULT_QUAD):
    """Retarded spin susceptibility at one real frequency.

    Satisfies crossing: chi_plus(-omega) = conj(chi_minus(omega)) and the
    zero channel is even under omega -> -omega with conjugation.
    """
    cv = susceptibility_grid(model, order, np.array([float(omega)]), quad)
    return cv.map(lambda a: complex(a[0]))


def polarizability_grid(model, order, omegas, quad=DEFAULT_QUAD):
    """Atomic polarizability on a frequency array."""
    if model.variant is Variant.SPIN:
        raise WrongVariant("polarizability is an atom quantity")
    om = np.asarray(omegas, dtype=float)
    t = transition_grid(model, order, om, quad).scalar_value
    return -model.A * _crossing_rule(t, om)


def polarizability(model, order, omega, quad=DEFAULT_QUAD):
    """Retarded atomic polarizability alpha(omega) = -A * T_ret(omega)."""
    return complex(polarizability_grid(model, order, np.array([float(omega)]), quad)[0])


@dataclass(frozen=True)
class ResonantDecomposition:
    """Polarizability split into co- and counter-rotating fractions."""

    term_plus: complex
    term_minus: complex
    form: str

    @property
    def total(self):
        return self.term_plus + self.term_minus


def polarizability_resonant_decomposition(model, omega, quad=DEFAULT_QUAD, form="sign_rule"):
    """Two-fraction approximations to the atomic polarizability.

    Parameters
    ----------
    form : str
        ``sign_rule`` flips the width term -i*sgn(omega)*gamma in both
        fractions, keeping exact crossing symmetry; ``resonant`` instead
        assigns -i*gamma to the co-rotating and +i*gamma to the
        counter-rotating fraction, exact near the resonance pole.
    """
    if model.variant is Variant.SPIN:
        raise WrongVariant("polarizability is an atom quantity")
    omega = float(omega)
    sw = shift_width(model, omega, quad)
    E = model.delta_m
    A = model.A
    e0 = E - sw.delta
    if form == "sign_rule":
        s = np.sign(omega)
        tp = A / (e0 - omega - 1j * s * sw.gamma)
        tm = A / (e0 + omega - 1j * s * sw.gamma)
    elif form == "resonant":
        tp = A / (e0 - omega - 1j * sw.gamma)
        tm = A / (e0 + omega + 1j * sw.gamma)
    else:
        raise DomainError(f"unknown decomposition form {form!r}")
    return ResonantDecomposition(term_plus=complex(tp), term_minus=complex(tm), form=form)


@dataclass(frozen=True)
class PoleReport:
    """A located resonance pole of the transition matrix.

    Attributes
    ----------
    location : complex
        Pole position in the complex frequency plane.
    channel : str
        ``plus``/``minus`` for spin, ``scalar`` for atoms.
    residue_sign_note : str
        Which half-plane the pole sits in on its branch.
    """

    location: complex
    channel: str
    residue_sign_note: str


def _newton(f, z0):
    z = complex(z0)
    for _ in range(40):
        step = 1e-7 * max(1.0, abs(z))
        deriv = (f(z + step) - f(z - step)) / (2.0 * step)
        if deriv == 0:
            raise NoConvergence("vanishing derivative in Newton iteration")
        dz = f(z) / deriv
        z = z - dz
        if abs(dz) < 1e-13 * max(1.0, abs(z)):
            return z
    raise NoConvergence(f"pole search did not converge from seed {z0}")


def locate_poles(model, order, quad=DEFAULT_QUAD, continuation="auto"):
    """Find the two resonance poles of T in the complex frequency plane.

    Seeds sit at +-(m_e - m_g); each seed uses its own continuation branch
    of h, on which the dressed denominator is analytic near the seed.  The
    located pair satisfies z_minus = -z_plus.

    Parameters
    ----------
    continuation : str
        Passed to :func:`qubit_qed.dispersion.h_branch`; ``auto`` picks the
        closed form for hydrogen_spin, subtracted quadrature for
        hydrogen_dipole and the small-frequency form for tabulated data.

    Returns
    -------
    (PoleReport, PoleReport)
        Reports for the +E and -E seeds.

    Raises
    ------
    CouplingTooLarge
        If the residue coefficient b reaches 1/2, where the Newton basin
        around the seeds is no longer trustworthy.
    NoConvergence
        If the Newton iteration fails.
    """
    order = _check_order(order)
    b, delta = coefficients_b_delta(model, quad)
    if b >= 0.5:
        raise CouplingTooLarge(f"pole search requires b < 1/2, got b={b:.3g}")
    if order == 2:
        b_eff, del_eff = 0.0, 0.0
    else:
        b_eff, del_eff = b, delta
    fac = 1.0 - b_eff
    ff = model.formfactor
    E = model.delta_m
    spin = model.variant is Variant.SPIN
    m = model.m if spin else 0.0
    reports = []
    for s in (1, -1):
        def den(z, s=s):
            hb = h_branch(ff, z, s, quad, continuation)
            if spin:
                return 2.0 * m - s * z - del_eff - 2.0 * fac * hb
            return E**2 - z**2 - 2.0 * E * fac * hb

        z = _newton(den, s * E)
        channel = ("plus" if s > 0 else "minus") if spin else "scalar"
        half = "upper" if z.imag > 0 else ("lower" if z.imag < 0 else "real axis")
        note = f"Im = {z.imag:.6g}: {half} half-plane on the seed branch"
        reports.append(PoleReport(location=z, channel=channel, residue_sign_note=note))
    return tuple(reports)


def crossing_residual(model, order, omegas, quad=DEFAULT_QUAD):
    """Largest violation of crossing symmetry over a set of frequencies.

    For spin the pairs (chi_plus, chi_minus) are transposed under
    omega -> -omega; the zero channel and the atom polarizability map to
    their own conjugates.
    """
    om = np.abs(np.asarray(omegas, dtype=float))
    if model.variant is Variant.SPIN:
        pos = susceptibility_grid(model, order, om, quad)
        neg = susceptibility_grid(model, order, -om, quad)
        res = [
            np.abs(neg.plus - np.conj(pos.minus)),
            np.abs(neg.minus - np.conj(pos.plus)),
            np.abs(neg.zero - np.conj(pos.zero)),
        ]
        return float(np.max(res))
    pos = polarizability_grid(model, order, om, quad)
    neg = polarizability_grid(model, order, -om, quad)
    return float(np.max(np.abs(neg - np.conj(pos))))


@dataclass(frozen=True)
class ResponsePoint:
    """One scan row: a channel value at one frequency."""

    omega: float
    channel: str
    value: complex
    quantity: str
    order: int


def scan_points(model, quantity, order, omegas, quad=DEFAULT_QUAD):
    """Evaluate a response quantity on a frequency grid.

    Returns rows ordered frequency-major, channel-minor.

    Parameters
    ----------
    quantity : str
        One of ``transition``, ``scattering``, ``susceptibility``,
        ``polarizability``.
    """
    order = _check_order(order)
    if quantity not in QUANTITIES:
        raise DomainError(f"unknown quantity {quantity!r}")
    om = np.asarray(omegas, dtype=float)
    if quantity == "transition":
        cv = transition_grid(model, order, om, quad)
    elif quantity == "scattering":
        if np.any(om <= 0.0):
            raise NonPositiveFrequency("scattering requires omega > 0")
        g2 = model.formfactor.g2(om)
        cv = transition_grid(model, order, om, quad).map(lambda a: g2 * a)
    elif quantity == "susceptibility":
        cv = susceptibility_grid(model, order, om, quad)
    else:
        cv = ChannelValue.scalar(polarizability_grid(model, order, om, quad))
    rows = []
    chans = cv.channels()
    for i, w in enumerate(om):
        for name, arr in chans:
            rows.append(
                ResponsePoint(omega=float(w), channel=name, value=complex(arr[i]), quantity=quantity, order=order)
            )
    return rows
