"""Second- and fourth-order self-energies and their renormalization.

Matter self-energies are projector valued; photon (transition) self-energies
carry spin channels or a single atom scalar.  All closed forms here are
one-dimensional integrals over the photon momentum k after the loop energies
have been done by residues: branch cuts show up as simple poles in k and are
treated by a subtracted principal value plus an explicit i*pi residue term.

Mass renormalization is on-shell: the matter self-energy vanishes at the
level masses, which fixes the counter-terms delta_m_e, delta_m_g and (for
spin) the tadpole mass m_t.
"""
from __future__ import annotations

import weakref
from dataclasses import dataclass

import numpy as np

from .errors import (
    CouplingTooLarge,
    IntegrabilityError,
    NotApplicable,
    PoleError,
    QuadratureError,
    UnknownDiagram,
)
from .model import Variant
from .propagator import ChannelValue, ProjectorValue
from .quadrature import DEFAULT_QUAD, half_line_rule

_MEMO = weakref.WeakKeyDictionary()


def _memo(model, quad, tag, builder):
    per = _MEMO.setdefault(model, {})
    key = (quad, tag)
    if key not in per:
        per[key] = builder()
    return per[key]


def _window(ff, quad):
    return float(quad.k_max) if quad.k_max is not None else ff.k_window()


def _nodes(ff, quad):
    return half_line_rule(_window(ff, quad))


def _integrate(ff, quad, fn):
    """Integrate fn(k) over [0, inf) on the graded rule with mapped tail."""
    kc, wc, kt, wt = _nodes(ff, quad)
    return wc @ fn(kc) + wt @ fn(kt)


def _f1(ff, E, quad):
    """integral dk g**2 / (k (k + E))."""
    return float(_integrate(ff, quad, lambda k: ff.g2(k) / (k * (k + E))))


def _f2(ff, E, quad):
    """integral dk g**2 / (k (k + E)**2)."""
    return float(_integrate(ff, quad, lambda k: ff.g2(k) / (k * (k + E) ** 2)))


def _cut_integral(ff, c, quad):
    """integral dk (g**2/k) / (k - c - i0) over [0, inf).

    For real c > 0 the pole sits on the cut: the value is the subtracted
    principal value plus i*pi*(g**2/k) at the pole.  For real c <= 0 or
    complex c the integrand is regular and integrated directly.
    """
    K = _window(ff, quad)
    kc, wc, kt, wt = _nodes(ff, quad)
    c = complex(c)
    if c.imag != 0.0:
        return complex(
            wc @ (ff.g2(kc) / (kc * (kc - c))) + wt @ (ff.g2(kt) / (kt * (kt - c)))
        )
    cr = c.real
    if cr <= 0.0:
        return complex(
            wc @ (ff.g2(kc) / (kc * (kc - cr))) + wt @ (ff.g2(kt) / (kt * (kt - cr)))
        )
    if cr >= 0.95 * K:
        raise QuadratureError("cut pole outside the quadrature window; raise k_max")
    fk = ff.g2(kc) / kc
    fstar = ff.g2(cr) / cr
    # derivative of g**2/k at the pole for colliding nodes
    dstar = (ff.g2_prime(cr) * cr - ff.g2(cr)) / cr**2
    guard = 1e-9 * (K / 200.0)
    close = np.abs(kc - cr) < guard
    ratio = np.where(close, dstar, (fk - fstar) / np.where(close, 1.0, kc - cr))
    core = wc @ ratio + fstar * np.log((K - cr) / cr)
    tail = wt @ (ff.g2(kt) / (kt * (kt - cr)))
    return complex(core + tail, np.pi * fstar)


def _z_integral(ff, E, k0, quad):
    """integral dk g**2 / (k (k+E) ((k+E)**2 - k0**2 - i0)).

    The denominator zero at k = |k0| - E (when |k0| > E) is factored out
    and handled like a cut pole; only |k0| enters, so the result is even
    in real k0.
    """
    K = _window(ff, quad)
    kc, wc, kt, wt = _nodes(ff, quad)
    k0 = complex(k0)
    if k0.imag != 0.0:
        def fn(k):
            return ff.g2(k) / (k * (k + E) * ((k + E) ** 2 - k0**2))

        return complex(wc @ fn(kc) + wt @ fn(kt))
    a = abs(k0.real)
    if a <= E:
        def fn(k):
            return ff.g2(k) / (k * (k + E) * ((k + E) ** 2 - a**2))

        return complex(wc @ fn(kc) + wt @ fn(kt))
    kstar = a - E
    if kstar >= 0.95 * K:
        raise QuadratureError("cut pole outside the quadrature window; raise k_max")

    def reg(k):
        return ff.g2(k) / (k * (k + E) * (k + E + a))

    fk = reg(kc)
    fstar = reg(kstar)
    step = 1e-6 * max(1.0, kstar)
    dstar = (reg(kstar + step) - reg(kstar - step)) / (2.0 * step)
    guard = 1e-9 * (K / 200.0)
    close = np.abs(kc - kstar) < guard
    ratio = np.where(close, dstar, (fk - fstar) / np.where(close, 1.0, kc - kstar))
    core = wc @ ratio + fstar * np.log((K - kstar) / kstar)
    tail = wt @ (reg(kt) / (kt - kstar))
    return complex(core + tail, np.pi * fstar)


@dataclass(frozen=True)
class MassCorrections:
    """On-shell mass counter-terms.

    Attributes
    ----------
    delta_m_e, delta_m_g : float
        Level mass corrections; the symmetric variants have
        delta_m_g = -delta_m_e, the dipole atom delta_m_g = -3 delta_m_e.
    m_t : float
        Tadpole mass, nonzero only for the spin variant.
    """

    delta_m_e: float
    delta_m_g: float
    m_t: float


def tadpole_mass(ff, quad=DEFAULT_QUAD):
    """Tadpole mass integral dk g(k)**2 / k**2."""
    val = float(_integrate(ff, quad, lambda k: ff.g2(k) / k**2))
    if not np.isfinite(val):
        raise IntegrabilityError("tadpole integral diverges")
    return val


def mass_correction(model, quad=DEFAULT_QUAD):
    """On-shell mass counter-terms for a model (cached per model)."""

    def build():
        ff = model.formfactor
        if model.variant is Variant.SPIN:
            m = model.m
            dm = float(
                _integrate(ff, quad, lambda k: ff.g2(k) * (3.0 * k + 2.0 * m) / (2.0 * k**2 * (k + 2.0 * m)))
            )
            return MassCorrections(dm, -dm, tadpole_mass(ff, quad))
        if model.variant is Variant.TWO_LEVEL:
            dm = 0.5 * _f1(ff, 2.0 * model.m, quad)
            return MassCorrections(dm, -dm, 0.0)
        dm = 0.5 * _f1(ff, model.delta_m, quad)
        return MassCorrections(dm, -3.0 * dm, 0.0)

    return _memo(model, quad, "mass", build)


def electron_self_energy_2(model, p0, masses=None, quad=DEFAULT_QUAD):
    """Renormalized second-order matter self-energy at energy p0.

    The excited channel vanishes at p0 = m_e and the ground channel at
    p0 = m_g (on-shell renormalization).  Real p0 beyond the one-photon
    thresholds acquires an imaginary part from the emission cut; complex
    p0 is evaluated by direct analytic continuation.

    Returns
    -------
    ProjectorValue
    """
    mc = masses if masses is not None else mass_correction(model, quad)
    ff = model.formfactor
    p0 = complex(p0)
    if model.variant is Variant.DIPOLE:
        ia = 0.5 * _cut_integral(ff, model.m_g - p0, quad)
        ib = -0.5 * _cut_integral(ff, p0 - model.m_e, quad)
        c_e = ia - mc.delta_m_e
        c_g = 3.0 * ib - mc.delta_m_g
    else:
        m = model.m
        ia = 0.5 * _cut_integral(ff, -(p0 + m), quad)
        ib = -0.5 * _cut_integral(ff, p0 - m, quad)
        if model.variant is Variant.SPIN:
            ct = mc.m_t - mc.delta_m_e
            c_e = 2.0 * ia + ib + ct
            c_g = ia + 2.0 * ib - ct
        else:
            c_e = ia - mc.delta_m_e
            c_g = ib - mc.delta_m_g
    return ProjectorValue(c_e, c_g, model.dim_e)


def photon_self_energy_2(model, k0):
    """Second-order transition self-energy (closed form).

    Spin channels carry -2/(2m -+ k0) and a vanishing zero channel; the
    atoms carry -4m/(4m**2 - k0**2) and -2 dm/(dm**2 - k0**2).
    """
    k0 = complex(k0)
    if model.variant is Variant.SPIN:
        m = model.m
        dplus = 2.0 * m - k0
        dminus = 2.0 * m + k0
        if dplus == 0 or dminus == 0:
            raise PoleError(f"transition pole at k0={k0}")
        return ChannelValue.spin(-2.0 / dplus, -2.0 / dminus, 0.0j)
    dm = model.delta_m
    den = dm**2 - k0**2
    if den == 0:
        raise PoleError(f"transition pole at k0={k0}")
    if model.variant is Variant.TWO_LEVEL:
        return ChannelValue.scalar(-4.0 * model.m / den)
    return ChannelValue.scalar(-2.0 * dm / den)


def _spin_j(model, k0, quad):
    """integral dk (g**2/k) / (k + 2m - k0 - i0)."""
    return _cut_integral(model.formfactor, k0 - 2.0 * model.m, quad)


def _check_spin_dens(m, k0):
    dplus = 2.0 * m - k0
    dminus = 2.0 * m + k0
    if dplus == 0 or dminus == 0:
        raise PoleError(f"fourth-order form singular at k0={k0}")
    return dplus, dminus


def fourth_order_diagram(model, k0, diagram, masses=None, quad=DEFAULT_QUAD):
    """One fourth-order transition self-energy diagram at external k0.

    Diagram labels run b..h: b is the crossed-rainbow ladder, c the
    one-sided dressing, d its mass counter-term, e the spin tadpole, and
    f, g, h the mirror images of c, d, e.  The spin variant returns all
    three channels; the atoms return their scalar channel and only know
    diagrams b, c, d, f, g.

    Raises
    ------
    UnknownDiagram
        For labels outside b..h.
    NotApplicable
        For the tadpole diagrams e, h on the atom variants.
    PoleError
        At the unresummed resonance k0 = +-(m_e - m_g).
    """
    diagram = str(diagram)
    if diagram not in "bcdefgh" or len(diagram) != 1:
        raise UnknownDiagram(f"no fourth-order diagram {diagram!r}")
    mc = masses if masses is not None else mass_correction(model, quad)
    ff = model.formfactor
    k0 = complex(k0)

    if model.variant is Variant.SPIN:
        m = model.m
        base = {"f": "c", "g": "d", "h": "e"}.get(diagram, diagram)
        dplus, dminus = _check_spin_dens(m, k0)
        if base == "b":
            plus = -2.0 / dplus**2 * _spin_j(model, k0, quad)
            minus = -2.0 / dminus**2 * _spin_j(model, -k0, quad)
            zero = -4.0 * _z_integral(ff, 2.0 * m, k0, quad)
        elif base == "c":
            i1 = _f1(ff, 2.0 * m, quad)
            k2 = _f2(ff, 2.0 * m, quad)
            jp = _spin_j(model, k0, quad)
            jm = _spin_j(model, -k0, quad)
            plus = 2.0 * k2 / dplus - (jp - 2.0 * i1) / dplus**2
            minus = 2.0 * k2 / dminus - (jm - 2.0 * i1) / dminus**2
            zero = -2.0 * _z_integral(ff, 2.0 * m, k0, quad)
        elif base == "d":
            plus = -2.0 * mc.delta_m_e / dplus**2
            minus = -2.0 * mc.delta_m_e / dminus**2
            zero = 0.0j
        else:
            plus = 2.0 * mc.m_t / dplus**2
            minus = 2.0 * mc.m_t / dminus**2
            zero = 0.0j
        return ChannelValue.spin(plus, minus, zero)

    if diagram in ("e", "h"):
        raise NotApplicable("tadpole diagrams exist only for the spin variant")

    if model.variant is Variant.TWO_LEVEL:
        m = model.m
        den = 4.0 * m**2 - k0**2
        if den == 0:
            raise PoleError(f"fourth-order form singular at k0={k0}")
        i1 = _f1(ff, 2.0 * m, quad)
        i2 = _f2(ff, 2.0 * m, quad)
        if diagram == "b":
            val = 2.0 / den * i1
        elif diagram in ("c", "f"):
            val = (4.0 * m**2 + k0**2) / den**2 * i1 + 2.0 * m / den * i2
        else:
            val = -2.0 * mc.delta_m_e * (4.0 * m**2 + k0**2) / den**2
        return ChannelValue.scalar(val)

    dm = model.delta_m
    dplus = dm - k0
    dminus = dm + k0
    if dplus == 0 or dminus == 0:
        raise PoleError(f"fourth-order form singular at k0={k0}")
    i1 = _f1(ff, dm, quad)
    i2 = _f2(ff, dm, quad)
    if diagram == "b":
        val = 2.0 / (dplus * dminus) * i1
    elif diagram == "c":
        val = 0.5 * (3.0 / dplus**2 + 1.0 / dminus**2) * i1 + 0.5 * (3.0 / dplus + 1.0 / dminus) * i2
    elif diagram == "f":
        val = 0.5 * (3.0 / dminus**2 + 1.0 / dplus**2) * i1 + 0.5 * (3.0 / dminus + 1.0 / dplus) * i2
    elif diagram == "d":
        val = -(3.0 / dplus**2 + 1.0 / dminus**2) * mc.delta_m_e
    else:
        val = -(3.0 / dminus**2 + 1.0 / dplus**2) * mc.delta_m_e
    return ChannelValue.scalar(val)


def coefficients_b_delta(model, quad=DEFAULT_QUAD):
    """Geometric-series coefficient b and pole shift delta (cached).

    The fourth-order corrections proportional to the second-order pole
    structure resum into a residue factor (1 - b) and, for spin, a
    denominator shift delta = m_t / (2 (1 - b)).  The atoms have no shift.

    Raises
    ------
    CouplingTooLarge
        If b >= 1, where the geometric picture breaks down.
    """

    def build():
        ff = model.formfactor
        if model.variant is Variant.SPIN:
            b = 2.0 * _f2(ff, 2.0 * model.m, quad)
        elif model.variant is Variant.TWO_LEVEL:
            m = model.m
            b = (_f1(ff, 2.0 * m, quad) + 2.0 * m * _f2(ff, 2.0 * m, quad)) / (2.0 * m)
        else:
            dm = model.delta_m
            b = (_f1(ff, dm, quad) + 2.0 * dm * _f2(ff, dm, quad)) / dm
        if b >= 1.0:
            raise CouplingTooLarge(f"residue coefficient b={b:.3g} >= 1")
        if model.variant is Variant.SPIN:
            mt = mass_correction(model, quad).m_t
            return b, mt / (2.0 * (1.0 - b))
        return b, 0.0

    return _memo(model, quad, "coeff", build)


def photon_self_energy_24(model, k0, quad=DEFAULT_QUAD):
    """Second-plus-fourth-order transition self-energy, pole parts resummed.

    The resummable fourth-order pieces turn the second-order fractions
    into -2(1-b)/(2m -+ k0 - delta) (spin) and multiply the atom fractions
    by (1-b).  The spin zero channel is the plain fourth-order branch-cut
    integral and is never resummed.
    """
    b, delta = coefficients_b_delta(model, quad)
    k0 = complex(k0)
    if model.variant is Variant.SPIN:
        m = model.m
        dplus = 2.0 * m - k0 - delta
        dminus = 2.0 * m + k0 - delta
        if dplus == 0 or dminus == 0:
            raise PoleError(f"shifted transition pole at k0={k0}")
        zero = -4.0 * _z_integral(model.formfactor, 2.0 * m, k0, quad)
        return ChannelValue.spin(-2.0 * (1.0 - b) / dplus, -2.0 * (1.0 - b) / dminus, zero)
    dm = model.delta_m
    den = dm**2 - k0**2
    if den == 0:
        raise PoleError(f"transition pole at k0={k0}")
    if model.variant is Variant.TWO_LEVEL:
        return ChannelValue.scalar(-4.0 * model.m * (1.0 - b) / den)
    return ChannelValue.scalar(-2.0 * dm * (1.0 - b) / den)
