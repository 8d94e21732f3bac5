"""Photon-dressing dispersion integrals.

The central object is

    h(k0) = integral dk g(k)**2 / (k**2 - k0**2 - i0),

whose real part is a principal value and whose imaginary part is
pi*g(|k0|)**2 / (2|k0|).  The principal value is computed by a global
subtraction of g(omega)**2 over the finite window [0, K], an explicit
window log counter-term, and a 1/k mapped tail panel for [K, inf); the
integrand is then smooth everywhere and graded Gauss panels converge to
near machine accuracy.

Level shifts and widths, the closed hydrogen-spin form, its small-frequency
expansion, the generic principal-value helper and the per-seed analytic
continuations used by the pole finder all live here.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, QuadratureError
from .model import Variant
from .quadrature import DEFAULT_QUAD, half_line_rule


def _window(ff, quad):
    return float(quad.k_max) if quad.k_max is not None else ff.k_window()


def h_real_grid(ff, omegas, quad=DEFAULT_QUAD):
    """Re h on an array of real frequencies, vectorized and even in omega.

    Parameters
    ----------
    ff : FormFactor
    omegas : float or ndarray
        Real frequencies, |omega| < 0.95 * window.
    quad : QuadratureSpec

    Returns
    -------
    float or ndarray
        Re h with the input shape.
    """
    om = np.asarray(omegas, dtype=float)
    K = _window(ff, quad)
    aw = np.abs(om).reshape(-1, 1)
    if np.any(aw >= 0.95 * K):
        raise QuadratureError("frequency outside the quadrature window; raise k_max")
    kc, wc, kt, wt = half_line_rule(K)
    g2k = ff.g2(kc)[None, :]
    g2w = ff.g2(aw[:, 0])[:, None]
    den = kc[None, :] ** 2 - aw**2
    # exact node collisions switch to the derivative limit of the
    # subtracted kernel; the guard is far below the node spacing
    guard = 1e-9 * (K / 200.0)
    close = np.abs(kc[None, :] - aw) < guard
    w0 = aw[:, 0]
    dlim = (ff.g2_prime(w0) / np.where(w0 > 0.0, 2.0 * w0, 1.0))[:, None]
    ratio = np.where(close, dlim, (g2k - g2w) / np.where(close, 1.0, den))
    core = ratio @ wc
    tail = (ff.g2(kt)[None, :] / (kt[None, :] ** 2 - aw**2)) @ wt
    logc = np.where(
        w0 > 0.0,
        g2w[:, 0] / np.where(w0 > 0.0, 2.0 * w0, 1.0) * np.log((K + w0) / (K - w0)),
        0.0,
    )
    re = core + tail - logc
    return re.reshape(om.shape) if om.ndim else float(re[0])


def h_function(ff, k0, quad=DEFAULT_QUAD):
    """The dispersion function h at real k0.

    Even in k0 by construction (only |k0| enters), with
    Im h = pi * g(|k0|)**2 / (2|k0|) and Im h(0) = 0.
    """
    w = abs(float(k0))
    re = h_real_grid(ff, w, quad)
    im = np.pi * ff.g2(w) / (2.0 * w) if w > 0.0 else 0.0
    return complex(re, im)


def h_complex(ff, z, quad=DEFAULT_QUAD):
    """h continued off the real axis by direct integration.

    For Im z != 0 the denominator never vanishes, so no subtraction is
    needed.  Real z falls back to :func:`h_function`.  Accuracy degrades
    for |Im z| much smaller than the node spacing near |Re z|.
    """
    z = complex(z)
    if z.imag == 0.0:
        return h_function(ff, z.real, quad)
    K = _window(ff, quad)
    kc, wc, kt, wt = half_line_rule(K)
    core = wc @ (ff.g2(kc) / (kc**2 - z**2))
    tail = wt @ (ff.g2(kt) / (kt**2 - z**2))
    return complex(core + tail)


def h_closed_hydrogen(mu, a0, k0):
    """Closed form of h for the hydrogen-spin formfactor, k0 >= 0.

    With xi = k0 * a0 / 2:

        h = mu**2 (1 + 9 xi**2 - 9 xi**4 - xi**6 + 16 i xi**3)
            / (12 pi a0**3 (1 + xi**2)**4)
    """
    xi = float(k0) * float(a0) / 2.0
    num = 1.0 + 9.0 * xi**2 - 9.0 * xi**4 - xi**6 + 16.0j * xi**3
    return float(mu) ** 2 * num / (12.0 * np.pi * float(a0) ** 3 * (1.0 + xi**2) ** 4)


def h_small_xi(ff, k0, quad=DEFAULT_QUAD):
    """Small-frequency expansion h(0) + i * coupling**2 * k0**3 / (6 pi).

    The real part keeps only the static value; the imaginary part uses the
    small-k limit g(k) -> coupling * k**2 / (pi sqrt(3)).
    """
    h0 = h_real_grid(ff, 0.0, quad)
    return complex(h0, ff.coupling**2 * float(k0) ** 3 / (6.0 * np.pi))


@dataclass(frozen=True)
class DispersionValue:
    """Level shift and width of a resonance at a given frequency.

    Attributes
    ----------
    omega : float
    h : complex
        The dispersion function at omega.
    delta : float
        Frequency shift of the resonance denominator.
    gamma : float
        Half width at half maximum; nonnegative.
    """

    omega: float
    h: complex
    delta: float
    gamma: float


def shift_width(model, omega, quad=DEFAULT_QUAD):
    """Shift and width entering the resonance denominators.

    The spin transition couples twice as strongly to the dressing, so its
    shift and width are 2*Re h and 2*Im h; the atoms carry Re h and Im h.
    """
    h = h_function(model.formfactor, omega, quad)
    if model.variant is Variant.SPIN:
        delta, gamma = 2.0 * h.real, 2.0 * h.imag
    else:
        delta, gamma = h.real, h.imag
    return DispersionValue(omega=float(omega), h=h, delta=delta, gamma=gamma)


def _eval_on(f, x):
    """Evaluate a scalar-or-vectorized callable on a node array."""
    try:
        v = np.asarray(f(x), dtype=float)
    except (TypeError, ValueError):
        v = np.array([float(f(xx)) for xx in x])
    if v.shape != x.shape:
        v = np.broadcast_to(v, x.shape).astype(float)
    return v


def pv_integral(f, omega, quad=DEFAULT_QUAD):
    """Principal value of integral dk f(k) / (k**2 - omega**2) over [0, inf).

    Uses the same global subtraction, window log counter-term and mapped
    tail as :func:`h_function`.  At omega = 0 the integral is an ordinary
    one and requires f(0) = 0.

    Parameters
    ----------
    f : callable
        Smooth integrand factor, decaying fast enough for the tail map.
    omega : float
    quad : QuadratureSpec

    Returns
    -------
    float
    """
    K = float(quad.k_max) if quad.k_max is not None else 200.0
    kc, wc, kt, wt = half_line_rule(K)
    fk = _eval_on(f, kc)
    ft = _eval_on(f, kt)
    w = abs(float(omega))
    if w == 0.0:
        f0 = float(f(0.0))
        if abs(f0) > quad.abs_tol:
            raise QuadratureError("integrand must vanish at k=0 when omega=0")
        res = wc @ (fk / kc**2) + wt @ (ft / kt**2)
    else:
        if w >= 0.95 * K:
            raise QuadratureError("omega outside the quadrature window; raise k_max")
        fw = float(f(w))
        den = kc**2 - w**2
        guard = 1e-9 * (K / 200.0)
        close = np.abs(kc - w) < guard
        if np.any(close):
            step = 1e-6 * max(1.0, w)
            dlim = (float(f(w + step)) - float(f(w - step))) / (2.0 * step) / (2.0 * w)
            ratio = np.where(close, dlim, (fk - fw) / np.where(close, 1.0, den))
        else:
            ratio = (fk - fw) / den
        res = wc @ ratio + wt @ (ft / (kt**2 - w**2)) - fw / (2.0 * w) * np.log((K + w) / (K - w))
    if not np.isfinite(res):
        raise QuadratureError("principal value did not converge")
    return float(res)


def h_branch(ff, z, seed_sign, quad=DEFAULT_QUAD, continuation="auto"):
    """Per-seed analytic continuation of h used by the pole finder.

    On the real axis the branch with ``seed_sign=-1`` coincides with
    :func:`h_function`; the ``+1`` branch is its reflection.  Continuations:

    * ``closed`` - the closed hydrogen-spin rational form.
    * ``exact`` - subtracted quadrature with the complex-continued
      formfactor (hydrogen families).
    * ``small_xi`` - h(0) - i * seed_sign * coupling**2 z**3 / (6 pi),
      the only choice available for tabulated formfactors.
    * ``auto`` - closed for hydrogen_spin, exact for hydrogen_dipole,
      small_xi for tabulated.
    """
    s = int(seed_sign)
    if s not in (-1, 1):
        raise DomainError("seed_sign must be +1 or -1")
    if continuation == "auto":
        continuation = {
            "hydrogen_spin": "closed",
            "hydrogen_dipole": "exact",
            "tabulated": "small_xi",
        }[ff.family]
    z = complex(z)
    if continuation == "closed":
        if ff.family != "hydrogen_spin":
            raise DomainError("closed continuation exists only for hydrogen_spin")
        xi = z * ff.a0 / 2.0
        num = 1.0 + 9.0 * xi**2 - 9.0 * xi**4 - xi**6 - s * 16.0j * xi**3
        return ff.coupling**2 * num / (12.0 * np.pi * ff.a0**3 * (1.0 + xi**2) ** 4)
    if continuation == "small_xi":
        h0 = h_real_grid(ff, 0.0, quad)
        return complex(h0) - 1j * s * ff.coupling**2 * z**3 / (6.0 * np.pi)
    if continuation != "exact":
        raise DomainError(f"unknown continuation {continuation!r}")
    if z == 0.0:
        return complex(h_real_grid(ff, 0.0, quad))
    K = _window(ff, quad)
    kc, wc, kt, wt = half_line_rule(K)
    g2z = ff.g2_complex(z)
    core = wc @ ((ff.g2(kc) - g2z) / (kc**2 - z**2))
    tail = wt @ (ff.g2(kt) / (kt**2 - z**2))
    logc = g2z / (2.0 * z) * np.log((K + z) / (K - z))
    return complex(core + tail - logc - 1j * s * np.pi * g2z / (2.0 * z))
