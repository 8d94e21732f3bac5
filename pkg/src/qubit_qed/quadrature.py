"""Gauss-Legendre panel rules and extrapolation helpers.

All integrals in this package are reduced to smooth integrands before any
quadrature runs, so composite Gauss-Legendre panels with a graded layout are
enough.  This module only builds nodes and weights; the physics modules
assemble the integrands.

Three rules are provided:

* ``panel_rule`` - a plain composite rule over given panel edges.
* ``half_line_rule`` - a graded rule for the photon half line [0, inf):
  panels up to a finite window plus a 1/k mapped tail panel beyond it.
* ``pole_graded_line`` - a sinh-graded rule for loop-energy lines whose
  integrands have narrow near-pole structures at known centers.

``richardson_linear`` removes the leading O(eps) error of a regulated
integral from a decreasing regulator sequence.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ExtrapolationUnstable

# Relative panel edges for the photon half line, in units of the window.
# The layout concentrates nodes where hydrogen-like formfactors live.
HALF_LINE_EDGES = (0.0, 0.01, 0.03, 0.1, 0.3, 1.0)
HALF_LINE_COUNTS = (80, 80, 64, 40, 32)
TAIL_COUNT = 32

# Coarser tier used by the brute-force oracle where 1e-3 accuracy suffices.
ORACLE_COUNTS = (48, 48, 32, 24, 16)


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy targets and window overrides for the package quadratures.

    Parameters
    ----------
    rel_tol, abs_tol : float
        Accuracy targets used by convergence guards.  Both must be positive.
    k_max : float or None
        Override for the photon-momentum window.  ``None`` selects a window
        from the formfactor scale.
    pv_window : float
        Reserved knob for principal-value subtraction windows.  The shipped
        subtraction is global, so the default 0.0 means "automatic".
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    k_max: float | None = None
    pv_window: float = 0.0

    def __post_init__(self):
        if not (self.rel_tol > 0.0 and self.abs_tol > 0.0):
            raise DomainError("rel_tol and abs_tol must be positive")
        if self.k_max is not None and not self.k_max > 0.0:
            raise DomainError("k_max must be positive when given")


DEFAULT_QUAD = QuadratureSpec()


@functools.lru_cache(maxsize=None)
def gauss_rule(n):
    """Cached Gauss-Legendre nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(int(n))
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_rule(edges, counts):
    """Composite Gauss-Legendre rule over consecutive panels.

    Parameters
    ----------
    edges : sequence of float
        Increasing panel edges, one more than ``counts``.
    counts : sequence of int
        Nodes per panel.

    Returns
    -------
    (ndarray, ndarray)
        Flat node and weight arrays.
    """
    edges = [float(e) for e in edges]
    if len(edges) != len(counts) + 1:
        raise DomainError("need one more edge than panel counts")
    if any(b <= a for a, b in zip(edges, edges[1:])):
        raise DomainError("panel edges must be strictly increasing")
    xs, ws = [], []
    for a, b, n in zip(edges, edges[1:], counts):
        x, w = gauss_rule(n)
        xs.append(0.5 * (b - a) * x + 0.5 * (b + a))
        ws.append(0.5 * (b - a) * w)
    return np.concatenate(xs), np.concatenate(ws)


@functools.lru_cache(maxsize=64)
def half_line_rule(k_window, counts=HALF_LINE_COUNTS, tail_count=TAIL_COUNT):
    """Graded rule for integrals over photon momentum k in [0, inf).

    The half line splits at ``k_window`` into graded core panels and a tail.
    The tail substitutes k = 1/t so that a single Gauss panel on
    t in (0, 1/k_window] integrates rational decay to machine accuracy.
    Integrate f as ``core_w @ f(core_k) + tail_w @ f(tail_k)``.

    Returns
    -------
    (core_k, core_w, tail_k, tail_w) : tuple of ndarray
        Read-only node and weight arrays.
    """
    K = float(k_window)
    if not K > 0.0:
        raise DomainError("k_window must be positive")
    core_k, core_w = panel_rule([e * K for e in HALF_LINE_EDGES], counts)
    x, w = gauss_rule(tail_count)
    t = 0.5 * (x + 1.0) / K
    tail_k = 1.0 / t
    tail_w = (0.5 / K) * w / t**2
    for arr in (core_k, core_w, tail_k, tail_w):
        arr.setflags(write=False)
    return core_k, core_w, tail_k, tail_w


def _panel(u0, u1, n):
    x, w = gauss_rule(n)
    return 0.5 * (u1 - u0) * x + 0.5 * (u1 + u0), 0.5 * (u1 - u0) * w


def pole_graded_line(centers, delta, half_width, n_core=64, u_core=5.0):
    """Sinh-graded composite rule on [-L, L] for near-pole integrands.

    The line is partitioned at midpoints between the centers (near-duplicates
    within half a width are merged); each region is mapped x = c +
    delta*sinh(u) around its center c, with a dense core panel for
    |u| < u_core where the pole sits and coarser outer panels beyond, since
    Gauss nodes thin out mid-interval.  Keeping close-but-distinct centers
    in separate regions matters: a pole a few widths off a region's center
    would otherwise fall where the sinh nodes have already thinned.

    Parameters
    ----------
    centers : sequence of float
        Real parts of near-pole locations of the integrand.
    delta : float
        Structure width to resolve (the regulator eps).
    half_width : float
        Half length L of the truncated line.
    n_core : int
        Nodes for each dense core panel; outer panels use n_core // 3.

    Returns
    -------
    (ndarray, ndarray)
        Node and weight arrays.
    """
    L = float(half_width)
    d = float(delta)
    cs = np.sort(np.asarray(list(centers), dtype=float))
    keep = [cs[0]]
    for c in cs[1:]:
        if c - keep[-1] > 0.5 * d:
            keep.append(c)
    cs = np.asarray(keep)
    bounds = np.concatenate(([-L], 0.5 * (cs[:-1] + cs[1:]), [L]))
    n_out = max(8, n_core // 3)
    xs, ws = [], []
    for i, c in enumerate(cs):
        u0 = np.arcsinh((bounds[i] - c) / d)
        u1 = np.arcsinh((bounds[i + 1] - c) / d)
        cuts = [u0]
        if u0 < -u_core:
            cuts.append(-u_core)
        if u1 > u_core:
            cuts.append(u_core)
        cuts.append(u1)
        for a, b in zip(cuts, cuts[1:]):
            inner = a >= -u_core and b <= u_core
            u, du = _panel(a, b, n_core if inner else n_out)
            xs.append(c + d * np.sinh(u))
            ws.append(du * d * np.cosh(u))
    return np.concatenate(xs), np.concatenate(ws)


def richardson_linear(eps_seq, values):
    """Extrapolate a regulated quantity to eps -> 0.

    Assumes the leading regulator error is O(eps), forms linear extrapolants
    from consecutive pairs and returns the finest one together with the
    spread against the previous pair as an error estimate.

    Parameters
    ----------
    eps_seq : sequence of float
        Strictly decreasing positive regulators, at least three.
    values : sequence of complex
        Quantity evaluated at each regulator.

    Returns
    -------
    (complex, float)
        Extrapolated value and error estimate.
    """
    eps = [float(e) for e in eps_seq]
    vals = [complex(v) for v in values]
    if len(eps) < 3 or len(vals) != len(eps):
        raise ExtrapolationUnstable("need at least three matching epsilons")
    if any(e <= 0.0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise ExtrapolationUnstable("epsilons must be positive and decreasing")
    extr = []
    for (e1, v1), (e2, v2) in zip(zip(eps, vals), zip(eps[1:], vals[1:])):
        extr.append((e1 * v2 - e2 * v1) / (e1 - e2))
    value = extr[-1]
    spread = abs(extr[-1] - extr[-2])
    if not np.isfinite([value.real, value.imag, spread]).all():
        raise ExtrapolationUnstable("non-finite extrapolant")
    return value, spread
