"""System variants, emission formfactors and model construction.

A model couples a small matter system to a scalar photon field through a
rotationally reduced emission formfactor g(k).  Three variants are
supported:

* ``spin`` - a spin-1/2 magnetic coupling with three internal channels.
* ``two_level`` - a two-level atom with a single scalar channel.
* ``dipole`` - a dipole atom with a threefold excited level, allowing
  independent level masses.

Everything is expressed in natural units where all quantities are powers
of meters; masses here are the level energies m_e (excited) and m_g
(ground).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import (
    ConfigError,
    DegenerateLevels,
    DomainError,
    IntegrabilityError,
    WrongVariant,
)

SQRT3 = np.sqrt(3.0)

# 1s -> 2p hydrogen transition dipole moment in units of e*a0.
HYDROGEN_MOMENT = 2.0**7.5 / 3.0**5


class Variant(enum.Enum):
    """The three supported matter systems."""

    SPIN = "spin"
    TWO_LEVEL = "two_level"
    DIPOLE = "dipole"

    @classmethod
    def coerce(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value))
        except ValueError:
            names = ", ".join(v.value for v in cls)
            raise DomainError(f"unknown variant {value!r}; expected one of {names}")


_FAMILIES = ("hydrogen_spin", "hydrogen_dipole", "tabulated")


@dataclass(frozen=True, eq=False)
class FormFactor:
    """Photon emission formfactor g(k) with g(0) = 0 and g >= 0.

    Instances are built through :func:`hydrogen_spin`,
    :func:`hydrogen_dipole` or :func:`tabulated` rather than directly.

    Attributes
    ----------
    family : str
        One of ``hydrogen_spin``, ``hydrogen_dipole``, ``tabulated``.
    coupling : float
        Small-k strength: g(k) -> coupling * k**2 / (pi*sqrt(3)).  For
        tabulated data this is inferred from the first nonzero sample.
    a0 : float
        Length scale of the hydrogen-like families.
    table_k, table_g : ndarray or None
        Samples for the tabulated family, monotone interpolated and
        extended by zero beyond the last sample.
    """

    family: str
    coupling: float
    a0: float = 1.0
    table_k: np.ndarray | None = None
    table_g: np.ndarray | None = None

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise DomainError(f"unknown formfactor family {self.family!r}")
        if self.family == "tabulated":
            k = np.asarray(self.table_k, dtype=float)
            g = np.asarray(self.table_g, dtype=float)
            if k.ndim != 1 or k.shape != g.shape or k.size < 2:
                raise IntegrabilityError("table must be two matching 1-d arrays")
            if not (np.isfinite(k).all() and np.isfinite(g).all()):
                raise IntegrabilityError("table contains non-finite samples")
            if k[0] != 0.0 or np.any(np.diff(k) <= 0.0):
                raise IntegrabilityError("table k must increase strictly from 0")
            if g[0] != 0.0 or np.any(g < 0.0):
                raise IntegrabilityError("table g must be nonnegative with g(0)=0")
            object.__setattr__(self, "table_k", k)
            object.__setattr__(self, "table_g", g)
            interp = PchipInterpolator(k, g, extrapolate=False)
            object.__setattr__(self, "_interp", interp)
            object.__setattr__(self, "_dinterp", interp.derivative())
        else:
            if not self.a0 > 0.0:
                raise DomainError("a0 must be positive")
            if self.coupling < 0.0:
                raise DomainError("coupling must be nonnegative")

    def g(self, k):
        """Evaluate g(k) for k >= 0 (scalar or array)."""
        kk = np.asarray(k, dtype=float)
        if np.any(kk < 0.0):
            raise DomainError("formfactor argument k must be nonnegative")
        if self.family == "hydrogen_spin":
            out = self.coupling * kk**2 / (np.pi * SQRT3) / (1.0 + (kk * self.a0) ** 2 / 4.0) ** 2
        elif self.family == "hydrogen_dipole":
            out = self.coupling * kk**2 / (np.pi * SQRT3) / (1.0 + 4.0 * (kk * self.a0) ** 2 / 9.0) ** 3
        else:
            out = np.nan_to_num(self._interp(kk), nan=0.0)
        return out if kk.ndim else float(out)

    def g2(self, k):
        """g(k) squared."""
        gg = self.g(k)
        return gg * gg

    def g2_prime(self, k):
        """Derivative of g(k)**2 with respect to k."""
        kk = np.asarray(k, dtype=float)
        if np.any(kk < 0.0):
            raise DomainError("formfactor argument k must be nonnegative")
        if self.family == "hydrogen_spin":
            x = (kk * self.a0) ** 2 / 4.0
            gp = self.coupling / (np.pi * SQRT3) * (
                2.0 * kk / (1.0 + x) ** 2 - kk**3 * self.a0**2 / (1.0 + x) ** 3
            )
        elif self.family == "hydrogen_dipole":
            y = 4.0 * (kk * self.a0) ** 2 / 9.0
            gp = self.coupling / (np.pi * SQRT3) * (
                2.0 * kk / (1.0 + y) ** 3 - (8.0 * self.a0**2 / 3.0) * kk**3 / (1.0 + y) ** 4
            )
        else:
            gp = np.nan_to_num(self._dinterp(kk), nan=0.0)
        out = 2.0 * self.g(kk) * gp
        return out if kk.ndim else float(out)

    def g2_complex(self, z):
        """g(z)**2 continued to complex z (closed families only)."""
        z = np.asarray(z, dtype=complex)
        if self.family == "hydrogen_spin":
            out = (self.coupling**2 / (3.0 * np.pi**2)) * z**4 / (1.0 + (z * self.a0) ** 2 / 4.0) ** 4
        elif self.family == "hydrogen_dipole":
            out = (self.coupling**2 / (3.0 * np.pi**2)) * z**4 / (1.0 + 4.0 * (z * self.a0) ** 2 / 9.0) ** 6
        else:
            raise DomainError("tabulated formfactors have no complex continuation")
        return out if z.ndim else complex(out)

    def k_window(self):
        """Momentum window beyond which the mapped tail panel takes over."""
        if self.family == "tabulated":
            return float(self.table_k[-1])
        return 200.0 * max(1.0, 1.0 / self.a0)


def hydrogen_spin(mu=1.0, a0=1.0):
    """Spin-flip formfactor of a hydrogen-like ground state.

    g(k) = mu * k**2 / (pi*sqrt(3)) / (1 + k**2 a0**2 / 4)**2

    Parameters
    ----------
    mu : float
        Magnetic coupling strength.
    a0 : float
        Orbital radius setting the momentum cutoff scale.
    """
    return FormFactor(family="hydrogen_spin", coupling=float(mu), a0=float(a0))


def hydrogen_dipole(a0=1.0, d=None):
    """Dipole transition formfactor of a hydrogen-like 1s-2p pair.

    g(k) = d * k**2 / (pi*sqrt(3)) / (1 + 4 k**2 a0**2 / 9)**3

    Parameters
    ----------
    a0 : float
        Orbital radius.
    d : float, optional
        Transition dipole moment; defaults to the built-in hydrogen value
        2**7.5 / 3**5 * a0 for unit charge.
    """
    a0 = float(a0)
    if d is None:
        d = HYDROGEN_MOMENT * a0
    return FormFactor(family="hydrogen_dipole", coupling=float(d), a0=a0)


def tabulated(k, g):
    """Formfactor from sampled (k, g) pairs.

    Samples are interpolated with a shape-preserving monotone cubic and
    extended by zero beyond the last k; the table must start at k = 0 with
    g = 0, increase strictly in k and stay nonnegative in g.
    """
    k = np.asarray(k, dtype=float)
    g = np.asarray(g, dtype=float)
    if k.ndim != 1 or k.shape != g.shape or k.size < 2:
        raise IntegrabilityError("table must be two matching 1-d arrays")
    nz = np.nonzero(g)[0]
    i = nz[0] if nz.size else 1
    coupling = np.pi * SQRT3 * g[i] / k[i] ** 2 if k[i] > 0 else 0.0
    return FormFactor(
        family="tabulated", coupling=float(coupling), a0=1.0, table_k=k, table_g=g
    )


def formfactor_eval(ff, k):
    """Evaluate a formfactor, rejecting negative momenta.

    Parameters
    ----------
    ff : FormFactor
    k : float or ndarray
        Photon momentum, k >= 0.
    """
    return ff.g(k)


@dataclass(frozen=True, eq=False)
class SystemModel:
    """A matter variant with its level masses and emission formfactor.

    Attributes
    ----------
    variant : Variant
    m_e, m_g : float
        Excited and ground level masses, m_e > m_g.  The spin and
        two-level variants are symmetric, m_g = -m_e.
    formfactor : FormFactor
    A : float or None
        Overall polarizability constant of the atom variants; None for spin.
    """

    variant: Variant
    m_e: float
    m_g: float
    formfactor: FormFactor
    A: float | None = None

    @property
    def m(self):
        """Half level splitting of the symmetric variants."""
        return self.m_e

    @property
    def delta_m(self):
        """Level splitting m_e - m_g."""
        return self.m_e - self.m_g

    @property
    def dim_e(self):
        """Multiplicity of the excited level."""
        return 3 if self.variant is Variant.DIPOLE else 1

    @property
    def is_atom(self):
        return self.variant is not Variant.SPIN


def make_model(variant, masses, formfactor, A=None):
    """Build a :class:`SystemModel` after validating masses and constants.

    Parameters
    ----------
    variant : Variant or str
    masses : Mapping
        ``{"m": m}`` for spin and two_level (m > 0, levels at +-m), or
        ``{"m_e": ..., "m_g": ...}`` for dipole with m_e > m_g.
    formfactor : FormFactor
    A : float, optional
        Polarizability constant for the atom variants; defaults to
        coupling**2 / 3.  Not accepted for spin.

    Raises
    ------
    DegenerateLevels
        If the level ordering m_e > m_g is violated.
    WrongVariant
        If A is supplied for the spin variant.
    """
    variant = Variant.coerce(variant)
    if variant is Variant.DIPOLE:
        try:
            m_e = float(masses["m_e"])
            m_g = float(masses["m_g"])
        except KeyError as exc:
            raise DomainError(f"dipole masses need key {exc}")
    else:
        try:
            m = float(masses["m"])
        except KeyError as exc:
            raise DomainError(f"masses need key {exc}")
        m_e, m_g = m, -m
    if not m_e > m_g:
        raise DegenerateLevels(f"need m_e > m_g, got m_e={m_e} m_g={m_g}")
    if variant is Variant.SPIN:
        if A is not None:
            raise WrongVariant("constant A is only defined for atom variants")
        a_val = None
    else:
        a_val = float(A) if A is not None else formfactor.coupling**2 / 3.0
    return SystemModel(variant=variant, m_e=m_e, m_g=m_g, formfactor=formfactor, A=a_val)


# Flat key=value configuration files ------------------------------------------

_FLOAT_KEYS = ("m", "m_e", "m_g", "mu", "d", "a0", "A")
_STR_KEYS = ("variant", "formfactor.family", "formfactor.table_path")
_KNOWN_KEYS = _FLOAT_KEYS + _STR_KEYS


def _read_pairs(path):
    pairs = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{ln}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in pairs:
            raise ConfigError(f"{path}:{ln}: duplicate key {key!r}")
        pairs[key] = value
    return pairs


def parse_config(source):
    """Build a model from a flat key=value config file or mapping.

    Recognized keys: ``variant``, ``m`` or ``m_e``/``m_g``,
    ``formfactor.family`` (defaults per variant), ``mu``, ``d``, ``a0``,
    ``A`` and ``formfactor.table_path`` (CSV with k,g columns, resolved
    relative to the config file).  Unknown or inconsistent keys raise
    :class:`ConfigError`.
    """
    if isinstance(source, Mapping):
        pairs = {str(k): str(v) for k, v in source.items()}
        base = Path.cwd()
    else:
        pairs = _read_pairs(source)
        base = Path(source).resolve().parent
    for key in pairs:
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"unknown config key {key!r}")

    def take_float(key):
        if key not in pairs:
            return None
        value = pairs.pop(key)
        try:
            return float(value)
        except ValueError:
            raise ConfigError(f"key {key!r} must be a number, got {value!r}")

    if "variant" not in pairs:
        raise ConfigError("config must set variant")
    try:
        variant = Variant.coerce(pairs.pop("variant"))
    except DomainError as exc:
        raise ConfigError(str(exc))

    default_family = "hydrogen_spin" if variant is Variant.SPIN else "hydrogen_dipole"
    family = pairs.pop("formfactor.family", default_family)
    if family not in _FAMILIES:
        raise ConfigError(f"unknown formfactor family {family!r}")

    mu = take_float("mu")
    d = take_float("d")
    a0 = take_float("a0")
    a_const = take_float("A")
    table_path = pairs.pop("formfactor.table_path", None)

    if family == "hydrogen_spin":
        if d is not None or table_path is not None:
            raise ConfigError("keys d/table_path not valid for hydrogen_spin")
        ff = hydrogen_spin(mu=1.0 if mu is None else mu, a0=1.0 if a0 is None else a0)
    elif family == "hydrogen_dipole":
        if mu is not None or table_path is not None:
            raise ConfigError("keys mu/table_path not valid for hydrogen_dipole")
        ff = hydrogen_dipole(a0=1.0 if a0 is None else a0, d=d)
    else:
        if mu is not None or d is not None or a0 is not None:
            raise ConfigError("keys mu/d/a0 not valid for tabulated")
        if table_path is None:
            raise ConfigError("tabulated formfactor needs formfactor.table_path")
        path = Path(table_path)
        if not path.is_absolute():
            path = base / path
        try:
            data = np.loadtxt(path, delimiter=",", ndmin=2)
        except OSError as exc:
            raise ConfigError(f"cannot read table {path}: {exc}")
        except ValueError as exc:
            raise ConfigError(f"cannot parse table {path}: {exc}")
        if data.shape[1] != 2:
            raise ConfigError(f"table {path} must have two columns k,g")
        ff = tabulated(data[:, 0], data[:, 1])

    if variant is Variant.DIPOLE:
        if "m" in pairs:
            raise ConfigError("dipole configs use m_e and m_g, not m")
        m_e, m_g = take_float("m_e"), take_float("m_g")
        if m_e is None or m_g is None:
            raise ConfigError("dipole configs must set m_e and m_g")
        masses = {"m_e": m_e, "m_g": m_g}
    else:
        if "m_e" in pairs or "m_g" in pairs:
            raise ConfigError(f"{variant.value} configs use m, not m_e/m_g")
        m = take_float("m")
        if m is None:
            raise ConfigError("config must set m")
        masses = {"m": m}
    if variant is Variant.SPIN and a_const is not None:
        raise ConfigError("key A is not valid for variant spin")
    return make_model(variant, masses, ff, A=a_const)
