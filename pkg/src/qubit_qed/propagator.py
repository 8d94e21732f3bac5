"""Free propagators, projector-valued algebra and Dyson resummation.

Matter-line quantities are diagonal in the excited/ground projector basis
and are carried as :class:`ProjectorValue` pairs (c_e, c_g).  Photon-line
quantities are scalars.  Transition-level quantities with several photon
polarization channels are carried as :class:`ChannelValue`.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError, PoleError, WrongVariant


@dataclass(frozen=True)
class ProjectorValue:
    """A value c_e * P_e + c_g * P_g on the matter Hilbert space.

    The excited projector P_e has rank ``dim_e`` (1 for spin and two-level,
    3 for dipole); the ground projector has rank 1.  Sums, differences and
    products act channel-wise because the projectors are orthogonal.
    """

    c_e: complex
    c_g: complex
    dim_e: int = 1

    def _check(self, other):
        if self.dim_e != other.dim_e:
            raise DomainError("projector values live on different spaces")

    def __add__(self, other):
        if isinstance(other, ProjectorValue):
            self._check(other)
            return ProjectorValue(self.c_e + other.c_e, self.c_g + other.c_g, self.dim_e)
        return ProjectorValue(self.c_e + other, self.c_g + other, self.dim_e)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1.0) * other

    def __rsub__(self, other):
        return (-1.0) * self + other

    def __mul__(self, other):
        if isinstance(other, ProjectorValue):
            self._check(other)
            return ProjectorValue(self.c_e * other.c_e, self.c_g * other.c_g, self.dim_e)
        return ProjectorValue(self.c_e * other, self.c_g * other, self.dim_e)

    __rmul__ = __mul__

    def __neg__(self):
        return (-1.0) * self

    def inverse(self):
        """Channel-wise reciprocal."""
        if self.c_e == 0 or self.c_g == 0:
            raise PoleError("projector value has a vanishing channel")
        return ProjectorValue(1.0 / self.c_e, 1.0 / self.c_g, self.dim_e)

    def trace(self):
        """Trace dim_e * c_e + c_g."""
        return self.dim_e * self.c_e + self.c_g


@dataclass(frozen=True)
class PhotonLineValue:
    """Scalar value of an internal photon line."""

    value: complex


@dataclass(frozen=True)
class ChannelValue:
    """Per-channel transition-level values.

    Spin quantities have three photon channels (plus, minus, zero); atom
    quantities have a single scalar channel.
    """

    values: tuple
    kind: str

    @classmethod
    def spin(cls, plus, minus, zero):
        return cls(values=(plus, minus, zero), kind="spin")

    @classmethod
    def scalar(cls, value):
        return cls(values=(value,), kind="scalar")

    def _get(self, name, index):
        if self.kind != "spin":
            raise WrongVariant(f"channel {name} exists only for spin quantities")
        return self.values[index]

    @property
    def plus(self):
        return self._get("plus", 0)

    @property
    def minus(self):
        return self._get("minus", 1)

    @property
    def zero(self):
        return self._get("zero", 2)

    @property
    def scalar_value(self):
        if self.kind != "scalar":
            raise WrongVariant("this quantity has spin channels, not a scalar")
        return self.values[0]

    def channels(self):
        """Yield (name, value) pairs in a fixed order."""
        names = ("plus", "minus", "zero") if self.kind == "spin" else ("scalar",)
        return tuple(zip(names, self.values))

    def map(self, fn):
        """Apply fn to every channel, keeping the kind."""
        return ChannelValue(values=tuple(fn(v) for v in self.values), kind=self.kind)


def electron_propagator(model, p0, eps=0.0):
    """Free matter propagator at energy p0.

    The excited channel carries 1/(p0 - m_e + i*eps), the ground channel
    1/(p0 - m_g - i*eps); the opposite regulator signs implement the
    ground level as the filled reference state.

    Raises
    ------
    PoleError
        If p0 hits a level mass with eps = 0.
    """
    p0 = complex(p0)
    eps = float(eps)
    den_e = p0 - model.m_e + 1j * eps
    den_g = p0 - model.m_g - 1j * eps
    if den_e == 0 or den_g == 0:
        raise PoleError(f"propagator pole at p0={p0}")
    return ProjectorValue(1.0 / den_e, 1.0 / den_g, model.dim_e)


def photon_line(k, k0, eps=0.0):
    """Internal photon line 1/(k0**2 - k**2 + i*eps) at momentum k >= 0."""
    k = float(k)
    if k < 0.0:
        raise DomainError("photon momentum must be nonnegative")
    den = complex(k0) ** 2 - k**2 + 1j * float(eps)
    if den == 0:
        raise PoleError(f"photon line on shell at k0={k0}, k={k}")
    return PhotonLineValue(1.0 / den)


def dyson_resum(free, sigma):
    """Geometric resummation G = 1 / (free**-1 - sigma), channel-wise."""
    free._check(sigma)
    out = []
    for f, s in ((free.c_e, sigma.c_e), (free.c_g, sigma.c_g)):
        if f == 0:
            raise PoleError("free propagator channel vanishes")
        den = 1.0 / f - s
        if den == 0:
            raise PoleError("resummed propagator pole")
        out.append(1.0 / den)
    return ProjectorValue(out[0], out[1], free.dim_e)


def dyson_truncate(free, sigma, n_terms):
    """Partial Dyson sum with ``n_terms`` terms: S + S*Sigma*S + ...

    ``n_terms=1`` returns the free propagator; the difference from
    :func:`dyson_resum` scales like (sigma * free)**n_terms.
    """
    n_terms = int(n_terms)
    if n_terms < 1:
        raise DomainError("n_terms must be at least 1")
    free._check(sigma)
    out = []
    for f, s in ((free.c_e, sigma.c_e), (free.c_g, sigma.c_g)):
        term = f
        acc = f
        for _ in range(n_terms - 1):
            term = term * s * f
            acc = acc + term
        out.append(acc)
    return ProjectorValue(out[0], out[1], free.dim_e)
