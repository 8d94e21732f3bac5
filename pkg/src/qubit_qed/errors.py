"""Exception hierarchy for the qubit-qed package.

Every error raised by this package derives from ``QubitQedError`` so callers
can catch the whole family with one clause.  The two intermediate bases group
failures by origin: ``DomainError`` for arguments outside the mathematical
domain of an operation, ``QuadratureError`` for numerical integration that
cannot be carried out reliably.
"""
from __future__ import annotations


class QubitQedError(Exception):
    """Base class for all package errors."""


class ConfigError(QubitQedError):
    """A configuration file or mapping could not be interpreted."""


class DomainError(QubitQedError):
    """An argument lies outside the domain of the requested operation."""


class DegenerateLevels(DomainError):
    """Level masses do not satisfy m_e > m_g."""


class NonPositiveFrequency(DomainError):
    """A strictly positive frequency was required."""


class WrongVariant(DomainError):
    """The operation is not defined for this system variant."""


class NotApplicable(DomainError):
    """The requested diagram does not exist for this variant."""


class UnknownDiagram(DomainError):
    """The diagram label is not one of the known fourth-order diagrams."""


class PoleError(DomainError):
    """Evaluation was requested exactly on a propagator or resonance pole."""


class QuadratureError(QubitQedError):
    """A quadrature could not reach the requested accuracy."""


class IntegrabilityError(QuadratureError):
    """The integrand is not integrable or the formfactor table is invalid."""


class ExtrapolationUnstable(QuadratureError):
    """Richardson extrapolation of the regulator sequence did not settle."""


class GridTooCoarse(QuadratureError):
    """A frequency grid cannot resolve the structures being integrated."""


class CouplingTooLarge(QubitQedError):
    """The coupling is outside the perturbative regime of the operation."""


class NoConvergence(QubitQedError):
    """An iterative solver failed to converge."""
