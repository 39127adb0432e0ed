"""
Exception hierarchy for the KLV toolkit.

Computations raise these; report-style checks never do and return
pydantic reports instead (see models/reports.py).
"""


class KlvError(Exception):
    """Base class for every error raised by the toolkit."""


# Laurent polynomial arithmetic

class AlgebraError(KlvError):
    """Errors in exact ring arithmetic."""


class NotDivisible(AlgebraError):
    """Exact division in Z[u, u^-1] has a nonzero remainder."""


class NotLaurent(AlgebraError):
    """A rational function is not a Laurent polynomial with integer coefficients."""


# Weyl groups and foldings

class GroupError(KlvError):
    """Errors building Weyl groups and foldings."""


class NotFiniteType(GroupError):
    """The Cartan matrix does not generate a finite root system."""


class InvalidSigma(GroupError):
    """The permutation is not an involutive automorphism of the Dynkin diagram."""


class UnsupportedOrbit(GroupError):
    """A sigma-orbit on the simple reflections is not of type 1, 2 or 3."""


class UnknownType(GroupError):
    """The named Cartan type is not recognised."""


# Parameter data

class DatumError(KlvError):
    """Errors in parameter data."""


class UnknownName(DatumError):
    """No built-in datum has this name."""


class MissingStatus(DatumError):
    """A (generator, parameter) pair has no status."""


class DanglingReference(DatumError):
    """A status references a parameter that does not exist."""


class DatumFormatError(DatumError):
    """A datum file could not be parsed."""


# Bar operator and canonical basis

class SolverError(KlvError):
    """Errors in the bar-operator and canonical-basis solvers."""


class Underdetermined(SolverError):
    """The constraints do not determine a column of the bar operator."""


class Inconsistent(SolverError):
    """The constraints admit no solution compatible with the datum."""


class InterpolationMismatch(SolverError):
    """Sampled values are not explained by a polynomial of the expected degree."""


class NotSelfDualConsistent(SolverError):
    """The mirror condition of the canonical-basis sweep fails."""


# Finite-field models

class FqError(KlvError):
    """Errors in finite-field models."""


class UnsupportedQ(FqError):
    """q is not an odd prime power within the configured range."""


class UnknownFamily(FqError):
    """No finite-field model has this family name."""


class UnclassifiableColumn(FqError):
    """An interpolated column matches no generator kind."""
