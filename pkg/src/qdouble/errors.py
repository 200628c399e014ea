"""Exception taxonomy shared across the package."""

from __future__ import annotations


class QDoubleError(Exception):
    """Base class for all package errors."""


# group_core
class TableNotAGroup(QDoubleError):
    """Multiplication table violates a group axiom; message names the witness."""


class NotCyclicQuotient(QDoubleError):
    pass


class NotSolvable(QDoubleError):
    pass


# rep_theory
class ElementNotInGroup(QDoubleError):
    pass


class IncompleteIrrepSet(QDoubleError):
    pass


class IrrepValidationFailure(QDoubleError):
    pass


# lattice
class Disconnected(QDoubleError):
    pass


class InvalidRibbonSpec(QDoubleError):
    pass


class InvalidSite(QDoubleError):
    pass


# qudit_sim
class NonUnitary(QDoubleError):
    pass


class SupportOutOfRange(QDoubleError):
    pass


class ZeroImage(QDoubleError):
    pass


class BasisNotOrthonormal(QDoubleError):
    pass


class TooLarge(QDoubleError):
    pass


class AncillaNotDisentangled(QDoubleError):
    pass


# quantum_double
class UnsupportedRibbon(QDoubleError):
    pass


class IncompleteLabels(QDoubleError):
    pass


class NotClosed(QDoubleError):
    pass


class NotExact(QDoubleError):
    pass


# adaptive_protocols
class NotMonotone(QDoubleError):
    pass


class ZeroProbabilityBranch(QDoubleError):
    pass


class CompletionOutcome(QDoubleError):
    """Charge measurement landed outside the character-state span (a bug by contract)."""


# cli
class UnknownSuite(QDoubleError):
    pass


class ConfigError(QDoubleError):
    pass
