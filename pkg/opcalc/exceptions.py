#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Error hierarchy for the engine.

Mathematical failures exit with status 1, malformed input with status 2.
Identity checks inside suites never raise; they record failures in reports.
"""


class OpcalcError(Exception):
    """Root of all engine errors."""

    exit_code = 1

    def __init__(self, message, degree=None):
        super().__init__(message)
        self.degree = degree


class InputError(OpcalcError):
    """Malformed algebra file, configuration or field selector."""

    exit_code = 2


class InvalidAlgebra(InputError):
    """Structure constants fail associativity, unitality or form checks."""


class NoFrobeniusForm(InputError):
    """A cyclic structure was requested for an algebra without a form."""


class ContainmentViolation(OpcalcError):
    """Boundaries are not contained in cycles."""


class NotAChainMap(OpcalcError):
    """A map does not send cycles to cycles and boundaries to boundaries."""


class NotAComplex(OpcalcError):
    """Consecutive differentials do not compose to zero."""


class InconsistentSystem(OpcalcError):
    """A linear system has no solution."""


class UntrustedDegree(OpcalcError):
    """The requested degree may be polluted by window truncation."""


class ArityOverflow(OpcalcError):
    """A composition result leaves the arity window."""


class WindowOverflow(OpcalcError):
    """A module degree leaves the materialized window."""


class CyclicAxiomViolation(OpcalcError):
    """The cyclic operator fails one of the cyclic operad axioms."""


class DegeneracyNotPreserved(OpcalcError):
    """An operator does not map degenerate chains to degenerate chains."""


class NotNormalized(OpcalcError):
    """An operad element is not killed by all codegeneracies."""


class NotACocycle(OpcalcError):
    """The candidate fundamental cycle is not b-closed."""


class BNotExact(OpcalcError):
    """B applied to the candidate is not b-exact."""


class NotQuasiIso(OpcalcError):
    """Contraction with the candidate is not an isomorphism on homology."""


class LiftNotFound(OpcalcError):
    """No d_u-closed lift exists inside the current window."""


class BracketNonzero(OpcalcError):
    """The transferred Gerstenhaber bracket does not vanish."""

    def __init__(self, message, witness=None, degree=None):
        super().__init__(message, degree=degree)
        self.witness = witness
