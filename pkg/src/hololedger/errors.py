"""Exception hierarchy for hololedger."""

from __future__ import annotations


class HoloLedgerError(Exception):
    """Base error class for hololedger operations."""


class InvalidStateError(HoloLedgerError):
    """A state, ensemble or projector family violates its invariants."""


class InvalidDistributionError(HoloLedgerError):
    """A probability vector is negative or does not sum to one."""


class DomainError(HoloLedgerError):
    """An argument lies outside the domain of an operation."""


class ConstructionError(HoloLedgerError):
    """A basis or network cannot be constructed from the given request."""


class LedgerError(HoloLedgerError):
    """A schedule or ledger record is malformed."""


class ConfigError(HoloLedgerError):
    """Invalid run configuration (CLI exit code 2)."""


class ContractViolation(HoloLedgerError):  # noqa: N818
    """A numerical contract was not met (CLI exit code 3)."""


__all__ = [
    "HoloLedgerError",
    "InvalidStateError",
    "InvalidDistributionError",
    "DomainError",
    "ConstructionError",
    "LedgerError",
    "ConfigError",
    "ContractViolation",
]
