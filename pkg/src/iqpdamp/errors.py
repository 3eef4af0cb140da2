"""Error types shared across modules, mapped to CLI exit codes."""

from __future__ import annotations


class CertificationError(RuntimeError):
    """Requested accuracy cannot be certified for these parameters (exit code 3)."""


class NumericalError(RuntimeError):
    """A numerical invariant failed at runtime (exit code 4)."""
