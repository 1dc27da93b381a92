"""
Exception types shared by every justinf module.

Each exception carries a machine-readable ``kind`` and the exit status the
command-line front end reports for it.
"""
from typing import Any, Dict, Optional


class JustInfError(Exception):
    """Base class for all errors raised by the library."""

    kind: str = "error"
    exit_code: int = 1

    def __init__(self, message: str, kind: Optional[str] = None):
        super().__init__(message)
        self.message = message
        if kind is not None:
            self.kind = kind

    def to_dict(self) -> Dict[str, Any]:
        """Structured form printed by the CLI."""
        return {"kind": self.kind, "message": self.message}


class PreconditionError(JustInfError, ValueError):
    """An operation was called outside its precondition (exit 1)."""

    kind = "precondition"
    exit_code = 1


class ResourceCapError(JustInfError, RuntimeError):
    """A configured depth/level/size cap would be exceeded (exit 2)."""

    kind = "resource_cap"
    exit_code = 2

    def __init__(self, cap_name: str, limit: int, requested: int):
        super().__init__(
            f"{cap_name} exceeded: requested {requested}, limit {limit} "
            f"(raise it with --cap-override {cap_name}=N)"
        )
        self.cap_name = cap_name
        self.limit = limit
        self.requested = requested

    def to_dict(self) -> Dict[str, Any]:
        data = super().to_dict()
        data.update({"cap": self.cap_name, "limit": self.limit, "requested": self.requested})
        return data


class MalformedInputError(JustInfError, ValueError):
    """Input could not be parsed or violates a data invariant (exit 3)."""

    kind = "malformed_input"
    exit_code = 3


def check_cap(cap_name: str, limit: int, requested: int) -> None:
    """Raise ResourceCapError if ``requested`` is above ``limit``."""
    if requested > limit:
        raise ResourceCapError(cap_name, limit, requested)
