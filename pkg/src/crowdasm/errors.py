"""Exception types shared across the package."""

from __future__ import annotations

from dataclasses import dataclass


class CrowdAsmError(Exception):
    """Base class for all package errors."""


@dataclass(frozen=True)
class ConfigIssue:
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


class ConfigError(CrowdAsmError):
    """A scenario config violates one or more invariants; carries every issue found."""

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(str(i) for i in self.issues))

    def codes(self) -> set[str]:
        return {i.code for i in self.issues}


class LengthMismatch(CrowdAsmError):
    pass


class DomainError(CrowdAsmError):
    pass


class NoEligibleWorkers(CrowdAsmError):
    """The offline pool of a skill has no worker at or above the reliability threshold."""


class MissingSkillReliability(CrowdAsmError):
    pass


class MissingReliability(CrowdAsmError):
    pass


class InternalInconsistency(CrowdAsmError):
    """A plan promised capacity that team assembly could not realize (scheduler bug)."""


class SearchSpaceTooLarge(CrowdAsmError):
    pass


class UnservableSet(CrowdAsmError):
    pass


class TraceTooShort(CrowdAsmError):
    pass


class EmptyTrace(CrowdAsmError):
    pass


class UnknownPolicy(CrowdAsmError):
    pass
