"""Exception types shared across the engine.

Every error carries a short machine-readable ``code`` so the wire protocol
and the CLI can report failures without string matching on messages.
"""

from __future__ import annotations


class AgentAssistError(Exception):
    """Base class; ``code`` identifies the failure class on the wire."""

    code = "internal"

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class ConfigError(AgentAssistError):
    """Invalid configuration or store document, detected at load time."""

    code = "config"


class ParseError(AgentAssistError):
    """A record failed validation; ``field`` names the offending field."""

    code = "parse-error"

    def __init__(self, field: str, detail: str):
        super().__init__(f"{field}: {detail}")
        self.field = field


class DuplicateSessionError(AgentAssistError):
    code = "duplicate-session"


class UnknownSessionError(AgentAssistError):
    code = "unknown-session"


class SessionEndedError(AgentAssistError):
    code = "session-ended"


class JournalOrderError(AgentAssistError):
    """Journal seq gap or duplicate."""

    code = "journal-order"


class EventOrderError(AgentAssistError):
    """Transcript event arrived out of turn order."""

    code = "event-order"


class StepOrderError(AgentAssistError):
    """Agent completed a workflow step that is not the current one."""

    code = "step-order"


class UnknownReferenceError(AgentAssistError):
    """An agent action referenced a query/workflow that does not exist."""

    code = "unknown-reference"


class StateError(AgentAssistError):
    """Operation invoked in the wrong session lifecycle phase."""

    code = "state"


class MissingCohortError(AgentAssistError):
    """KPI computation referenced a cohort with no call records."""

    code = "missing-cohort"


class InvariantViolation(AgentAssistError):
    """An internal contract failed; maps to CLI exit code 3."""

    code = "invariant"
