"""Intent-triggered workflow instances and next-best-action guidance.

A workflow definition is a linear ordered step list; instances advance only
through agent step-completion actions. Triggering is exactly-once per
(session, workflow): the instance is created at the first turn its intent's
confidence crosses threshold and never duplicated. Readiness gating is
entity-presence only.
"""

from __future__ import annotations

from .errors import ConfigError, StateError, StepOrderError
from .models import WorkflowDefinition, WorkflowInstance, WorkflowStep
from .session import SessionState
from .understanding import IntentRegistry


class WorkflowCatalog:
    def __init__(self, definitions: dict[str, WorkflowDefinition]):
        self.definitions = definitions

    @classmethod
    def from_doc(cls, doc: dict) -> "WorkflowCatalog":
        definitions: dict[str, WorkflowDefinition] = {}
        for spec in doc.get("workflows", []):
            workflow_id = spec.get("workflow_id", "")
            if not workflow_id:
                raise ConfigError("workflow missing workflow_id")
            steps = []
            seen_ids: set[str] = set()
            for step in spec.get("steps", []):
                step_id = step.get("step_id", "")
                if not step_id or step_id in seen_ids:
                    raise ConfigError(f"workflow {workflow_id!r}: duplicate or empty step_id")
                seen_ids.add(step_id)
                steps.append(
                    WorkflowStep(
                        step_id=step_id,
                        instruction=step.get("instruction", ""),
                        requires=list(step.get("requires", [])),
                    )
                )
            if not steps:
                raise ConfigError(f"workflow {workflow_id!r} has no steps")
            outcomes = list(spec.get("terminal_outcomes", []))
            if not outcomes:
                raise ConfigError(f"workflow {workflow_id!r} has no terminal outcomes")
            definitions[workflow_id] = WorkflowDefinition(
                workflow_id=workflow_id,
                title=spec.get("title", workflow_id),
                steps=steps,
                terminal_outcomes=outcomes,
            )
        return cls(definitions)

    def get(self, workflow_id: str) -> WorkflowDefinition:
        return self.definitions[workflow_id]

    def validate_registry(self, registry: IntentRegistry) -> None:
        """Every intent must bind to a known workflow; checked at load time."""
        for label, spec in registry.intents.items():
            if spec.workflow_id not in self.definitions:
                raise ConfigError(f"intent {label!r} references unknown workflow {spec.workflow_id!r}")


def trigger_workflows(
    newly_triggered: list[str],
    registry: IntentRegistry,
    catalog: WorkflowCatalog,
    state: SessionState,
) -> list[WorkflowInstance]:
    """One new instance per label whose workflow is not yet instantiated."""
    existing = {w.workflow_id for w in state.workflows}
    created: list[WorkflowInstance] = []
    for label in newly_triggered:
        spec = registry.intents[label]
        if spec.workflow_id in existing:
            continue
        existing.add(spec.workflow_id)
        hypothesis = state.intents[label]
        instance = WorkflowInstance(
            workflow_id=spec.workflow_id,
            session_id=state.session_id,
            triggered_at_turn=hypothesis.triggered_at_turn or 0,
        )
        state.workflows.append(instance)
        created.append(instance)
    return created


def next_best_actions(
    instance: WorkflowInstance,
    catalog: WorkflowCatalog,
    state: SessionState,
    lookahead: int = 2,
) -> list[dict]:
    """Current step plus up to ``lookahead`` upcoming steps. A step is ready
    when every required entity kind is present in state."""
    if instance.status != "active":
        return []
    definition = catalog.get(instance.workflow_id)
    window = definition.steps[instance.cursor : instance.cursor + 1 + lookahead]
    present = state.entity_kinds_present()
    return [
        {
            "step_id": step.step_id,
            "instruction": step.instruction,
            "ready": all(kind in present for kind in step.requires),
        }
        for step in window
    ]


def advance(
    instance: WorkflowInstance,
    catalog: WorkflowCatalog,
    step_id: str,
    turn_index: int,
    outcome: str | None = None,
) -> WorkflowInstance:
    """Record completion of the current step; out-of-order steps are rejected
    and the instance is left unchanged."""
    if instance.status != "active":
        raise StateError(f"workflow {instance.workflow_id} is {instance.status}")
    definition = catalog.get(instance.workflow_id)
    current = definition.steps[instance.cursor]
    if step_id != current.step_id:
        raise StepOrderError(
            f"current step is {current.step_id!r}, got {step_id!r}"
        )
    if outcome is not None and outcome not in definition.terminal_outcomes:
        raise StepOrderError(f"outcome {outcome!r} not a terminal outcome of {instance.workflow_id}")
    instance.completed_steps.append((step_id, turn_index))
    instance.cursor += 1
    if instance.cursor >= len(definition.steps):
        instance.status = "completed"
        if outcome is not None:
            instance.outcome = outcome
        elif "resolved" in definition.terminal_outcomes:
            instance.outcome = "resolved"
        else:
            instance.outcome = definition.terminal_outcomes[0]
    return instance


def abandon_open_instances(state: SessionState) -> list[WorkflowInstance]:
    """Call end with active instances: mark them abandoned, no outcome."""
    abandoned = []
    for instance in state.workflows:
        if instance.status == "active":
            instance.status = "abandoned"
            abandoned.append(instance)
    return abandoned
