"""Document lifecycle state machine: states, legal edges, terminality."""

from __future__ import annotations

from enum import Enum

from ..errors import StateViolation


class DocumentState(str, Enum):
    CREATED = "CREATED"
    RECOGNITION_STARTED = "RECOGNITION_STARTED"
    FACTS_COLLECTED = "FACTS_COLLECTED"
    NOTARIZATION_AWAITING = "NOTARIZATION_AWAITING"
    NOTARIZATION_STARTED = "NOTARIZATION_STARTED"
    OBFUSCATION_STARTED = "OBFUSCATION_STARTED"
    TO_BE_UPLOADED = "TO_BE_UPLOADED"
    COMPLETED = "COMPLETED"
    FAILED = "FAILED"


_S = DocumentState

EDGES: dict[DocumentState, frozenset[DocumentState]] = {
    _S.CREATED: frozenset({_S.RECOGNITION_STARTED, _S.FAILED}),
    _S.RECOGNITION_STARTED: frozenset({_S.FACTS_COLLECTED, _S.FAILED}),
    _S.FACTS_COLLECTED: frozenset({_S.NOTARIZATION_AWAITING, _S.FAILED}),
    _S.NOTARIZATION_AWAITING: frozenset({_S.NOTARIZATION_STARTED, _S.FAILED}),
    _S.NOTARIZATION_STARTED: frozenset({_S.OBFUSCATION_STARTED, _S.FAILED}),
    _S.OBFUSCATION_STARTED: frozenset({_S.TO_BE_UPLOADED, _S.FAILED}),
    _S.TO_BE_UPLOADED: frozenset({_S.COMPLETED, _S.FAILED}),
    _S.COMPLETED: frozenset(),
    _S.FAILED: frozenset(),
}

HAPPY_PATH = (
    _S.RECOGNITION_STARTED,
    _S.FACTS_COLLECTED,
    _S.NOTARIZATION_AWAITING,
    _S.NOTARIZATION_STARTED,
    _S.OBFUSCATION_STARTED,
    _S.TO_BE_UPLOADED,
    _S.COMPLETED,
)


def is_terminal(state: DocumentState) -> bool:
    return state in (DocumentState.COMPLETED, DocumentState.FAILED)


def check_transition(from_state: DocumentState, to_state: DocumentState) -> None:
    if to_state not in EDGES[from_state]:
        raise StateViolation(f"illegal transition {from_state.value} -> {to_state.value}")
