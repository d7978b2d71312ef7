"""Document lifecycle orchestration, share links, REST API and CLI."""

from .config import AppConfig, load_config
from .service import DocumentService, ShareView, WorkflowJob
from .states import DocumentState, EDGES, HAPPY_PATH, check_transition, is_terminal

__all__ = [
    "AppConfig",
    "DocumentService",
    "DocumentState",
    "EDGES",
    "HAPPY_PATH",
    "ShareView",
    "WorkflowJob",
    "check_transition",
    "is_terminal",
    "load_config",
]
