"""Deterministic real-time agent-assist engine.

Streaming transcript events flow through a fixed pipeline (entities,
intents, sentiment, workflows, suggested queries, tiered FAQ/RAG answers,
incremental summaries, redacted final summary), journaled per session for
byte-stable replay. A simulator replays scripted calls in-process or over
the newline-delimited wire protocol and computes KPI/A-B reports.
"""

__version__ = "0.1.0"

from .config import EngineConfig, load_config
from .orchestrator import Engine, SessionRuntime
from .stores import Stores, load_stores

__all__ = [
    "EngineConfig",
    "load_config",
    "Engine",
    "SessionRuntime",
    "Stores",
    "load_stores",
    "__version__",
]
