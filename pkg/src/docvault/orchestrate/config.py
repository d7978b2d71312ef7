"""Service configuration: JSON file plus DOCVAULT_* environment overrides."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path


@dataclass
class AppConfig:
    data_dir: str = "docvault-data"
    host: str = "127.0.0.1"
    port: int = 8345
    pbkdf2_iterations: int = 100_000
    keystore_key: str = ""  # 64 hex chars or passphrase; empty -> random per run
    pinning_url: str = ""
    pinning_token: str = ""
    pinning_offline: bool = True
    synchronous_workflow: bool = False
    default_layer_ids: list[int] = field(default_factory=lambda: [1])
    ledger_batch_cap: int = 256
    max_step_retries: int = 5
    retry_backoff_ms: int = 200
    log_file: str = ""

    @property
    def data_path(self) -> Path:
        return Path(self.data_dir)


_ENV_PREFIX = "DOCVAULT_"


def _coerce(kind, raw: str):
    if kind is bool:
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if kind is int:
        return int(raw)
    if kind == list[int]:
        return [int(x) for x in raw.split(",") if x.strip()]
    return raw


def load_config(path: str | Path | None = None, env: dict | None = None) -> AppConfig:
    """Start from defaults, apply the JSON file, then environment overrides
    (e.g. DOCVAULT_PORT=9000 overrides ``port``)."""
    values: dict = {}
    if path is not None and Path(path).exists():
        values.update(json.loads(Path(path).read_text()))
    environment = os.environ if env is None else env
    for f in fields(AppConfig):
        env_key = _ENV_PREFIX + f.name.upper()
        if env_key in environment:
            values[f.name] = _coerce(_annotation(f.name), environment[env_key])
    known = {f.name for f in fields(AppConfig)}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return AppConfig(**values)


def _annotation(name: str):
    hints = {
        "port": int,
        "pbkdf2_iterations": int,
        "ledger_batch_cap": int,
        "max_step_retries": int,
        "retry_backoff_ms": int,
        "pinning_offline": bool,
        "synchronous_workflow": bool,
        "default_layer_ids": list[int],
    }
    return hints.get(name, str)
