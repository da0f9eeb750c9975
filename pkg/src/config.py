from __future__ import annotations
from pathlib import Path
import os

from .errors import DomainError, ErrorTag

# every getter re-reads the environment, so tests can monkeypatch freely


def _int_env(name: str, default: int, minimum: int = 1) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise DomainError(ErrorTag.DEGENERATE_INPUT, f"{name} must be an integer, got {raw!r}")
    if value < minimum:
        raise DomainError(ErrorTag.DEGENERATE_INPUT, f"{name} must be >= {minimum}")
    return value


def db_path() -> Path:
    env_path = os.getenv("DESSINS4_DB_PATH")
    path = Path(env_path) if env_path else Path.home() / ".dessins4" / "census.db"
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def precision() -> int:
    return _int_env("DESSINS4_PRECISION", 32)


def kmax() -> int:
    return _int_env("DESSINS4_KMAX", 8)


def threads() -> int:
    return _int_env("DESSINS4_THREADS", 1)


def d_bits() -> int:
    """Bit bound under which d-invariants are also returned as exact integers."""
    return _int_env("DESSINS4_D_BITS", 4096)


def search_limit() -> int:
    return _int_env("DESSINS4_SEARCH_LIMIT", 1 << 16, minimum=2)


def log_level() -> str:
    return (os.getenv("DESSINS4_LOG_LEVEL") or "WARNING").upper()
