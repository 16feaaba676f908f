"""Configuration management for diffconcepts."""

from __future__ import annotations

import math
import os
from pathlib import Path

from dotenv import load_dotenv

from diffconcepts.errors import ConfigError

DEFAULT_EPS = 1e-9
DEFAULT_MAX_BREAKPOINTS = 512
DEFAULT_MAX_CONCEPTS = 100_000

SETTINGS = {
    "eps": "DIFFCONCEPTS_EPS",
    "max_breakpoints": "DIFFCONCEPTS_MAX_BREAKPOINTS",
    "max_concepts": "DIFFCONCEPTS_MAX_CONCEPTS",
}


def load_env_files() -> None:
    """Load environment variables from the working tree and current directory."""
    package_root = Path(__file__).resolve().parents[2]
    env_paths = (Path.cwd() / ".env", package_root / ".env")
    seen_paths: set[Path] = set()

    for env_path in env_paths:
        resolved_path = env_path.resolve()
        if resolved_path in seen_paths:
            continue
        seen_paths.add(resolved_path)
        load_dotenv(resolved_path)


def _raw_setting(name: str) -> str | None:
    env_var = SETTINGS.get(name)
    if not env_var:
        return None
    value = os.environ.get(env_var)
    if value is None or not value.strip():
        return None
    return value.strip()


def get_default_eps() -> float:
    """Get the equality tolerance used when comparing successive values.

    Returns:
        The value of DIFFCONCEPTS_EPS, or 1e-9 when it is not set.
    """
    raw = _raw_setting("eps")
    if raw is None:
        return DEFAULT_EPS
    try:
        eps = float(raw)
    except ValueError as exc:
        raise ConfigError(f"{SETTINGS['eps']} must be a number, got {raw!r}") from exc
    if not math.isfinite(eps) or eps < 0:
        raise ConfigError(f"{SETTINGS['eps']} must be finite and >= 0, got {raw!r}")
    return eps


def _positive_int(name: str, default: int) -> int:
    raw = _raw_setting(name)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(
            f"{SETTINGS[name]} must be an integer, got {raw!r}"
        ) from exc
    if value < 1:
        raise ConfigError(f"{SETTINGS[name]} must be >= 1, got {raw!r}")
    return value


def get_max_breakpoints() -> int:
    """Get the cap on breakpoints per encoded series (DIFFCONCEPTS_MAX_BREAKPOINTS)."""
    return _positive_int("max_breakpoints", DEFAULT_MAX_BREAKPOINTS)


def get_max_concepts() -> int:
    """Get the cap on enumerated concepts per context (DIFFCONCEPTS_MAX_CONCEPTS)."""
    return _positive_int("max_concepts", DEFAULT_MAX_CONCEPTS)
