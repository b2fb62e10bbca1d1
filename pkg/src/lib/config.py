"""
Configuration management for symdyn.

Handles loading, saving, and validating search bounds from config.json.
"""

import json
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import ValidationError

from .logging_config import get_logger
from .models import SearchBounds

logger = get_logger("config")

DEFAULT_CONFIG_PATH = Path(__file__).parent.parent / "config.json"


class Config:
    """Configuration manager for search bounds and caps."""

    DEFAULT_CONFIG = SearchBounds().model_dump()

    def __init__(self, config_path: Optional[Path] = None):
        self.config_path = config_path or DEFAULT_CONFIG_PATH
        self._config: Dict[str, Any] = dict(self.DEFAULT_CONFIG)
        self._load()

    def _load(self) -> None:
        """Load configuration from file if it exists."""
        if self.config_path.exists():
            try:
                raw = json.loads(self.config_path.read_text())
            except Exception:
                logger.warning(f"Ignoring unreadable config file {self.config_path}")
                return
            if isinstance(raw, dict):
                self._merge(raw)

    def _merge(self, updates: Dict[str, Any]) -> None:
        """Merge known keys one at a time so a bad value only loses itself."""
        for key, value in updates.items():
            if key not in self.DEFAULT_CONFIG:
                logger.debug(f"Ignoring unknown config key {key!r}")
                continue
            candidate = dict(self._config)
            candidate[key] = value
            try:
                self._config = SearchBounds(**candidate).model_dump()
            except ValidationError:
                logger.warning(f"Invalid value for {key!r}: {value!r}; keeping {self._config[key]!r}")

    def save(self) -> None:
        """Persist configuration to file."""
        try:
            self.config_path.write_text(json.dumps(self._config, indent=2) + "\n")
        except Exception:
            logger.warning(f"Could not write config file {self.config_path}")

    def get(self, key: str, default: Any = None) -> Any:
        """Get a configuration value."""
        return self._config.get(key, default)

    def update(self, updates: Dict[str, Any]) -> None:
        """Update configuration with new values (not persisted until save())."""
        self._merge({k: v for k, v in updates.items() if v is not None})

    def as_dict(self) -> Dict[str, Any]:
        """Return configuration as dictionary."""
        return self._config.copy()

    @property
    def bounds(self) -> SearchBounds:
        return SearchBounds(**self._config)
