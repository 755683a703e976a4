"""
Configuration Manager - boselab run settings

Settings come from a YAML file (default ~/.config/boselab/config.yaml) merged
over DEFAULT_CONFIG; the CLI overrides individual keys before validate() runs.

Keys:
    q                 base field order, a prime power in [2, 9]
    seed              root seed of every random stream (non-negative)
    samples           draws per randomized check
    cap               largest point count an enumeration may visit
    rejection_budget  draws allowed per accepted zero in the cone check
    order_samples     5-spaces drawn by order/dimension sampling
    log_level         logging level name
    log_file          optional log file (stderr when null)
    report_dir        where --save writes JSON reports

Public API:
    ConfigManager(config_path: Optional[str] = None)
    - config: dict[str, Any]
    - get(key, default=None) / set(key, value)
    - save() -> None
    - validate() -> tuple[bool, list[str]]
"""

import logging
import shutil
import tempfile
from pathlib import Path
from typing import Any, Optional

import galois
import yaml

logger = logging.getLogger(__name__)

CONFIG_DIR = Path.home() / ".config" / "boselab"


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


class ConfigManager:
    """
    Run settings backed by a YAML file.

    A missing file is created with the defaults; an unreadable or malformed
    file leaves the defaults in place. Unknown keys are kept as they are.
    """

    DEFAULT_CONFIG = {
        "q": 2,
        "seed": 1,
        "samples": 25,
        "cap": 20_000_000,
        "rejection_budget": 512,
        "order_samples": 2000,
        "log_level": "WARNING",
        "log_file": None,
        "report_dir": "reports",
    }

    # Inclusive bounds for the integer settings
    VALIDATION_RANGES = {
        "q": (2, 9),
        "samples": (1, 100_000),
        "cap": (1000, 1_000_000_000),
        "rejection_budget": (16, 100_000),
        "order_samples": (1, 1_000_000),
    }

    VALID_LOG_LEVELS = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}

    def __init__(self, config_path: Optional[str] = None):
        if config_path is None:
            CONFIG_DIR.mkdir(parents=True, exist_ok=True)
            config_path = CONFIG_DIR / "config.yaml"
        self.config_path = Path(config_path)
        self.config = self._read()

    def _defaults(self) -> dict[str, Any]:
        return dict(self.DEFAULT_CONFIG)

    def _read(self) -> dict[str, Any]:
        if not self.config_path.exists():
            logger.info(f"No config at {self.config_path}, writing defaults")
            self._write_defaults()
            return self._defaults()

        try:
            text = self.config_path.read_text(encoding="utf-8")
            loaded = yaml.safe_load(text)
        except yaml.YAMLError as e:
            logger.error(f"Invalid YAML in {self.config_path}: {e}, using defaults")
            return self._defaults()
        except OSError as e:
            logger.error(f"Cannot read {self.config_path}: {e}, using defaults")
            return self._defaults()

        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            logger.error(f"{self.config_path} does not hold a mapping, using defaults")
            return self._defaults()

        settings = self._defaults()
        settings.update(loaded)
        logger.info(f"Loaded run settings from {self.config_path}")
        return settings

    def _write_defaults(self) -> None:
        try:
            self.config_path.parent.mkdir(parents=True, exist_ok=True)
            self.config_path.write_text(
                yaml.dump(self.DEFAULT_CONFIG, default_flow_style=False, sort_keys=False),
                encoding="utf-8",
            )
        except OSError as e:
            logger.error(f"Could not write default config to {self.config_path}: {e}")

    def get(self, key: str, default: Any = None) -> Any:
        return self.config.get(key, default)

    def set(self, key: str, value: Any) -> None:
        """Change one setting in memory; save() persists it."""
        self.config[key] = value

    def save(self) -> None:
        """
        Write the settings back atomically (temp file in the same directory, then move).

        Raises:
            OSError: the file could not be written (logged, then re-raised)
        """
        folder = self.config_path.parent
        try:
            folder.mkdir(parents=True, exist_ok=True)
            with tempfile.NamedTemporaryFile(
                mode="w", encoding="utf-8", dir=folder, delete=False, suffix=".yaml"
            ) as handle:
                yaml.dump(self.config, handle, default_flow_style=False, sort_keys=False)
                staged = Path(handle.name)
            shutil.move(str(staged), str(self.config_path))
            logger.info(f"Saved run settings to {self.config_path}")
        except Exception as e:
            logger.error(f"Failed to save run settings: {e}")
            raise

    def validate(self) -> tuple[bool, list[str]]:
        """
        Check every setting.

        Returns:
            (is_valid, messages); messages name the offending key.
        """
        errors: list[str] = []
        for key, bounds in self.VALIDATION_RANGES.items():
            value = self.config.get(key)
            if value is not None:
                errors.extend(self._check_bounds(key, value, *bounds))

        q = self.config.get("q")
        if _is_int(q) and q >= 2 and not galois.is_prime_power(q):
            errors.append(f"q value {q} is not a prime power")

        seed = self.config.get("seed")
        if not _is_int(seed) or seed < 0:
            errors.append(f"seed must be a non-negative integer, got {seed!r}")

        level = str(self.config.get("log_level", "")).upper()
        if level not in self.VALID_LOG_LEVELS:
            choices = ", ".join(sorted(self.VALID_LOG_LEVELS))
            errors.append(f"log_level '{self.config.get('log_level')}' is not one of {choices}")

        if not str(self.config.get("report_dir") or "").strip():
            errors.append("report_dir cannot be empty")

        return (not errors, errors)

    @staticmethod
    def _check_bounds(key: str, value: Any, low: int, high: int) -> list[str]:
        if not _is_int(value):
            return [f"{key} must be an integer, got {type(value).__name__}"]
        if not low <= value <= high:
            return [f"{key} value {value} out of range [{low}, {high}]"]
        return []
