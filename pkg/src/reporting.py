"""
Report Writer - JSON persistence for suite runs

Key responsibilities:
- Serialize a suite CheckReport into the report schema
- Write reports atomically (temp file, then rename)
- Compute a timing-independent digest for determinism checks
- Load saved reports back, skipping malformed files with a warning

Report schema:
    {
      "tool_version": "0.1.0",
      "suite": "subline",
      "params": {"q": 2, "p": 2, "e": 1, "modulus": [1, 1, 0],
                 "sextic_modulus": [...], "seed": 1, "samples": 25},
      "checks": [{"name": ..., "pass": ..., "counters": {...},
                  "timing_ms": ..., "witness"?: {...}, "checks"?: [...]}],
      "pass": true
    }
"""

import hashlib
import json
import logging
import shutil
import tempfile
from pathlib import Path
from typing import Any, Optional, Union

from src import __version__
from src.harness import CheckReport

logger = logging.getLogger(__name__)

PARAM_KEYS = ("q", "p", "e", "modulus", "sextic_modulus", "seed", "samples")
REQUIRED_KEYS = ("tool_version", "suite", "params", "checks", "pass")


def report_to_dict(report: CheckReport) -> dict[str, Any]:
    params = {key: report.parameters[key] for key in PARAM_KEYS if key in report.parameters}
    return {
        "tool_version": __version__,
        "suite": report.name,
        "params": params,
        "checks": [c.to_dict() for c in sorted(report.checks, key=lambda c: c.name)],
        "pass": report.passed,
    }


def dumps(data: dict[str, Any]) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _strip_timing(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _strip_timing(v) for k, v in value.items() if k != "timing_ms"}
    if isinstance(value, list):
        return [_strip_timing(v) for v in value]
    return value


def report_digest(data: Union[CheckReport, dict[str, Any]]) -> str:
    """SHA-256 of the serialized report with every timing_ms field removed."""
    if isinstance(data, CheckReport):
        data = report_to_dict(data)
    return hashlib.sha256(dumps(_strip_timing(data)).encode("utf-8")).hexdigest()


class ReportWriter:
    """
    Writes and reads suite reports under one directory.

    Example:
        >>> writer = ReportWriter("reports")
        >>> path = writer.write(run_suite("spread", SuiteParams()))
    """

    def __init__(self, report_dir: Union[str, Path] = "reports"):
        self.report_dir = Path(report_dir)

    def default_path(self, report: CheckReport) -> Path:
        q = report.parameters.get("q", "x")
        seed = report.parameters.get("seed", 0)
        return self.report_dir / f"{report.name}-q{q}-seed{seed}.json"

    def write(self, report: CheckReport, path: Optional[Union[str, Path]] = None) -> Path:
        """
        Write `report` atomically and return the path written.

        Raises:
            OSError: the file could not be written (logged, then re-raised)
        """
        target = Path(path) if path is not None else self.default_path(report)
        text = dumps(report_to_dict(report))
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            with tempfile.NamedTemporaryFile(
                mode="w",
                encoding="utf-8",
                dir=target.parent,
                delete=False,
                suffix=".json",
            ) as tmp_file:
                tmp_file.write(text)
                tmp_path = Path(tmp_file.name)

            shutil.move(str(tmp_path), str(target))
            logger.info(f"Wrote report to {target}")
            return target

        except Exception as e:
            logger.error(f"Failed to write report {target}: {e}")
            raise

    def load(self, path: Union[str, Path]) -> Optional[dict[str, Any]]:
        """
        Load one saved report.

        Returns:
            The report dict, or None when the file is missing or malformed.
        """
        path = Path(path)
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except FileNotFoundError:
            logger.warning(f"Report file not found: {path}")
            return None
        except json.JSONDecodeError as e:
            logger.warning(f"Malformed report {path}: {e}, skipping")
            return None

        if not isinstance(data, dict):
            logger.warning(f"Report {path} is not a JSON object, skipping")
            return None
        missing = [key for key in REQUIRED_KEYS if key not in data]
        if missing:
            logger.warning(f"Report {path} is missing {', '.join(missing)}, skipping")
            return None
        if not isinstance(data["checks"], list) or not isinstance(data["pass"], bool):
            logger.warning(f"Report {path} has invalid checks or pass fields, skipping")
            return None
        return data

    def load_all(self) -> list[dict[str, Any]]:
        """Every valid report in report_dir, sorted by file name."""
        if not self.report_dir.exists():
            return []
        reports = []
        for path in sorted(self.report_dir.glob("*.json")):
            data = self.load(path)
            if data is not None:
                reports.append(data)
        return reports
