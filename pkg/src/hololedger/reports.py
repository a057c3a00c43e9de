from __future__ import annotations

import html
import json
from collections.abc import Mapping
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np

REPORT_SCHEMA_VERSION = 1
REPORT_FILENAME = "report.json"
METADATA_FILENAME = "metadata.json"


def _plain(value: Any) -> Any:
    """Convert numpy scalars and arrays so json.dumps accepts them."""
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return value.item()
    return value


@dataclass
class Report:
    """Result of one experiment run.

    Everything in `results` is deterministic for a fixed config and seed; the
    wall-clock timestamp only goes to metadata.json.
    """

    experiment: str
    results: dict[str, Any]
    config: dict[str, Any] = field(default_factory=dict)
    seed: int | None = None
    artifacts: list[str] = field(default_factory=list)
    schema_version: int = REPORT_SCHEMA_VERSION

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": self.schema_version,
            "experiment": self.experiment,
            "seed": self.seed,
            "config": _plain(self.config),
            "results": _plain(self.results),
            "artifacts": sorted(self.artifacts),
        }

    def json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True, allow_nan=True)

    def metadata(self, version: str) -> dict[str, Any]:
        return {
            "experiment": self.experiment,
            "seed": self.seed,
            "package_version": version,
            "created_at": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        }

    def save(self, out_dir: str | Path) -> Path:
        from . import __version__

        target = Path(out_dir)
        target.mkdir(parents=True, exist_ok=True)
        report_path = target / REPORT_FILENAME
        report_path.write_text(self.json() + "\n", encoding="utf-8")
        (target / METADATA_FILENAME).write_text(
            json.dumps(self.metadata(__version__), indent=2) + "\n", encoding="utf-8"
        )
        return report_path

    def __repr__(self) -> str:  # pragma: no cover - convenience
        return f"Report(experiment={self.experiment!r}, keys={sorted(self.results)})"

    def _repr_html_(self) -> str:
        rows = []
        for key, value in sorted(_plain(self.results).items()):
            shown = value if not isinstance(value, (dict, list)) else json.dumps(value)
            rows.append(
                f"<tr><td>{html.escape(key)}</td><td>{html.escape(str(shown))}</td></tr>"
            )
        return (
            f"<div><b>{html.escape(self.experiment)}</b></div>"
            "<table><thead><tr><th>result</th><th>value</th></tr></thead>"
            f"<tbody>{''.join(rows)}</tbody></table>"
        )
