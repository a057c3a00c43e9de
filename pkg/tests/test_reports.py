"""Tests for hololedger.reports module."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


class TestReport:
    """Tests for the Report container."""

    def test_numpy_values_become_plain(self) -> None:
        from hololedger.reports import Report

        report = Report(
            "wick",
            {"max": np.float64(1.5e-13), "counts": np.arange(3), "nested": {"n": np.int64(4)}},
        )
        data = json.loads(report.json())
        assert data["results"] == {"max": 1.5e-13, "counts": [0, 1, 2], "nested": {"n": 4}}
        assert data["schema_version"] == 1
        assert data["experiment"] == "wick"

    def test_json_is_key_sorted(self) -> None:
        from hololedger.reports import Report

        text = Report("mera", {"b": 1, "a": 2}, seed=3).json()
        assert text.index('"a"') < text.index('"b"')

    def test_artifacts_are_sorted(self) -> None:
        from hololedger.reports import Report

        report = Report("paths", {}, artifacts=["path.csv", "endpoints.svg"])
        assert report.to_dict()["artifacts"] == ["endpoints.svg", "path.csv"]

    def test_save_writes_report_and_metadata(self, tmp_path: Path) -> None:
        from hololedger import __version__
        from hololedger.reports import Report

        report = Report("evolve", {"t_final": 1.0}, {"n_steps": 1000}, seed=None)
        path = report.save(tmp_path / "out")
        assert path.name == "report.json"
        assert json.loads(path.read_text(encoding="utf-8"))["config"] == {"n_steps": 1000}
        meta = json.loads((tmp_path / "out" / "metadata.json").read_text(encoding="utf-8"))
        assert meta["package_version"] == __version__
        assert "created_at" in meta
        assert "created_at" not in path.read_text(encoding="utf-8")

    def test_html(self) -> None:
        from hololedger.reports import Report

        html = Report("ledger", {"pattern": "UNR", "ledger": {"records": []}})._repr_html_()
        assert "<table>" in html
        assert "UNR" in html
