import hashlib
import json

import numpy as np

from opcalc.report import Report, default_report_path, file_md5, now_iso, table_payload
from opcalc.verdicts import BracketTable


def test_file_md5(tmp_path):
    path = tmp_path / "a.json"
    path.write_bytes(b"{}" * 50000)
    assert file_md5(str(path)) == hashlib.md5(b"{}" * 50000).hexdigest()
    assert file_md5(str(tmp_path / "missing.json")) is None


def test_unknown_timezone_falls_back_to_utc():
    assert now_iso("Nowhere/Special").endswith("+00:00")


def test_table_payload_truncation():
    table = BracketTable("t", "[x,y]", 0, "M-degree", dims={0: 1, 5: 1, 10: 1})
    table.set(0, 0, np.ones((1, 1, 1), dtype=object))
    table.set(5, 5, np.ones((1, 1, 1), dtype=object))
    data = table_payload(table, max_degree=2)
    assert list(data["entries"]) == ["0,0"]
    assert data["entries_truncated_at"] == 2
    assert "entries" not in table_payload(table, include_entries=False)
    assert "entries_truncated_at" not in table_payload(table)


def test_summary_counts():
    report = Report("homology", [])
    report.add_section("a", {"passed": True}, 0.5)
    report.add_section("b", {"passed": False})
    report.add_section("c", {"passed": False, "refused": True})
    report.add_section("d", {})
    summary = report.summarize(1)
    assert summary == {"sections": 4, "passed": 2, "failed": 1, "refused": 1,
                       "failing": ["b"], "exit_code": 1}
    assert report.state["timing"]["seconds"] == {"a": 0.5}


def test_deterministic_view_and_save(tmp_path):
    report = Report("check-operad", [], {"n_max": 2})
    view = report.deterministic_view()
    assert "timing" not in view
    assert view["options"] == {"n_max": 2}
    path = report.save(str(tmp_path / "out" / "r.json"))
    with open(path, encoding="utf-8") as f:
        assert json.load(f)["command"] == "check-operad"


def test_default_report_path():
    assert default_report_path(None, "report-all", ["x/q.json", "y/qxq.json"]) == "reports/report-all_q_qxq.json"
