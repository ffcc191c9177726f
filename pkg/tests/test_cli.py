import json

import pytest

from main import EXIT_FAILED, EXIT_INPUT, parse_arguments, run_cli
from opcalc.exceptions import InputError, NotAComplex, NotQuasiIso
from opcalc.runner import JobConfig, compare_runs, execute, exit_code_for

from conftest import corpus_path


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("OPCALC_THREADS", raising=False)
    return tmp_path


def cli(workdir, *argv):
    config = str(workdir / "absent.ini")
    return run_cli(["-c", config, "--no-progress", *argv])


def load(path):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def test_job_config_validation():
    ok = JobConfig("homology", ["a.json"], n_max=2)
    assert ok.validate() is ok
    bad = [
        JobConfig("homology", ["a.json"], n_max=1),
        JobConfig("homology", ["a.json", "b.json"]),
        JobConfig("homology", []),
        JobConfig("homology", ["a.json"], field="F4"),
        JobConfig("identities", ["a.json"], suite="everything"),
        JobConfig("bracket", ["a.json"], which="lie"),
        JobConfig("transform", ["a.json"]),
    ]
    for job in bad:
        with pytest.raises(InputError):
            job.validate()
    assert JobConfig("report-all", ["a.json", "b.json"]).validate()
    assert ok.with_changes(n_max=4).n_max == 4
    assert "out" not in ok.options()


def test_execute_keeps_plan_order_and_classifies_errors():
    def refuse():
        raise NotQuasiIso("no duality", degree=1)

    def broken():
        raise NotAComplex("d^2 != 0", degree=3)

    jobs = [("first", lambda: {"passed": True}), ("refused", refuse), ("broken", broken)]
    results = execute(jobs, threads=2, progress=False)
    assert [name for name, _ in results] == ["first", "refused", "broken"]
    outcome = dict((name, payload) for name, (payload, _) in results)
    assert outcome["refused"]["refused"] is True
    assert outcome["refused"]["error"] == "NotQuasiIso"
    assert outcome["refused"]["degree"] == 1
    assert outcome["broken"]["refused"] is False
    assert outcome["broken"]["passed"] is False

    assert exit_code_for(results[:1], refusals_fail=True) == 0
    assert exit_code_for(results[:2], refusals_fail=True) == 1
    assert exit_code_for(results[:2], refusals_fail=False) == 0
    assert exit_code_for(results, refusals_fail=False) == 1

    def bad_input():
        raise InputError("bad file")

    with pytest.raises(InputError):
        execute([("input", bad_input)], progress=False)


def test_compare_runs():
    narrow = [("h", ({"passed": True, "homology": {"degrees": [{"degree": 0, "dim": 2, "trusted": True},
                                                                {"degree": -3, "dim": 1, "trusted": False}]}}, 0))]
    wide = [("h", ({"passed": True, "homology": {"degrees": [{"degree": 0, "dim": 2, "trusted": True},
                                                              {"degree": -3, "dim": 2, "trusted": True}]}}, 0))]
    assert compare_runs("same", narrow, wide).passed
    changed = [("h", ({"passed": False, "homology": {"degrees": [{"degree": 0, "dim": 1, "trusted": True}]}}, 0))]
    report = compare_runs("changed", narrow, changed)
    assert not report.passed
    assert {r.relation for r in report.failures} == {"verdict", "trusted dim"}


def test_bracket_requires_which():
    with pytest.raises(SystemExit):
        parse_arguments(["bracket", "q.json"])


def test_check_operad(workdir):
    out = workdir / "operad.json"
    assert cli(workdir, "check-operad", corpus_path("dualnumbers"), "--nmax", "2", "-o", str(out)) == 0
    report = load(out)
    assert report["summary"]["failed"] == 0
    assert "cyclic operad" in report["sections"]
    assert report["inputs"][0]["path"] == "dualnumbers.json"


def test_homology_report(workdir):
    out = workdir / "h.json"
    assert cli(workdir, "homology", corpus_path("q"), "--nmax", "2", "--variant", "negative", "-o", str(out)) == 0
    sections = load(out)["sections"]
    assert sections["hochschild"]["HH"] == {"0": 1, "1": 0, "2": 0}
    degrees = {e["degree"]: e["dim"] for e in sections["homology negative"]["homology"]["degrees"]}
    assert degrees[0] == 1 and degrees[-2] == 1 and degrees[2] == 0


def test_default_output_path(workdir):
    assert cli(workdir, "homology", corpus_path("qxq"), "--nmax", "2") == 0
    assert (workdir / "reports" / "homology_qxq.json").exists()


def test_reports_are_deterministic(workdir):
    first, second = workdir / "one.json", workdir / "two.json"
    for out in (first, second):
        assert cli(workdir, "homology", corpus_path("dualnumbers"), "--nmax", "2", "-o", str(out)) == 0
    a, b = load(first), load(second)
    a.pop("timing")
    b.pop("timing")
    assert a == b


def test_malformed_input_exits_with_input_error(workdir):
    path = workdir / "broken.json"
    path.write_text('{"basis": ["1"],', encoding="utf-8")
    assert cli(workdir, "check-operad", str(path)) == EXIT_INPUT
    assert cli(workdir, "check-operad", str(workdir / "missing.json")) == EXIT_INPUT
    assert cli(workdir, "homology", corpus_path("q"), "--field", "F9") == EXIT_INPUT


def test_bad_configuration(workdir):
    path = workdir / "bad.ini"
    path.write_text("threads = 3\n", encoding="utf-8")
    assert run_cli(["-c", str(path), "homology", corpus_path("q")]) == EXIT_INPUT


def test_refused_bracket(workdir):
    out = workdir / "thmA.json"
    code = cli(workdir, "bracket", corpus_path("dualnumbers"), "--nmax", "2", "--which", "thmA", "-o", str(out))
    assert code == EXIT_FAILED
    report = load(out)
    duality = report["sections"]["duality chains"]
    assert duality["refused"] is True
    assert duality["error"] == "NotQuasiIso"
    assert report["summary"]["refused"] == 2
    assert report["summary"]["exit_code"] == EXIT_FAILED
