"""CLI contract: records, exit codes, formats, and byte-for-byte reproducibility."""

import io
import json
from contextlib import redirect_stderr, redirect_stdout
from importlib import resources

from godelsim import cli


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = cli.main(list(argv))
    return code, out.getvalue(), err.getvalue()


def records_of(payload):
    return [json.loads(line) for line in payload.splitlines()]


def corpus_path(name):
    return str(resources.files("godelsim").joinpath(f"data/corpus/{name}"))


def test_run_halting_machine_exit_zero():
    code, out, err = invoke("run", corpus_path("bb2.tm"))
    assert code == 0
    outcome = records_of(out)[-1]
    assert outcome["kind"] == "halted" and outcome["steps"] == 6 and outcome["ones"] == 4
    manifest = json.loads(err)
    assert manifest["record"] == "manifest"
    assert manifest["tool_version"].startswith("godelsim ")


def test_run_looping_machine_exit_two():
    code, out, _ = invoke("run", corpus_path("pingpong.tm"))
    assert code == 2
    assert records_of(out)[-1]["kind"] == "loop-detected"


def test_run_diverging_machine_exit_three():
    code, out, _ = invoke("run", corpus_path("grow_right.tm"), "--budget", "50")
    assert code == 3
    assert records_of(out)[-1] == {"record": "outcome", "kind": "budget-exceeded", "budget": 50}


def test_run_trace_lists_canonical_configurations():
    code, out, _ = invoke("run", corpus_path("write3.tm"), "--trace")
    assert code == 0
    visits = [r for r in records_of(out) if r["record"] == "visit"]
    assert [v["step"] for v in visits] == [0, 1, 2, 3]
    assert visits[-1]["tape"] == "0:1 1:1 2:1"


def test_run_parse_error_reports_location(tmp_path):
    bad = tmp_path / "bad.tm"
    bad.write_text("states: q0\nalphabet: _\nstart: q0\nq0 _ -> zz _ R\n", "utf-8")
    code, out, err = invoke("run", str(bad))
    assert code == 1
    assert out == ""
    assert "line 4" in err and "column 9" in err


def test_beta_encode_record_matches_library():
    from godelsim.beta import beta_encode

    code, out, _ = invoke("beta", "encode", "3,1,4")
    assert code == 0
    pair = beta_encode([3, 1, 4])
    assert records_of(out) == [{"record": "pair", "b": pair.b, "c": pair.c}]


def test_beta_matches_emits_three_records():
    code, out, _ = invoke("beta", "matches", "0", "--bound", "2")
    assert code == 0
    assert len(records_of(out)) == 3


def test_beta_eval_and_predict_and_superpose():
    code, out, _ = invoke("beta", "eval", "7,1", "0")
    assert code == 0 and records_of(out) == [{"record": "value", "i": 0, "value": 1}]

    code, out, _ = invoke("beta", "predict", "0", "--bound", "2")
    assert code == 0
    rows = records_of(out)
    assert {(r["value"], r["count"]) for r in rows} == {(0, 2), (2, 1)}
    assert all(r["total"] == 3 for r in rows)

    code, out, _ = invoke("beta", "superpose", "0:1,2:3", "1:7")
    assert code == 0
    assert [(r["tag"], r["value"]) for r in records_of(out)] == [(0, 1), (1, 7), (2, 3)]

    code, _, err = invoke("beta", "superpose", "0:1", "0:2")
    assert code == 1 and "tags occur in both" in err
    # error paths still emit exactly one manifest record
    manifests = [l for l in err.splitlines() if '"record": "manifest"' in l]
    assert len(manifests) == 1


def test_universe_sim_record_counts_on_shipped_config():
    code, out, _ = invoke("universe", "sim", "--config", "uniform_pair", "--steps", "5")
    assert code == 0
    rows = records_of(out)
    signatures = [r for r in rows if r["record"] == "signature"]
    reports = [r for r in rows if r["record"] == "report"]
    assert len(signatures) == 10 and len(reports) == 1
    assert reports[0]["classification"] == "pre-destined"
    assert reports[0]["predictable"] and reports[0]["random"]


def test_collapse_demo_before_after_table():
    code, out, _ = invoke(
        "collapse", "demo", "--pred", "parity", "--k", "3", "--measure", "7", "--eval", "0..10"
    )
    assert code == 0
    rows = records_of(out)
    evals = [r for r in rows if r["record"] == "eval"]
    assert len(evals) == 11
    assert [r["before"] for r in evals[:4]] == [0, 1, 0, "loop"]
    assert [r["after"] for r in evals[:9]] == [0, 1, 0, 1, 0, 1, 0, 1, "loop"]
    assert rows[-1] == {"record": "horizons", "before": 3, "after": 8, "history": "3 8"}


def test_dovetail_cli_trace_and_outcome():
    code, out, _ = invoke(
        "dovetail",
        corpus_path("halt0.tm") + "=zero-of",
        corpus_path("pingpong.tm") + "=zero-of",
        "--sub-budget", "8",
        "--global-budget", "100",
    )
    assert code == 0
    rows = records_of(out)
    assert rows[-1]["kind"] == "first-success"
    assert rows[-1]["task"] == 0 and rows[-1]["trial"] == 0
    assert rows[0]["record"] == "event"


def test_missing_machine_file_is_a_clean_error(tmp_path):
    code, out, err = invoke("run", str(tmp_path / "ghost.tm"))
    assert code == 1 and out == ""
    assert "cannot read" in err


def test_corpus_verify_passes():
    code, out, _ = invoke("corpus", "verify")
    assert code == 0
    rows = records_of(out)
    assert rows[-1]["failed"] == 0


def test_csv_format_has_header_and_rows():
    code, out, _ = invoke("--format", "csv", "beta", "matches", "0", "--bound", "2")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "b,c,record"
    assert len(lines) == 4


def test_gu_format_env_default(monkeypatch):
    monkeypatch.setenv("GU_FORMAT", "csv")
    code, out, _ = invoke("beta", "encode", "0")
    assert code == 0
    assert out.splitlines()[0] == "b,c,record"


def test_repeated_invocations_are_byte_identical():
    first = invoke("universe", "sim", "--config", "mixed")
    second = invoke("universe", "sim", "--config", "mixed")
    assert first == second
    third = invoke("corpus", "verify")
    fourth = invoke("corpus", "verify")
    assert third == fourth


def test_exit_code_contract_on_full_corpus():
    from godelsim.corpus import ExpectDiverge, ExpectHalt, ExpectLoop, load_manifest

    expected_exit = {ExpectHalt: 0, ExpectLoop: 2, ExpectDiverge: 3}
    for entry in load_manifest():
        code, out, err = invoke(
            "run", corpus_path(entry.name), "--budget", str(entry.budget)
        )
        assert code == expected_exit[type(entry.expected)], entry.name
        outcome = records_of(out)[-1]
        if isinstance(entry.expected, ExpectHalt):
            # step counts come from the manifest, which plain simulation built
            assert outcome["steps"] == entry.expected.steps, entry.name
            assert outcome["ones"] == entry.expected.ones, entry.name
        elif isinstance(entry.expected, ExpectLoop):
            assert outcome["first_repeat_step"] == entry.expected.first_repeat_step
            assert outcome["period"] == entry.expected.period
        manifests = [l for l in err.splitlines() if '"record": "manifest"' in l]
        assert len(manifests) == 1, entry.name


def test_bad_inputs_are_clean_errors(tmp_path):
    assert invoke("beta", "eval", "7", "0")[0] == 1
    assert invoke("collapse", "demo", "--k", "2", "--eval", "abc")[0] == 1
    code, _, err = invoke("run", corpus_path("bb2.tm"), "--input", "unary:-1")
    assert code == 1 and "bad input spec" in err


def test_property_named_like_a_fixed_column_is_prefixed(tmp_path):
    config = tmp_path / "clash.json"
    config.write_text(
        '{"properties": ["t"], "particles": '
        '[{"id": 1, "providers": {"t": "uniform:constant,value=9"}}], "steps": 2}',
        encoding="utf-8",
    )
    code, out, _ = invoke("universe", "sim", "--config", str(config))
    assert code == 0
    rows = records_of(out)
    assert rows[0]["prop_t"] == 9 and rows[0]["t"] == 0
