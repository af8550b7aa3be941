import json
from pathlib import Path

import pytest

from optlab import cli
from optlab import report as rp
from optlab.cache import CacheError, ReportCache, cache_key
from optlab.serialize import dump_theory
from optlab.zoo import get_theory

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    try:
        code = cli.main(list(argv))
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def counted(monkeypatch):
    """Count how often the checkers actually run behind the CLI."""
    calls = []
    real = cli.check_report

    def spy(*a, **k):
        calls.append(a[1])
        return real(*a, **k)

    monkeypatch.setattr(cli, "check_report", spy)
    return calls


# -- check -----------------------------------------------------------------------


@pytest.mark.parametrize(
    "theory,prop,golden",
    [("quantum2", "niwd", "quantum2_niwd.json"), ("classical3", "structure", "classical3_structure.json")],
)
def test_check_json_matches_golden(capsys, theory, prop, golden):
    code, out, _ = run(capsys, "check", theory, "-p", prop, "--json", "--no-cache")
    assert code == 0
    assert out == (GOLDEN / golden).read_text(encoding="utf-8")


def test_quantum_niwd_is_true(capsys):
    code, out, _ = run(capsys, "check", "quantum2", "-p", "niwd", "--json", "--expect", "true")
    doc = json.loads(out)
    assert code == 0
    assert doc["schema"] == "optlab-report/1" and doc["summary"] is True
    assert doc["timing"] is None


def test_classical_structure_has_three_blocks(capsys):
    code, out, _ = run(capsys, "check", "classical3", "-p", "structure", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["summary"] == 3
    cert = doc["verdicts"][0]["certificate"]
    assert cert["sum_is_identity"] and cert["idempotent"]


def test_min_tensor_purification_names_the_center_state(capsys):
    code, out, _ = run(capsys, "check", "prbox-min", "-p", "purification")
    assert code == 0
    assert "summary: **✗**" in out
    assert "no purification on S: center state (1, 0, 0)" in out


def test_property_false_is_not_an_error(capsys):
    code, out, _ = run(capsys, "check", "classical2", "-p", "niwd")
    assert code == 0


def test_expectation_mismatch_exits_two(capsys):
    code, _, err = run(capsys, "check", "classical2", "-p", "niwd", "--expect", "true")
    assert code == 2
    assert "expectation mismatch" in err


def test_numeric_expectation(capsys):
    assert run(capsys, "check", "fermionic2", "-p", "local-disc", "--expect", "2")[0] == 0
    assert run(capsys, "check", "fermionic2", "-p", "local-disc", "--expect", "1")[0] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ("check", "quantum7", "-p", "niwd"),
        ("check", "quantum2", "-p", "telepathy"),
        ("check", "quantum2"),
        ("check", "quantum2", "-p", "niwd", "--scenario", "fermi_local.opt"),
        ("frobnicate",),
    ],
)
def test_usage_errors_exit_one(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert "error" in err


def test_json_is_byte_identical_across_runs(capsys):
    first = run(capsys, "check", "realquantum2", "-p", "local-disc", "--json", "--no-cache")[1]
    second = run(capsys, "check", "realquantum2", "-p", "local-disc", "--json", "--no-cache")[1]
    assert first == second


def test_verify_replays_certificates(capsys):
    code, _, err = run(capsys, "check", "classical3", "-p", "structure", "--verify")
    assert code == 0
    assert "reproduced=true" in err and "failed=0" in err


def test_verify_of_a_failing_purification(capsys):
    code, _, err = run(capsys, "check", "classical2", "-p", "purification", "--verify", "--expect", "false")
    assert code == 0
    assert "failed=0" in err


def test_timing_is_recorded_on_request(capsys, counted):
    out = run(capsys, "check", "classical2", "-p", "classicality", "--json", "--timing")[1]
    assert json.loads(out)["timing"]["seconds"] >= 0
    run(capsys, "check", "classical2", "-p", "classicality", "--json", "--timing")
    assert len(counted) == 2


def test_niwd_upon_scenario(capsys):
    code, out, _ = run(capsys, "check", "fermionic3", "-p", "niwd-upon", "--scenario", "fermi_local.opt",
                       "--json", "--expect", "false")
    assert code == 0
    doc = json.loads(out)
    assert doc["command"]["scenario"] is not None


# -- cache ------------------------------------------------------------------------


def test_cache_store_then_load_is_byte_identical(tmp_path):
    cache = ReportCache(tmp_path / "c")
    key = cache_key("abc", "niwd", {"system": None})
    text = rp.render_json({"theory": {"hash": "abc"}, "summary": True})
    cache.store(key, text)
    assert cache.load(key, "abc") == text
    assert cache.load(key, "something else") is None
    assert cache.load(cache_key("abc", "fiwd", {}), "abc") is None


def test_cache_key_depends_on_options():
    assert cache_key("h", "niwd", {"a": 1}) != cache_key("h", "niwd", {"a": 2})
    assert cache_key("h", "niwd", {"a": 1, "b": 2}) == cache_key("h", "niwd", {"b": 2, "a": 1})


def test_cache_io_errors_surface(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    cache = ReportCache(blocker / "sub")
    with pytest.raises(CacheError):
        cache.store("k", "{}")


def test_cli_cache_hit_and_no_cache(capsys, counted):
    argv = ("check", "classical2", "-p", "classicality", "--json")
    first = run(capsys, *argv)[1]
    second = run(capsys, *argv)[1]
    assert first == second
    assert counted == ["classicality"]
    run(capsys, *argv, "--no-cache")
    assert len(counted) == 2


def test_edited_theory_file_misses_the_cache(capsys, counted, tmp_path):
    path = tmp_path / "theory.json"
    path.write_text(dump_theory(get_theory("classical2")), encoding="utf-8")
    argv = ("check", str(path), "-p", "classicality", "--json")
    run(capsys, *argv)
    run(capsys, *argv)
    assert len(counted) == 1
    # same content, different bytes: a different hash
    path.write_text(path.read_text(encoding="utf-8") + "\n", encoding="utf-8")
    code = run(capsys, *argv)[0]
    assert code == 0
    assert len(counted) == 2


def test_cache_directory_from_environment(capsys, tmp_path, monkeypatch):
    target = tmp_path / "elsewhere"
    monkeypatch.setenv("OPTLAB_CACHE_DIR", str(target))
    run(capsys, "check", "classical2", "-p", "fiwd")
    assert list(target.iterdir())


# -- run ---------------------------------------------------------------------------


def test_run_fermionic_parity(capsys):
    code, out, _ = run(capsys, "run", "fermi_parity.opt")
    assert code == 0
    assert out.strip() == "e: 1/2, o: 1/2"


def test_run_bell_table(capsys):
    code, out, _ = run(capsys, "run", "bell.opt", "--circuit", "zz")
    assert code == 0
    assert out.strip() == "0 0: 1/2, 0 1: 0, 1 0: 0, 1 1: 1/2"


def test_run_marginal_and_decimals(capsys):
    code, out, _ = run(capsys, "run", "fermi_disturbance.opt", "--circuit", "disturbed",
                       "--marginalize", "detect", "--decimals", "3")
    assert code == 0
    assert out.strip() == "yes: 1/2 (~0.500), no: 1/2 (~0.500)"


def test_run_json(capsys):
    code, out, _ = run(capsys, "run", "classical_readout.opt", "--json")
    doc = json.loads(out)
    assert code == 0
    assert doc["main"]["variables"] == ["readout", "coarse"]


def test_run_reports_spans(capsys, tmp_path):
    bad = tmp_path / "bad.opt"
    bad.write_text("theory quantum2\n\nprep p Q = ket0\n", encoding="utf-8")
    code, _, err = run(capsys, "run", str(bad))
    assert code == 1
    assert f"{bad}:3:8: syntax error" in err
    assert "^" in err


def test_run_unknown_marginal(capsys):
    code, _, err = run(capsys, "run", "fermi_parity.opt", "--marginalize", "nope")
    assert code == 1 and "nope" in err


# -- classify and export ------------------------------------------------------------


def test_classify_subset_json(capsys, tmp_path):
    out_file = tmp_path / "table.json"
    code, out, _ = run(capsys, "classify", "classical2", "quantum2", "--json", "--json-out", str(out_file))
    assert code == 0
    doc = json.loads(out)
    assert json.loads(out_file.read_text(encoding="utf-8")) == doc
    rows = {r["label"]: r for r in doc["rows"]}
    assert rows["CT"]["niwd"] is False and rows["CT"]["all_systems_classical"] is True
    assert rows["QT"]["niwd"] is True and rows["QT"]["local_discriminability"] == 1


def test_export_then_check(capsys, tmp_path):
    path = tmp_path / "fermi.json"
    assert run(capsys, "export-theory", "fermionic2", "-o", str(path))[0] == 0
    code, out, _ = run(capsys, "check", str(path), "-p", "local-disc", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["summary"] == 2
    assert doc["theory"]["source"] == path.name
