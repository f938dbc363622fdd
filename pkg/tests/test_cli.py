import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from spinsqueeze.cli import ConfigError, emit_report, main, parse_grid, validate_config
from spinsqueeze.tables import read_table


def run(args, tmp_path, name="out.csv"):
    out = tmp_path / name
    return main(args + ["-o", str(out)]), out


def error_record(capsys):
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_parse_grid():
    assert parse_grid("lin:0:1:3") == [0.0, 0.5, 1.0]
    assert parse_grid("log:1e-2:1:3") == pytest.approx([0.01, 0.1, 1.0])
    assert parse_grid("1,2.5") == [1.0, 2.5]
    with pytest.raises(ValueError):
        parse_grid("log:0:1:3")


def test_sweep_writes_header_and_rows(tmp_path):
    code, out = run(["sweep", "-d", "2", "-L", "16", "--omega-grid", "log:1e-2:1:3"], tmp_path)
    assert code == 0
    rows, header = read_table(out)
    assert [r["omega"] for r in rows] == pytest.approx([0.01, 0.1, 1.0])
    assert header["tool"].startswith("spinsqueeze")
    assert header["config"]["method"] == "lsw"
    assert header["meta"] == {"d": 2, "L": 16, "delta": 1.0}


def test_json_mirror_matches_csv(tmp_path):
    args = ["sweep", "--method", "ed", "-d", "1", "-L", "6", "--omega-grid", "0.5,2"]
    run(args, tmp_path, "a.csv")
    main(args + ["--format", "json", "-o", str(tmp_path / "a.json")])
    assert read_table(tmp_path / "a.csv")[0] == read_table(tmp_path / "a.json")[0]


@pytest.mark.parametrize("args,needle", [
    (["sweep", "--omega", "0"], "gapless"),
    (["sweep", "--method", "ed", "-d", "1", "-L", "8", "--omega", "0"], "undefined"),
    (["thermal", "-d", "1", "-L", "13", "--omega", "1", "--temperatures", "0.1,1"], "N <= 12"),
    (["ramp", "--method", "ed-ramp", "-d", "1", "-L", "17", "--omega-f", "1", "--tau", "1"], "N <= 16"),
    (["sweep", "--method", "ed", "-d", "1", "-L", "21", "--omega", "1"], "N <= 20"),
    (["compare", "--methods", "lsw,ed", "--column", "gap", "-d", "1", "-L", "25", "--omega", "1"],
     "N <= 24"),
    (["compare", "--methods", "lsw,tlsw", "--column", "gap", "--omega", "1"], "cannot compare"),
    (["ramp", "--omega-i", "1", "--omega-f", "2", "--tau", "5"], "omega_i > omega_f"),
    (["entropy", "--input", "x.csv", "--anchor", "ln2-at-infinity"], "unsupported"),
])
def test_invalid_configs_exit_2(args, needle, tmp_path, capsys):
    code, out = run(args, tmp_path)
    assert code == 2
    rec = error_record(capsys)
    assert rec["kind"] == "config" and rec["exit_code"] == 2
    assert any(needle in v for v in rec["violations"])
    assert not out.exists()


def test_violations_are_aggregated():
    with pytest.raises(ConfigError) as info:
        validate_config({"command": "sweep", "output": "x", "d": 5, "delta": 3.0, "L": 1})
    assert len(info.value.violations) >= 3


def test_numerical_failure_exits_3(tmp_path, capsys):
    code, _ = run(["ramp", "-d", "1", "-L", "8", "--method", "ed-ramp", "--omega-f", "1",
                   "--tau", "5", "--dt", "0.2"], tmp_path)
    assert code == 3
    assert error_record(capsys)["message"].startswith("NormDriftError")


@given(st.sampled_from(["sweep", "thermal", "ramp"]), st.integers(1, 3), st.floats(-0.9, 1.0),
       st.floats(0.01, 10.0))
def test_config_round_trip(command, d, delta, omega):
    raw = {"command": command, "output": "o.csv", "d": d, "L": 2, "delta": delta}
    if command == "ramp":
        raw.update(omega_i=omega + 1.0, omega_f=omega, tau=5.0)
    else:
        raw.update(omega=omega, temperatures="0.5,1")
    cfg = validate_config(raw)
    assert validate_config(json.loads(json.dumps(cfg.to_dict()))) == cfg


def test_replay_reproduces_bytes(tmp_path):
    _, out = run(["thermal", "-d", "1", "-L", "6", "--omega", "1", "--temperatures", "log:0.1:5:7"],
                 tmp_path)
    assert main(["replay", str(out)]) == 0  # rewrites the same path
    first = out.read_bytes()
    assert main(["replay", str(out)]) == 0
    assert out.read_bytes() == first


def test_thread_count_does_not_change_output(tmp_path, monkeypatch):
    args = ["sweep", "--method", "ed", "-d", "1", "-L", "8", "--omega-grid", "log:0.1:10:4"]
    monkeypatch.setenv("SPINSQUEEZE_THREADS", "1")
    run(args, tmp_path, "one.csv")
    monkeypatch.setenv("SPINSQUEEZE_THREADS", "3")
    run(args, tmp_path, "three.csv")
    strip = lambda p: [l for l in p.read_text().splitlines() if not l.startswith("# config")]
    assert strip(tmp_path / "one.csv") == strip(tmp_path / "three.csv")


def test_entropy_and_join_pipeline(tmp_path):
    thermal = tmp_path / "thermal.csv"
    main(["thermal", "-d", "1", "-L", "6", "--omega-grid", "0.5,1", "--temperatures",
          "log:0.05:10:80", "-o", str(thermal)])
    assert main(["entropy", "--input", str(thermal), "-o", str(tmp_path / "s.csv")]) == 0
    assert main(["join", "--input", str(thermal), "--entropy", str(tmp_path / "s.csv"),
                 "-o", str(tmp_path / "map.csv")]) == 0
    rows, header = read_table(tmp_path / "map.csv")
    exact, _ = read_table(thermal)
    assert len(rows) == 160 and header["summary"] == {"problems": []}
    assert max(abs(r["s"] - e["s_exact"]) for r, e in zip(rows, exact)) < 2e-3


def test_join_rejects_mismatched_metadata(tmp_path, capsys):
    for L in (6, 8):
        main(["thermal", "-d", "1", "-L", str(L), "--omega", "1", "--temperatures", "log:0.1:5:9",
              "-o", str(tmp_path / f"t{L}.csv")])
    code = main(["join", "--input", str(tmp_path / "t6.csv"), "--input", str(tmp_path / "t8.csv"),
                 "-o", str(tmp_path / "m.csv")])
    assert code == 2 and "mismatch" in error_record(capsys)["message"]


def test_emit_report_summary_and_fit():
    tabs = {"a": [{"omega": w, "y": 2 * w**0.5} for w in (0.01, 0.1, 1.0)],
            "b": [{"omega": w, "y": w**0.5} for w in (0.01, 0.1, 1.0)]}
    rows, columns, summary = emit_report(tabs, "y", "omega", (0.01, 1.0))
    assert columns == ["omega", "a", "b", "rel_dev"]
    assert summary["max_rel_dev"] == pytest.approx(1.0)
    assert summary["fits"]["a"]["slope"] == pytest.approx(0.5)


def test_compare_ramp_methods(tmp_path):
    code, out = run(["compare", "--methods", "tlsw,ed-ramp", "--column", "jx_per_spin", "-d", "1",
                     "-L", "6", "--omega-i", "10", "--omega-f", "2", "--tau", "5", "--samples", "6"],
                    tmp_path)
    assert code == 0
    rows, header = read_table(out)
    assert [r["t"] for r in rows] == pytest.approx([0, 1, 2, 3, 4, 5])
    assert header["summary"]["max_rel_dev"] < 0.05


def test_sweep_fit_summary(tmp_path):
    code, out = run(["sweep", "-d", "2", "-L", "100", "--omega-grid", "log:1e-4:1e-2:9",
                     "--fit-window", "1e-4:1e-2", "--column", "var_jz"], tmp_path)
    assert code == 0
    fit = read_table(out)[1]["summary"]["fits"]["L=100:var_jz"]
    assert fit["slope"] == pytest.approx(0.5, abs=0.02)


def test_compare_identical_tables_gives_zero_deviation(tmp_path):
    _, out = run(["sweep", "-d", "1", "-L", "20", "--omega-grid", "log:0.1:10:5"], tmp_path)
    code, report = run(["compare", "--input", str(out), "--input", str(out), "--column", "xi2"],
                       tmp_path, "report.csv")
    assert code == 0
    rows, header = read_table(report)
    assert header["summary"]["max_rel_dev"] == 0.0 and len(rows) == 5
    assert header["meta"]["L"] == 20


def test_ramp_ends_exactly_on_final_field(tmp_path):
    code, out = run(["ramp", "-d", "1", "-L", "6", "--omega-f", "0.1", "--tau", "2"], tmp_path)
    assert read_table(out)[0][-1]["omega"] == 0.1


def test_entropy_accepts_plain_energy_table(tmp_path):
    T = [0.1 * 1.1**i for i in range(40)]
    lines = ["# d=1,L=8,delta=1.0,omega=1.0", "T,e"] + [f"{t!r},{0.5 * t!r}" for t in T]
    src = tmp_path / "energies.csv"
    src.write_text("\n".join(lines) + "\n")
    assert main(["entropy", "--input", str(src), "-o", str(tmp_path / "s.csv")]) == 0
    rows, header = read_table(tmp_path / "s.csv")
    assert header["meta"] == {"d": 1, "L": 8, "delta": 1.0}
    assert rows[-1]["s"] == pytest.approx(0.5 * math.log(T[-1] / T[0]), rel=1e-12)
