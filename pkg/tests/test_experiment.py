import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from mcpsd import ProcessSpec
from mcpsd import experiment as ex
from mcpsd.cli import main
from mcpsd.patterns import diagnose


def small_config(**kw):
    base = dict(
        process=ex.MA_LINES, pattern={"type": "random", "seed": 0}, L=16, q=6, N=300,
        solver="LS", trials=3, seed=0, reference="true", K=16, name="small",
    )
    base.update(kw)
    return ex.ExperimentConfig(**base).validate()


# -- configuration ---------------------------------------------------------------


@pytest.mark.parametrize(
    "changes, field",
    [
        (dict(L=15), "L"),
        (dict(q=17), "q"),
        (dict(N=0), "N"),
        (dict(solver="L1"), "solver"),
        (dict(trials=0), "trials"),
        (dict(reference="psd"), "reference"),
        (dict(K=-1), "K"),
        (dict(pattern={"type": "ruler", "order": 5}), "pattern.order"),
        (dict(pattern={"type": "ruler", "order": 40}), "pattern.order"),
        (dict(pattern={"type": "explicit", "offsets": [0, 1]}), "pattern.offsets"),
        (dict(pattern={"type": "explicit", "offsets": [0, 1, 2, 3, 4, 4]}), "pattern.offsets"),
        (dict(pattern={"type": "grid"}), "pattern.type"),
    ],
)
def test_config_validation_names_field(changes, field):
    with pytest.raises(ex.ConfigError) as exc:
        small_config(**changes)
    assert exc.value.field == field


def test_ruler_must_fit_in_period():
    with pytest.raises(ex.ConfigError):
        small_config(L=16, q=7, pattern={"type": "ruler", "order": 7})


def test_config_roundtrip_and_load(tmp_path):
    cfg = ex.preset("sparse-multiband-compressive")
    d = json.loads(json.dumps(cfg.to_dict()))
    assert ex.ExperimentConfig.from_dict(d) == cfg
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(d))
    assert ex.ExperimentConfig.load(str(path)) == cfg


def test_config_errors_from_dict(tmp_path):
    d = small_config().to_dict()
    with pytest.raises(ex.ConfigError, match="missing"):
        ex.ExperimentConfig.from_dict({k: v for k, v in d.items() if k != "N"})
    with pytest.raises(ex.ConfigError, match="unknown"):
        ex.ExperimentConfig.from_dict({**d, "colour": 1})
    with pytest.raises(ex.ConfigError) as exc:
        ex.ExperimentConfig.from_dict({**d, "process": {"kind": "pink"}})
    assert exc.value.field == "process"
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ex.ConfigError):
        ex.ExperimentConfig.load(str(bad))


def test_unknown_preset():
    with pytest.raises(ex.ConfigError):
        ex.preset("nope")


def test_preset_fidelity():
    expect = {
        "ma-lines": (64, 50, 10000, "random"),
        "sparse-multiband-noncompressive": (128, 20, 1000, "random"),
        "sparse-multiband-compressive": (128, 7, 1000, "ruler"),
        "sparse-multiband-compressive-10k": (128, 7, 10000, "ruler"),
        "cognitive-radio": (64, 25, 4096, "random"),
        "cognitive-radio-fine": (128, 50, 2048, "random"),
    }
    assert set(ex.PRESETS) == set(expect)
    for name, (L, q, N, kind) in expect.items():
        cfg = ex.preset(name)
        assert (cfg.L, cfg.q, cfg.N, cfg.pattern["type"]) == (L, q, N, kind)
        assert cfg.trials == 100
    assert ex.resolve_pattern(ex.preset("sparse-multiband-compressive")).offsets == \
        (1, 3, 4, 11, 17, 22, 26)
    assert ex.preset("sparse-multiband-compressive").solver == "NNLS"
    # both cognitive-radio settings share one average rate
    for name in ("cognitive-radio", "cognitive-radio-fine"):
        cfg = ex.preset(name)
        assert cfg.q * cfg.process.W / cfg.L == pytest.approx(781.25e6)
    assert ex.MA_LINES.fir == (1, 2, 0, -2, -1)
    assert ex.MA_LINES.lines == ((2.0, 8 * np.pi / 17), (2.0, 11 * np.pi / 20))


def test_resolve_pattern_variants():
    assert ex.resolve_pattern(small_config(pattern={"type": "explicit",
                                                    "offsets": [9, 1, 2, 3, 4, 5]})).offsets == \
        (1, 2, 3, 4, 5, 9)
    p = ex.resolve_pattern(small_config())
    assert diagnose(p).full_rank
    under = small_config(q=4)  # 13 rows < 16: no redraw
    assert ex.resolve_pattern(under).q == 4


# -- running --------------------------------------------------------------------


def test_run_experiment_shapes_and_determinism():
    cfg = small_config()
    a = ex.run_experiment(cfg)
    b = ex.run_experiment(cfg, jobs=3)
    assert len(a.trials) == 3 and [t.trial for t in a.trials] == [0, 1, 2]
    for ta, tb in zip(a.trials, b.trials):
        np.testing.assert_array_equal(ta.estimate, tb.estimate)
    assert ex.estimates_csv(a) == ex.estimates_csv(b)
    assert ex.metrics_csv(a) == ex.metrics_csv(b)
    assert a.seconds >= 0 and a.tradeoff.q == 6
    assert a.mean_estimate.values.shape == (16,)
    s = a.summary()
    assert json.loads(json.dumps(s)) == s


def test_adding_trials_keeps_earlier_ones():
    a = ex.run_experiment(small_config(trials=2))
    b = ex.run_experiment(small_config(trials=4))
    for ta, tb in zip(a.trials, b.trials):
        np.testing.assert_array_equal(ta.estimate, tb.estimate)


def test_seed_changes_results():
    a = ex.run_experiment(small_config(trials=1, seed=0))
    b = ex.run_experiment(small_config(trials=1, seed=1))
    assert not np.array_equal(a.trials[0].estimate, b.trials[0].estimate)


def test_rank_deficient_summary_is_json_safe():
    cfg = small_config(q=4, solver="NNLS")
    s = ex.run_experiment(cfg).summary()
    assert s["condition_number"] is None and s["regime"] == "underdetermined"
    json.dumps(s, allow_nan=False)


def test_welch_reference_uses_acquired_window():
    cfg = small_config(reference="welch", trials=1)
    res = ex.run_experiment(cfg)
    assert res.trials[0].reference.sum() == pytest.approx(ex.MA_LINES.total_power(), rel=0.2)


def test_ma_lines_preset_converges():
    cfg = ex.preset("ma-lines").with_(trials=3)
    big = ex.run_experiment(cfg, jobs=3)
    small = ex.run_experiment(cfg.with_(N=50), jobs=3)
    assert big.mse.mean() < small.mse.mean()


# -- consistency ------------------------------------------------------------------


def test_consistency_single_point_matches_experiment():
    cfg = small_config()
    (pt,) = ex.consistency_curve(cfg, [300])
    assert pt.mean_squared_error == pytest.approx(ex.run_experiment(cfg).mse.mean())
    assert pt.N == 300


def test_consistency_requires_increasing():
    with pytest.raises(ex.ConfigError):
        ex.consistency_curve(small_config(), [500, 50])


def test_consistency_white_floor():
    cfg = small_config(process=ProcessSpec.white(), trials=5)
    pts = ex.consistency_curve(cfg, [100, 100000], jobs=5)
    assert pts[-1].mean_squared_error < pts[0].mean_squared_error
    assert pts[-1].mean_nse < 1e-3


# -- CSV --------------------------------------------------------------------------


def parse(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_csv_schemas():
    res = ex.run_experiment(small_config())
    est = parse(ex.estimates_csv(res))
    assert list(est[0]) == ["bandIndex", "m", "fLowHz", "fHighHz", "estimate", "reference"]
    assert len(est) == 16 and est[0]["m"] == "-7"
    assert float(est[7]["fLowHz"]) == pytest.approx(-1 / 32)
    met = parse(ex.metrics_csv(res))
    assert list(met[0]) == ["trial", "nse", "maxAbsError"] and len(met) == 3
    pts = ex.consistency_curve(small_config(trials=1), [200, 400])
    assert list(parse(ex.consistency_csv(pts))[0]) == ["N", "meanSquaredError", "stdSquaredError",
                                                       "meanNse"]


def test_tradeoff_table():
    rows = {int(r["L"]): r for r in parse(ex.emit_tradeoff_table(range(2, 1026, 2), 2e9, 16))}
    assert rows[400]["minQ_NC"] == "21"
    assert rows[2]["minQ_NC"] == "2"
    for L, r in rows.items():
        # q = 7 gives 43 rows >= 2s = 32; a compressive gain needs 43 < L
        if L > 43:
            assert r["minQ_C"] == "7"
            assert float(r["rateHz_C"]) == pytest.approx(7 * 2e9 / L)
        else:
            assert r["minQ_C"] == "" and r["rateHz_C"] == ""
    assert float(rows[128]["resolutionHz"]) == pytest.approx(15.625e6)
    no_s = parse(ex.emit_tradeoff_table([64], 1.0))
    assert no_s[0]["minQ_C"] == ""


# -- command line -------------------------------------------------------------------


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_cfg(tmp_path, cfg):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    return str(path)


def test_cli_estimate(tmp_path, capsys):
    code, out, err = run_cli(capsys, "estimate", "--config", write_cfg(tmp_path, small_config()))
    assert code == 0
    assert len(parse(out)) == 16
    assert json.loads(err)["trials"] == 1


def test_cli_experiment_out_dir(tmp_path, capsys):
    cfg = write_cfg(tmp_path, small_config())
    out_dir = tmp_path / "run"
    code, _, err = run_cli(capsys, "experiment", "--config", cfg, "--out", str(out_dir),
                           "--trials", "2", "--jobs", "2")
    assert code == 0
    assert len(parse((out_dir / "estimates.csv").read_text())) == 16
    assert len(parse((out_dir / "metrics.csv").read_text())) == 2
    first = (out_dir / "estimates.csv").read_text()
    run_cli(capsys, "experiment", "--config", cfg, "--out", str(out_dir), "--trials", "2")
    assert (out_dir / "estimates.csv").read_text() == first


def test_cli_seed_override(tmp_path, capsys):
    cfg = write_cfg(tmp_path, small_config())
    _, a, _ = run_cli(capsys, "estimate", "--config", cfg, "--seed", "1")
    _, b, _ = run_cli(capsys, "estimate", "--config", cfg, "--seed", "2")
    _, c, _ = run_cli(capsys, "estimate", "--config", cfg, "--seed", "1")
    assert a != b and a == c


def test_cli_consistency(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "consistency", "--config", write_cfg(tmp_path, small_config()),
                           "--n-list", "100,1000", "--trials", "2")
    assert code == 0 and [r["N"] for r in parse(out)] == ["100", "1000"]


def test_cli_tradeoff(capsys):
    code, out, _ = run_cli(capsys, "tradeoff", "--L-range", "398:404:2", "--s", "16")
    assert code == 0
    rows = parse(out)
    assert [r["L"] for r in rows] == ["398", "400", "402"]
    assert rows[1]["minQ_NC"] == "21" and rows[1]["minQ_C"] == "7"


def test_cli_pattern(capsys):
    code, out, _ = run_cli(capsys, "pattern", "ruler", "--order", "10")
    assert code == 0 and parse(out)[0]["marks"] == "1 2 7 11 24 27 35 42 54 56"
    code, out, _ = run_cli(capsys, "pattern", "ruler")
    assert len(parse(out)) == 25
    code, out, _ = run_cli(capsys, "pattern", "diagnose", "--L", "64",
                           "--offsets", "1,2,7,11,24,27,35,42,54,56")
    r = parse(out)[0]
    assert r["fullRank"] == "true" and 1.2 <= float(r["conditionNumber"]) <= 1.6
    code, out, _ = run_cli(capsys, "pattern", "random", "--L", "64", "--q", "10", "--seed", "7")
    assert parse(out)[0]["q"] == "10"
    code, out, _ = run_cli(capsys, "pattern", "sweep", "--L", "32", "--q-range", "6:9",
                           "--trials", "10")
    assert [r["q"] for r in parse(out)] == ["6", "7", "8"]


def test_cli_synth(tmp_path, capsys):
    out_file = tmp_path / "x.csv"
    code, _, _ = run_cli(capsys, "synth", "--preset", "ma-lines", "--length", "100",
                         "--out", str(out_file))
    rows = parse(out_file.read_text())
    assert code == 0 and len(rows) == 100 and list(rows[0]) == ["index", "value"]


def test_cli_exit_codes(tmp_path, capsys):
    code, _, err = run_cli(capsys, "estimate")
    assert code == 1 and "error" in err
    code, _, _ = run_cli(capsys, "estimate", "--preset", "nope")
    assert code == 1
    code, _, _ = run_cli(capsys, "estimate", "--config", str(tmp_path / "missing.json"))
    assert code == 1
    code, _, _ = run_cli(capsys, "pattern", "random", "--L", "64")
    assert code == 1
    code, _, _ = run_cli(capsys, "pattern", "diagnose", "--L", "7", "--offsets", "0,1")
    assert code == 1
    # LS on a rank-deficient pattern is a numerical failure
    rank_def = small_config(pattern={"type": "explicit", "offsets": [0, 1, 2]}, q=3)
    code, _, err = run_cli(capsys, "estimate", "--config", write_cfg(tmp_path, rank_def))
    assert code == 2 and "rank" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mcpsd", "pattern", "ruler", "--order", "7"],
                          capture_output=True, text=True, check=True)
    assert "1 3 4 11 17 22 26" in proc.stdout
