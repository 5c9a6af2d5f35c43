import json
import math

import pytest

from gbsclique.experiments import (REGISTRY, ConfigError, ExperimentReport, emit_report,
                                   parse_config, read_report_csv, report_to_csv, report_to_json,
                                   resolve_overlap, run_experiment)


def test_registry_covers_all_experiments():
    assert set(REGISTRY) == {"expected_weight", "bias_sweep", "cov_check", "wick_check", "lognormal",
                             "haf_moment", "poisson_lemma", "stein_chen", "detection_power",
                             "algorithm1", "mcmc_validation"}
    assert all(e.claim for e in REGISTRY.values())


def test_minimal_config_fills_defaults():
    cfg = parse_config('{"experiment": "lognormal", "seed": 1}')
    assert cfg.seed == 1 and cfg.n == [8, 12, 16, 20] and cfg.trials == 20_000
    assert cfg.echo()["experiment"] == "lognormal"


@pytest.mark.parametrize("doc, fragment", [
    ({"experiment": "lognormal", "foo": 1}, "'foo'"),
    ({"experiment": "bias_sweep", "n": 10, "k": 11}, "k <= n"),
    ({"experiment": "lognormal", "n": []}, "empty"),
    ({"experiment": "lognormal", "seed": -1}, "seed"),
    ({"experiment": "lognormal", "seed": 2**64}, "seed"),
    ({"experiment": "haf_moment", "p": 0.0}, "p must"),
    ({"experiment": "haf_moment", "trials": 0}, "trials"),
    ({"experiment": "nope"}, "unknown experiment"),
    ({"experiment": "stein_chen", "m": [10], "overlap": ["full", 3]}, "equal length"),
])
def test_config_errors(doc, fragment):
    with pytest.raises(ConfigError, match=None) as exc:
        parse_config(doc)
    assert fragment in str(exc.value)


def test_malformed_json():
    with pytest.raises(ConfigError):
        parse_config("{not json")


def test_sweep_is_cartesian():
    cfg = parse_config({"experiment": "haf_moment", "n": [2, 3], "p": [0.3, 0.5, 0.7]})
    pts = list(cfg.sweep("n", "p"))
    assert len(pts) == 6 and pts[0] == {"n": 2, "p": 0.3}


def test_overlap_rules():
    assert resolve_overlap(1000, "full") == 1000
    assert resolve_overlap(1000, "m-m^(2/3)") == 900
    with pytest.raises(ConfigError):
        resolve_overlap(10, 11)


@pytest.fixture(scope="module")
def small_report():
    cfg = parse_config({"experiment": "haf_moment", "seed": 5, "n": [2, 4], "p": [0.5], "trials": 2000})
    return run_experiment(cfg)


def test_report_shape(small_report):
    rep = small_report
    assert rep.experiment == "haf_moment" and len(rep.rows) == 2
    assert {"estimate", "theory", "ratio", "stderr"} <= set(rep.columns())
    for row in rep.rows:
        assert abs(row["estimate"] - row["theory"]) < 5 * row["stderr"]
    assert rep.meta["threads"] >= 1 and rep.meta["runtime_seconds"] >= 0


def test_reproducible_and_byte_identical(small_report, tmp_path):
    cfg = parse_config({"experiment": "haf_moment", "seed": 5, "n": [2, 4], "p": [0.5], "trials": 2000})
    again = run_experiment(cfg)
    assert report_to_csv(again) == report_to_csv(small_report)
    p1 = emit_report(small_report, "csv", str(tmp_path / "a"))
    p2 = emit_report(again, "csv", str(tmp_path / "b"))
    assert p1.endswith("a.haf_moment.csv")
    assert open(p1, "rb").read() == open(p2, "rb").read()


def test_csv_json_agree_numerically(small_report):
    text = report_to_csv(small_report)
    lines = text.splitlines()
    assert lines[0].startswith("# experiment=haf_moment") and lines[1].startswith("# claim: ")
    rows_csv = read_report_csv(text)
    doc = json.loads(report_to_json(small_report))
    assert doc["experiment"] == "haf_moment" and doc["config"]["seed"] == 5
    for rc, rj in zip(rows_csv, doc["rows"]):
        for key in ("estimate", "theory", "stderr"):
            assert float(rc[key]) == rj[key]  # 17 significant digits round-trip exactly


def test_empty_report_rejected():
    rep = ExperimentReport("x", "claim", {}, [], {}, {})
    with pytest.raises(ValueError):
        report_to_csv(rep)
    with pytest.raises(ValueError):
        report_to_json(rep)


def test_stein_chen_small():
    cfg = parse_config({"experiment": "stein_chen", "m": [200], "overlap": ["full"], "trials": 20_000})
    rep = run_experiment(cfg)
    row = rep.rows[0]
    assert abs(row["estimate"] - math.exp(-1)) < 4 * row["stderr"] + 0.003


def test_mcmc_validation_small():
    cfg = parse_config({"experiment": "mcmc_validation", "n": 8, "m": 2, "t": 20_000,
                        "burnin": 2000, "thin": 5, "seed": 3})
    rep = run_experiment(cfg)
    (summary,) = rep.summary.values()
    assert summary["tv_mcmc_left"] < 0.05 and summary["tv_mcmc_right"] < 0.05
    assert summary["marginal_weight_ratio_rel_spread"] < 1e-9
