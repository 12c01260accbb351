"""Python smoke tests: the bound operations agree with the schema and the
values the C++ suites pin down."""

import json
import math

import pytest

import gime


def test_metric_names_and_classification():
    names = gime.metric_names()
    assert names[0] == "volume"
    assert names[-1] == "mismatch"
    assert len(names) == 11
    assert gime.classify_default("volume") == "additive"
    assert gime.classify_default("delay") == "maximum"
    assert gime.classify_default("granularity") == "mean"
    with pytest.raises(gime.GimeError):
        gime.classify_default("entropy")


def test_lemma_expectation_values():
    assert gime.lemma_expectation("additive", 1, 55, 10, 0.5) == 27.5
    assert gime.lemma_expectation("mean", 0, 1, 100, 0.3) == 0.5
    assert math.isclose(
        gime.lemma_expectation("maximum", 0, 1, 10000, 0.3), 3000 / 3001
    )


def test_subset_and_optimal():
    values = [1.0, 2.0, 3.0]
    assert gime.subset_metric(values, [0, 1, 2], "additive") == 6.0
    assert gime.subset_metric(values, [0, 1, 2], "maximum") == 3.0
    assert gime.optimal_subset(values, "additive", 2) == [1, 2]


def test_verify_lemma_small_enumeration():
    report = gime.verify_lemma(n=10, k=0.5, law="spaced", enumerate=True, seed=1)
    assert report["pass"]
    additive = report["classes"]["additive"]
    assert additive["empirical"] == pytest.approx(additive["closed_form"])
    maximum = report["classes"]["maximum"]
    assert maximum["empirical"] != maximum["closed_form"]  # documented band
    assert maximum["pass"]


def test_eq1_identity():
    result = gime.eq1_check(scope=2, variety=3, duration_ticks=10)
    assert result["pass"]
    assert result["volume"] == 60


def test_theorem_trial_additive():
    values = [i / 500.0 for i in range(500)]
    result = gime.theorem_trial(values, "additive", 0.3, repetitions=100, seed=5)
    assert result["win_fraction"] >= 0.99
    assert result["mean_gap"] > 0


def test_file_pipeline(tmp_path):
    fixture_dir = tmp_path / "fx"
    gime.write_civil_fixture(str(fixture_dir), records=10000, seed=7)

    data = str(fixture_dir / "civil_pool.csv")
    manifest = str(fixture_dir / "civil_manifest.json")

    issues = gime.validate_manifest(manifest)
    assert all(issue["severity"] == "warning" for issue in issues)

    result = gime.compute_metrics(data, manifest)
    metrics = result["metrics"]
    assert metrics["volume"] == 10000
    assert metrics["scope"] == 32
    assert metrics["variety"] == 100
    assert metrics["aggregation"] == 0.245
    assert metrics["mismatch"] == 0
    assert metrics["coverage"] is None

    indices = gime.draw_uniform(data, manifest, "csv", 5, 42)
    assert indices == gime.draw_uniform(data, manifest, "csv", 5, 42)
    assert len(indices) == 5

    thresholds = json.load(open(fixture_dir / "civil_thresholds.json"))
    selection = gime.select(
        data, manifest, "csv", json.dumps(thresholds), 6000, seed=7
    )
    assert selection["accepted"]
    assert len(selection["indices"]) == 6000
    assert selection["report"]["final_metrics"]["variety"] == 100

    verdict = gime.evaluate_thresholds(
        selection["report"]["final_metrics"],
        json.dumps(thresholds),
        selection["report"]["pool_metrics"],
    )
    assert verdict["overall_pass"]


def test_derive_thresholds_roundtrip(tmp_path):
    profile = {
        "schema_version": 1,
        "kind": "sensitivity_profile",
        "levels": {
            "volume": {"level": "moderate", "provenance": "manual"},
            "variety": {"level": "high", "provenance": "manual"},
        },
    }
    pool = {"volume": 1000, "variety": 10}
    spec = gime.derive_thresholds(json.dumps(profile), pool)
    assert spec["criteria"]["variety"]["criterion"] == "equal_pool_optimal"
    assert spec["criteria"]["volume"]["criterion"] == "range"
    assert spec["criteria"]["volume"]["lo"] == 250
