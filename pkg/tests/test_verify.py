import json
import math

import numpy as np
import pytest

from steerport.verify import (
    SATURATED_SUMS,
    THEOREMS,
    SweepTable,
    pure_state_counter_case,
    run_campaign,
    steerability_threshold,
    sweep_mems,
    sweep_saturating_family,
)


@pytest.mark.parametrize("theorem", ["T1", "T3", "T4", "T5", "XCROSS", "ORACLE13", "ORACLE15"])
def test_small_campaigns_clean(theorem):
    rep = run_campaign(theorem, 3000, 7)
    assert rep.violations == 0
    assert rep.samples == 3000
    assert rep.counterexamples == []
    assert math.isfinite(rep.worst_margin)


def test_t2_campaign_accepts_only_steerable():
    rep = run_campaign("T2", 2000, 7)
    assert rep.violations == 0
    assert rep.samples == 2000
    assert rep.details["draws"] == rep.samples + rep.details["rejections"]
    # the inequality without the factor 2 fails on a large share of accepted draws
    assert rep.details["factorless_inequality_failures"] > 0


def test_mc_campaigns_small():
    rep = run_campaign("MC_EQ10", 6, 3, mc_inputs=5000)
    assert rep.violations == 0
    assert rep.details["mc_inputs"] == 5000


def test_counterexamples_capped_and_ordered():
    # at zero tolerance round-off differences in the cross-check count as violations
    bad = run_campaign("XCROSS", 30, 1, tol=0.0)
    assert bad.violations > 10
    assert bad.violations <= bad.samples
    assert len(bad.counterexamples) == min(10, bad.violations)
    for cx in bad.counterexamples:
        assert cx["state"]["type"] == "x_state"
        assert cx["excess"] > 0
    assert [c["index"] for c in bad.counterexamples] == sorted(c["index"] for c in bad.counterexamples)


def test_worst_margin_monotone_in_prefix():
    margins = [run_campaign("T5", n, 11).worst_margin for n in (10, 100, 1000, 5000)]
    assert all(a <= b for a, b in zip(margins, margins[1:]))


def test_reports_independent_of_workers():
    a = run_campaign("T3", 9000, 4, workers=1).to_json()
    b = run_campaign("T3", 9000, 4, workers=2).to_json()
    assert a == b
    c = run_campaign("T2", 1500, 4, workers=1).to_json()
    d = run_campaign("T2", 1500, 4, workers=3).to_json()
    assert c == d


def test_worker_hint_from_environment(monkeypatch):
    from steerport.verify import resolve_workers

    monkeypatch.setenv("STEERPORT_THREADS", "3")
    assert resolve_workers(None) == 3
    monkeypatch.setenv("STEERPORT_THREADS", "junk")
    assert resolve_workers(None) == 1
    assert resolve_workers(2) == 2
    with pytest.raises(ValueError):
        resolve_workers(0)


def test_report_json_fields():
    doc = json.loads(run_campaign("T1", 100, 2).to_json())
    for key in ("theorem_id", "samples", "violations", "worst_margin", "counterexamples", "seed", "tolerance"):
        assert key in doc


@pytest.mark.parametrize("args", [("T9", 10, 1), ("T1", 0, 1)])
def test_campaign_argument_errors(args):
    with pytest.raises(ValueError):
        run_campaign(*args)


def test_campaign_rejects_negative_tol():
    with pytest.raises(ValueError):
        run_campaign("T1", 10, 1, tol=-1.0)


def test_sweep_mems_rows():
    t3 = sweep_mems(3, [0.6])
    row = t3.row(0)
    assert row["S"] == pytest.approx(1.121507, abs=1e-6)
    assert row["C"] == pytest.approx(0.6, abs=1e-12)
    assert row["steering_bound"] == pytest.approx(0.823751, abs=1e-6)
    assert row["concurrence_upper"] == pytest.approx(0.866667, abs=1e-6)
    t2 = sweep_mems(2, [0.5, 1.0])
    assert t2.row(0)["S"] == pytest.approx(1.172604, abs=1e-6)
    assert t2.row(0)["steering_bound"] == pytest.approx(0.838501, abs=1e-6)
    assert t2.row(0)["concurrence_upper"] == pytest.approx(0.916667, abs=1e-6)
    assert t2.row(1)["S"] == pytest.approx(math.sqrt(3))
    assert t2.row(1)["steering_bound"] == pytest.approx(1.0)
    assert t2.row(1)["concurrence_upper"] == pytest.approx(1.0)


@pytest.mark.parametrize("rank", [2, 3])
def test_steering_bound_below_concurrence_bound_when_steerable(rank):
    t = sweep_mems(rank, np.linspace(0, 1, 201))
    s = t.columns["steerable"]
    assert np.all(t.columns["steering_bound"][s] <= t.columns["concurrence_upper"][s] + 1e-12)


def test_thresholds():
    assert steerability_threshold(3) == pytest.approx((3 * math.sqrt(5) - 1) / 11, abs=1e-9)
    assert steerability_threshold(2) == pytest.approx(1 / 3, abs=1e-9)


def test_counter_case():
    steer, conc = pure_state_counter_case(0.5)
    assert steer > conc


def test_saturating_sweep():
    t = sweep_saturating_family([0.3, 0.5])
    assert t.row(0)["S13"] == pytest.approx(math.sqrt(3 - 0.36), abs=1e-12)
    for key in SATURATED_SUMS:
        assert np.allclose(t.columns[key], 3.0, atol=1e-10)


def test_sweep_validation():
    with pytest.raises(ValueError):
        sweep_mems(4, [0.1])
    with pytest.raises(ValueError):
        sweep_mems(2, [0.5, 1.2])
    with pytest.raises(ValueError):
        sweep_mems(2, [0.5, 0.4])
    with pytest.raises(ValueError):
        sweep_saturating_family([0.0, 0.3])
    with pytest.raises(ValueError):
        SweepTable("x", {"x": np.array([0.0, np.inf])})


def test_csv_format():
    text = sweep_mems(2, [0.0, 1.0]).to_csv()
    lines = text.splitlines()
    assert lines[0].startswith("p,S,C,steerable")
    assert lines[1].split(",")[3] == "0"
    assert lines[2].split(",")[0] == "1.000000000"
    assert len(lines) == 3


def test_theorem_list():
    assert len(THEOREMS) == 10
