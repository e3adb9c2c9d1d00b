"""Erratum audit: flag semantics, determinism, report schema."""

import json

import numpy as np
import pytest

from csapprox import QubitParams, audit_analytic, zero_distance_condition


def test_report_schema_and_counts():
    report = audit_analytic(5)
    doc = json.loads(report.to_json())
    assert doc["schema"] == 1
    assert set(doc["counts"]) == {"weights_infeasible", "inconsistent",
                                  "suboptimal"}
    assert doc["n_points"] == 125
    assert doc["grid"]["a"] == [0.0, 0.5, 5]
    tally = sum(len(e["flags"]) for e in doc["flagged"])
    assert tally == sum(doc["counts"].values())
    for entry in doc["flagged"]:
        assert set(entry) >= {"a", "k", "phi", "case_label",
                              "claimed_distance", "achieved_distance",
                              "oracle_distance", "flags"}


def test_zero_distance_region_is_clean():
    # k capped below every threshold in this (a, phi) window, so all
    # points take the exact decomposition and nothing may be flagged
    report = audit_analytic((7, 7, 7), a_range=(0.3, 0.5),
                            k_range=(0.0, 0.3))
    assert all(lab == "exact" for lab in report.case_labels)
    assert sum(report.counts.values()) == 0
    assert report.entries == []


def test_flags_only_outside_zero_region():
    report = audit_analytic(9)
    for entry in report.entries:
        p = QubitParams(entry["a"], entry["k"], entry["phi"])
        assert not zero_distance_condition(p)
        assert entry["case_label"] != "exact"


def test_suboptimal_flag_definition():
    report = audit_analytic(9)
    for entry in report.entries:
        if "suboptimal" in entry["flags"]:
            assert entry["achieved_distance"] \
                > entry["oracle_distance"] + 1e-4


def test_achieved_never_beats_oracle():
    # only feasible claimed weights can be compared against the
    # constrained optimum; off-simplex weights may dip below it
    report = audit_analytic(9)
    from csapprox import analytic_b3
    for i in range(report.n_points):
        a, k, phi = report.params[i]
        w = analytic_b3(QubitParams(a, k, phi)).claimed_weights
        if w.min() >= -1e-9 and abs(w.sum() - 1.0) <= 1e-9:
            assert report.achieved[i] >= report.oracle[i] - 1e-4


def test_determinism():
    a = audit_analytic(6).to_json()
    b = audit_analytic(6).to_json()
    assert a == b


def test_alt_reading_recorded_for_flagged_case_ii_iii():
    report = audit_analytic(9)
    for entry in report.entries:
        if entry["case_label"] in ("case_ii", "case_iii"):
            assert "alt_achieved_distance" in entry
            assert "alt_weights_feasible" in entry
