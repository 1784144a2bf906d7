"""Scenario bindings at reduced scale: they run, emit, and self-check."""

import numpy as np
import pytest

from shearlab.report import emit_report
from shearlab.scenarios import catalog, run_scenario


def test_catalog_names_eleven():
    names = [e["name"] for e in catalog()]
    assert len(names) == 11 and len(set(names)) == 11


def test_couette_resonant_small(tmp_path):
    series, summary = run_scenario(
        "couette-resonant", {"nx": 64, "ny": 128, "n_quad": 256})
    assert summary["ok"], summary["checks"]
    written = emit_report(tmp_path, series, summary)
    assert "summary.json" in written and "h0.csv" in written


def test_couette_stationary_small():
    _, summary = run_scenario("couette-stationary",
                              {"nx": 64, "ny": 128})
    assert summary["ok"], summary["checks"]


def test_consistency_small():
    _, summary = run_scenario(
        "consistency", {"n": 64, "t_max": 16.0, "n_steps": 512,
                        "tail_start": 10.0})
    checks = summary["checks"]
    assert checks["splitting_linear"]
    assert checks["term_ii_closed_form"]
    assert checks["iv_hminus1_no_positive_trend"]
    assert checks["cone_projector"]


def test_shear_linear_small():
    _, summary = run_scenario(
        "shear-linear",
        {"nx": 64, "ny": 128, "t_max": 30.0, "n_times": 11,
         "n_members": 6, "k_band": 4, "dt_probe": 0.05,
         "t_decomposition": 1.5})
    checks = summary["checks"]
    assert checks["couette_identity"]
    assert checks["couette_forced_reduction"]
    assert checks["couette_commutation"]
    assert checks["derivative_decay_exponent"]
    assert checks["semigroup"]
    assert checks["decomposition_identity"]


def test_shear_consistency_small():
    _, summary = run_scenario(
        "shear-consistency",
        {"nx": 32, "ny": 512, "ny_perturbed": 128, "t_couette": 3.0,
         "n_steps": 48, "t_max": 12.0, "n_steps_perturbed": 48,
         "dt": 0.05})
    assert summary["checks"]["couette_degeneracy"] \
        or summary["couette_defect"] < 5e-6
    assert np.isfinite(summary["sigma_tail"])


def test_viscous_scenarios_small():
    _, res = run_scenario("viscous-resonant", {"nx": 16, "ny": 64})
    assert res["ok"], res["checks"]
    _, stat = run_scenario(
        "viscous-stationary",
        {"ny_solve": 255, "nx": 32, "ny": 128, "t_damping": 6.0})
    assert stat["ok"], stat["checks"]


def test_bprofile_small():
    _, summary = run_scenario("bprofile", {"k_max": 4, "n_eta": 6,
                                           "eta_max": 8.0})
    assert summary["ok"], summary["checks"]


def test_ns_scenarios_small():
    _, fp = run_scenario("ns-fixedpoint", {"nx": 32, "ny": 128})
    assert fp["ok"], fp["checks"]
    _, dec = run_scenario("ns-decay", {"nx": 32, "ny": 128, "t_max": 8.0,
                                       "t_drift": 6.0})
    assert dec["ok"], dec["checks"]
    _, spl = run_scenario("ns-resonant-split", {"nx": 16, "ny": 64,
                                                "t_max": 6.0})
    assert spl["ok"], spl["checks"]


def test_unknown_scenario_raises():
    with pytest.raises(KeyError):
        run_scenario("nope", {})
