import math

import pytest
from hypothesis import given, strategies as st

from hybrid_noma.config import RunConfig
from hybrid_noma.errors import DomainError
from hybrid_noma.figures import PRESETS, family_config, preset, reproduce_figure
from hybrid_noma.sweep import (
    CSV_HEADER,
    RunRecord,
    SweepSpec,
    evaluate,
    parse_csv,
    records_to_csv,
    run_sweep,
)

FAST = RunConfig(trials=20_000, batch=5_000)


def test_spec_validation():
    with pytest.raises(DomainError):
        SweepSpec("nope", 0, 1, 2)
    with pytest.raises(DomainError):
        SweepSpec("rho_db", 2, 1, 2)
    with pytest.raises(DomainError):
        SweepSpec("rho_db", 1, 2, 1)
    with pytest.raises(DomainError):
        SweepSpec("semi_angle_deg", 10, 90, 3)
    with pytest.raises(DomainError):
        SweepSpec("beta_los", 0, 1.5, 3)
    with pytest.raises(DomainError):
        SweepSpec("Q_vlc", -1, 1, 3, scale="log")
    with pytest.raises(DomainError):
        SweepSpec("K", 2, 3, 3).values()
    assert SweepSpec("Q_vlc", 1, 100, 3, scale="log").values() == pytest.approx([1, 10, 100])


def test_minimal_sweep_cardinality():
    recs = run_sweep(FAST, SweepSpec("rho_db", 100, 150, 2), modes=("noma", "ofdma"), methods=("analytic", "mc"))
    assert len(recs) == 2 * 2 * 2
    keys = [(r.value, r.mode, r.method) for r in recs]
    assert keys == sorted(keys)
    for r in recs:
        if r.method == "analytic":
            assert r.std_error == 0 and r.trials == 0
        else:
            assert r.trials == FAST.trials and r.std_error > 0


def test_errors_are_recorded_per_row():
    # L = 1.5 m puts the cell edge outside the receiver field of view
    recs = run_sweep(FAST, SweepSpec("L", 1.5, 2.5, 2))
    assert math.isnan(recs[0].estimate) and "field of view" in recs[0].error
    assert recs[1].estimate > 0 and not recs[1].error


def test_csv_round_trip():
    recs = run_sweep(FAST, SweepSpec("K", 2, 3, 2), modes=("noma",), methods=("analytic", "mc"), links=("vlc", "rf"))
    recs.append(RunRecord("x", 0.1, "vlc", "noma", "analytic", math.nan, math.nan, 0, 1, "d"))
    text = records_to_csv(recs)
    assert text.split("\n")[0] == CSV_HEADER
    assert "\r" not in text
    back = parse_csv(text)
    assert len(back) == len(recs)
    for a, b in zip(recs, back):
        for f in ("param", "link", "mode", "method", "trials", "seed", "config_digest", "value"):
            assert getattr(a, f) == getattr(b, f)
        for f in ("estimate", "std_error"):
            x, y = getattr(a, f), getattr(b, f)
            assert (math.isnan(x) and math.isnan(y)) or x == y


@given(st.floats(allow_nan=False, allow_infinity=False, width=64))
def test_float_serialization_lossless(x):
    r = RunRecord("p", x, "vlc", "noma", "mc", x, abs(x), 1, 2, "d")
    assert parse_csv(records_to_csv([r]))[0].estimate == x


def test_sweep_parallelism_independent():
    spec = SweepSpec("sigma_e_sq_db", -130, -110, 3)
    a = run_sweep(FAST, spec, methods=("analytic", "mc"), workers=1)
    b = run_sweep(FAST, spec, methods=("analytic", "mc"), workers=4)
    assert records_to_csv(a) == records_to_csv(b)


def test_evaluate_links():
    cfg = FAST.with_values(K=4, rho_db=150.0, rf_rho_db=30.0)
    v, _, _ = evaluate(cfg, "vlc", "noma", "analytic")
    f, _, _ = evaluate(cfg, "rf", "noma", "analytic")
    ee, _, _ = evaluate(cfg, "hybrid", "noma", "analytic")
    solo, _, _ = evaluate(cfg, "vlc_only", "noma", "analytic")
    assert ee == pytest.approx(0.5 * 20e6 * (v + f) / 11.4, rel=1e-12)
    assert solo == pytest.approx(0.5 * 20e6 * v / 4.0, rel=1e-12)
    with pytest.raises(DomainError):
        evaluate(cfg, "rf", "ofdma", "analytic")
    with pytest.raises(DomainError):
        evaluate(cfg, "satellite", "noma", "analytic")


def test_presets_exist_and_shapes():
    assert set(PRESETS) == {f"fig{i}" for i in range(3, 14)}
    fig5 = preset("fig5")
    assert len(fig5.families) == 6
    assert {f.modes[0] for f in fig5.families} == {"noma", "ofdma"}
    assert all(family_config(RunConfig(), fig5, f).K == 5 for f in fig5.families)
    fig10 = preset("fig10")
    assert len(fig10.families) == 3
    assert all(family_config(RunConfig(), fig10, f).K == 4 for f in fig10.families)
    fig13 = preset("fig13")
    assert all(set(f.links) == {"hybrid", "vlc_only"} for f in fig13.families)
    with pytest.raises(DomainError):
        preset("fig99")


def test_reproduce_writes_outputs(tmp_path):
    paths = reproduce_figure("fig6", tmp_path, FAST)
    names = {p.name for p in paths}
    assert "fig6_manifest.txt" in names and "fig6_plot.py" in names and "fig6.png" in names
    csvs = [p for p in paths if p.suffix == ".csv"]
    assert len(csvs) == len(preset("fig6").families)
    manifest = (tmp_path / "fig6_manifest.txt").read_text()
    assert "sweep_parameter = K" in manifest and "trials = 20000" in manifest
    compile((tmp_path / "fig6_plot.py").read_text(), "fig6_plot.py", "exec")
    assert (tmp_path / "fig6.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
