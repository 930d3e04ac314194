import pytest

from lrpslab.calibration import (
    CalibrationRow,
    calibrate_method,
    calibrate_methods,
    suite_problems,
    summarize_scaling,
)


def mock(needed, evals=None, fail_seeds=()):
    """Evaluator accepting a geometry once n_steps reaches ``needed[geometry]``."""
    calls = []

    def evaluate(cfg):
        calls.append((cfg.geometry, cfg.n_steps, cfg.seed))
        d = int("".join(c for c in cfg.geometry if c.isdigit()))
        ok = cfg.n_steps >= needed[cfg.geometry] and (cfg.n_steps, cfg.seed) not in fail_seeds
        cost = (evals or {}).get(cfg.geometry, 5.0 * cfg.n_steps)
        return CalibrationRow(cfg.method, cfg.geometry, d, cfg.K, cfg.n_steps, 100, 0.01,
                              0.5 if ok else 0.001, 0, cost, ok, cfg.seed)

    evaluate.calls = calls
    return evaluate


def test_doubling_sequence():
    ev = mock({"pyramid4": 4, "gauss16": 16})
    rows = calibrate_method("cube-slice", ["gauss16", "pyramid4"], evaluate=ev)
    assert [(g, n) for g, n, _ in ev.calls] == [
        ("pyramid4", 1), ("pyramid4", 2), ("pyramid4", 4),
        ("gauss16", 4), ("gauss16", 8), ("gauss16", 16),
    ]
    assert [r.accepted for r in rows] == [False, False, True, False, False, True]


def test_carry_never_decreases():
    ev = mock({"pyramid4": 8, "gauss16": 1})
    calibrate_method("de1", ["pyramid4", "gauss16"], evaluate=ev)
    assert ev.calls[-1][:2] == ("gauss16", 8)
    assert len([c for c in ev.calls if c[0] == "gauss16"]) == 1


def test_cap_is_carried():
    ev = mock({"pyramid4": 2, "gauss16": 10**6, "gauss100": 10**6})
    rows = calibrate_method("cube-slice", ["pyramid4", "gauss16", "gauss100"], cap=8, evaluate=ev)
    g16 = [r.n_steps for r in rows if r.geometry == "gauss16"]
    g100 = [r.n_steps for r in rows if r.geometry == "gauss100"]
    assert g16 == [2, 4, 8]
    assert g100 == [8]
    s = summarize_scaling(rows)
    assert s.k is None and not s.converged
    assert s.k_lower == 1
    assert s.k_label == ">1"


def test_repeats_demote():
    ev = mock({"pyramid4": 2}, fail_seeds={(2, 12)})
    rows = calibrate_method("cube-slice", ["pyramid4"], seed=10, repeats=3, evaluate=ev)
    # n=1 fails at seed 10; n=2 passes 10, 11, fails 12; n=4 passes 10..13
    assert [(r.n_steps, r.seed) for r in rows] == [
        (1, 10), (2, 10), (2, 11), (2, 12), (4, 10), (4, 11), (4, 12), (4, 13),
    ]
    assert summarize_scaling(rows).accepted["pyramid4"] == 4


def test_repeat_failure_means_not_accepted():
    ev = mock({"pyramid4": 1}, fail_seeds={(n, 11) for n in (1, 2, 4)})
    rows = calibrate_method("cube-slice", ["pyramid4"], seed=10, repeats=1, cap=4, evaluate=ev)
    assert summarize_scaling(rows).accepted["pyramid4"] is None


def test_summary_example():
    ev = mock({"gauss4": 8, "gauss16": 16}, evals={"gauss4": 40.0, "gauss16": 80.0})
    rows = calibrate_method("cube-slice", ["gauss4", "gauss16"], evaluate=ev)
    s = summarize_scaling(rows)
    assert s.k == 2
    assert s.accepted == {"gauss4": 8, "gauss16": 16}
    # efficiency x d in percent: 100 * 4 / 40 = 10, 100 * 16 / 80 = 20
    assert s.min_efficiency_d_percent == pytest.approx(10.0)


def test_on_row_callback():
    seen = []
    calibrate_method("cube-slice", ["pyramid4"], evaluate=mock({"pyramid4": 2}),
                     on_row=seen.append)
    assert [r.n_steps for r in seen] == [1, 2]


def test_suites():
    assert suite_problems("full") == ["shell2", "pyramid4", "shell8", "gauss16", "pyramid16",
                                      "gauss100"]
    with pytest.raises(ValueError):
        suite_problems("huge")


def test_real_run_jobs_independent():
    kw = dict(K=30, n_collect=150, warmup=40, cap=4)
    one = calibrate_methods(["cube-slice", "de-harm"], ["pyramid4"], jobs=1, **kw)
    two = calibrate_methods(["cube-slice", "de-harm"], ["pyramid4"], jobs=2, **kw)
    assert one == two
    assert list(one) == ["cube-slice", "de-harm"]
