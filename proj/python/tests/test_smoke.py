import json

import pytest

import tariffsim as ts

# Table-style base case: T / N = 937.60 DKK.
N = 730_000
Q_WH = 2_035_200_000_000


@pytest.fixture
def inputs():
    return ts.BaseCaseInputs(ts.Rate("18.25"), ts.Money("428.8"), N, Q_WH)


def test_money_and_fractions():
    assert ts.Money("428.8").quanta == 4_288_000
    assert str(ts.Money("-1.2345")) == "-1.2345"
    assert ts.Money.from_quanta(-12_345).to_dkk_string(2) == "-1.23"
    assert ts.Fraction("0.55") == ts.Fraction(11, 20)
    assert float(ts.Fraction(3)) == 3.0
    with pytest.raises(ValueError):
        ts.Money("12,5")


def test_base_case_identity(inputs):
    t = inputs.total_cost
    assert t == ts.Money(str(937.6 * N))
    assert inputs.volumetric_revenue == ts.Money("371424000")
    assert inputs.base_share == ts.Fraction(371_424, 684_448)


def test_scenario_ladder(inputs):
    cal = ts.calibrate_tou(inputs, "0.8", 10_000_000_000, Q_WH - 10_000_000_000)
    fees = {}
    for sc in ts.canonical_scenarios():
        rates = ts.solve_scenario(inputs, sc, cal)
        fees[sc.id] = rates.fee
        assert abs(ts.revenue_identity_residual(inputs, rates).quanta) <= N
    assert fees["vol000"] == ts.Money("937.6")
    assert fees["vol100"] == ts.Money("0")
    assert fees["vol000"].quanta > fees["vol055"].quanta > fees["vol075"].quanta


def test_redistribution_and_bills(inputs):
    x = ts.redistribution_multiplier("0", 131_108, 598_892)
    assert float(x) == pytest.approx(1 + 131_108 / 598_892)
    assert ts.bill_base_case(1_000_000, inputs)["total"] == "611.3000"
    assert ts.equity_delta(ts.Money("110"), ts.Money("100")) == "10.00"


def test_peak_hours():
    load = [5, 9, 1, 9, 3, 7, 0, 2]
    assert ts.peak_hours(load, "0.25") == [1, 3]
    with pytest.raises(ValueError):
        ts.peak_hours(load, "0.1")


def test_small_sweep(tmp_path):
    cfg = ts.RunConfig()
    cfg.set_synthetic(600, seed=7, fault_fraction=0.02)
    cfg.threads = 1
    r = ts.run_sweep(cfg)
    assert r.passed and r.households == 600
    assert r.scenario_ids == ["vol000", "vol025", "vol055", "vol075", "vol100"]
    for s in range(5):
        for f in range(len(r.factors)):
            assert r.audit(s, f).passed
    assert r.delta("Low/EV", 0, 0) is None
    assert r.delta("Low/NoTech", 4, 0) == r.delta("Low/NoTech", 4, len(r.factors) - 1)
    summary = json.loads(r.summary_json())
    assert summary
    written = r.write_reports(str(tmp_path))
    assert len(written) == 6


def test_bad_config():
    with pytest.raises(ValueError):
        ts.RunConfig.parse('{"factors": [1.5]}')
