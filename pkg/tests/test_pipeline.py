import pytest

from capstruct import fixture_path, load_panel, load_prices
from capstruct.ingest import Dataset, FirmPanel
from capstruct.pipeline import PanelInvalid, analyze_dataset, analyze_panel, leverage_group_test
from capstruct.theorylab import Status, Theory

from conftest import corpus_analyses, make_record


def test_corpus_generating_theories_followed():
    expected = {"SYN-Agency-7": Theory.AGENCY, "SYN-MM-7": Theory.MM, "SYN-NetIncome-7": Theory.NET_INCOME,
                "SYN-NetOperatingIncome-7": Theory.NET_OPERATING_INCOME,
                "SYN-PeckingOrder-7": Theory.PECKING_ORDER, "SYN-TradeOff-7": Theory.TRADE_OFF}
    for a in corpus_analyses():
        status = {v.theory: v.status for v in a.verdicts}
        assert status[expected[a.firm_id]] is Status.FOLLOWED, a.firm_id


def test_dataset_sorted_and_prices_attached(demo):
    ds = Dataset()
    ds.add_panel(load_panel(fixture_path("corpus/mm.csv")))
    ds.add_panel(demo)
    ds.add_prices(load_prices(fixture_path("demo_prices.csv"), firm_id="DEMO"))
    res = analyze_dataset(ds)
    assert [a.firm_id for a in res] == ["DEMO", "SYN-MM-7"]
    assert res[0].technicals is not None and res[1].technicals is None
    assert res[0].technicals.moving_averages[200] is not None


def test_invalid_panel_raises():
    panel = FirmPanel("BAD", tuple(make_record(2011 + i, total_assets=-1.0 if i == 3 else 1000.0)
                                   for i in range(6)))
    with pytest.raises(PanelInvalid) as exc:
        analyze_panel(panel)
    assert exc.value.report.errors[0].code == "NonPositiveAssets"


def test_group_test():
    g = leverage_group_test(corpus_analyses())
    assert g is not None and g.n_high + g.n_low == 72
    assert 0 <= g.test.p_value <= 1
    assert leverage_group_test([]) is None
