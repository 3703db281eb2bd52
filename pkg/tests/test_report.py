import datetime as dt

import pytest

from debtnet.report import (
    avg_degree_by_year, correlation_table, gamma_by_year, growth_rate_pct, growth_ratio_pct,
    regression_sample, variable_summary, year_end_counts,
)

D = dt.date

# published year-end node and edge counts with their printed "rate" columns
YEAR_END = [
    (D(2010, 12, 31), 151, 1048, None, None),
    (D(2011, 12, 31), 3483, 45348, 2306.62, 4327.10),
    (D(2012, 12, 31), 11850, 236115, 340.22, 520.67),
    (D(2013, 12, 31), 59330, 1137474, 500.68, 481.75),
    (D(2014, 12, 31), 151759, 3716699, 255.79, 326.75),
]


def day(date, n, m, avg=None, R=0.0, M=0.0):
    return {"date": date, "n": n, "m": m, "avg_degree": 2 * m / n if avg is None and n else (avg or 0.0),
            "R": R, "M": M}


def test_printed_rates_are_level_ratios():
    for (_, n0, m0, *_), (_, n1, m1, pn, pm) in zip(YEAR_END, YEAR_END[1:]):
        assert round(growth_ratio_pct(n0, n1), 2) == pn
        assert round(growth_ratio_pct(m0, m1), 2) == pm
        assert growth_rate_pct(n0, n1) == pytest.approx(growth_ratio_pct(n0, n1) - 100)


def test_year_end_table():
    daily = [day(D(2010, 6, 1), 10, 20)] + [day(d, n, m) for d, n, m, *_ in YEAR_END]
    header, rows = year_end_counts(daily)
    assert header[:3] == ("date", "nodes", "edges")
    assert [r[0] for r in rows] == [d.isoformat() for d, *_ in YEAR_END]
    assert rows[0][3:] == ("", "", "", "")
    assert rows[1][3] == pytest.approx(2206.62, abs=5e-3)
    assert rows[1][5] == pytest.approx(2306.62, abs=5e-3)
    assert rows[4][6] == pytest.approx(326.75, abs=5e-3)


def test_gamma_and_degree_by_year():
    gammas = {D(2014, 1, 1): 1.9, D(2014, 6, 1): 1.8, D(2013, 3, 3): 2.0}
    header, rows = gamma_by_year(gammas)
    assert [r[0] for r in rows] == [2013, 2014]
    assert rows[1][1:5] == (2, 1.8, 1.9, pytest.approx(1.85))
    daily = [day(D(2012, 1, 1), 0, 0), day(D(2012, 1, 2), 4, 4), day(D(2012, 1, 3), 5, 10)]
    _, rows = avg_degree_by_year(daily)
    assert rows == [(2012, 2, 2.0, 4.0, 3.0, pytest.approx(2 ** 0.5))]
    assert gamma_by_year({}) == (gamma_by_year({})[0], [])


def test_regression_sample_filters_quiet_days():
    daily = [day(D(2014, 1, d), 10 + d, 20, R=0.1 * (d % 2), M=3.0 * (d % 2)) for d in range(1, 7)]
    gammas = {D(2014, 1, d): 1.5 + d / 10 for d in range(1, 6)}
    sample = regression_sample(daily, gammas)
    assert [s[0].day for s in sample] == [1, 3, 5]
    header, rows = variable_summary(sample)
    assert [r[0] for r in rows] == ["gamma", "n", "R", "M"]
    _, corr = correlation_table(sample + [(D(2014, 2, 1), 1.1, 0.2, 6.0, 40)])
    assert [r[0] for r in corr] == ["gamma", "R", "n", "M"]
    assert all(corr[i][i + 1] == 1.0 for i in range(4))
