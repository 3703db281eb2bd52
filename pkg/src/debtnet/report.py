"""Yearly summary tables built from daily network series and exponent fits.

Each builder returns ``(header, rows)`` ready for CSV/JSON output.
"""

from __future__ import annotations

import datetime as dt

import numpy as np

from .statfit import pearson_correlations, summarize

SUMMARY_HEADER = ("year", "count", "min", "max", "mean", "std_dev")


def growth_rate_pct(previous: float, current: float) -> float:
    """Percentage increase ``(current - previous) / previous * 100``."""
    return (current - previous) / previous * 100.0


def growth_ratio_pct(previous: float, current: float) -> float:
    """``current / previous * 100``: the year-end level relative to the prior one."""
    return current / previous * 100.0


def _yearly(values, dates):
    rows = []
    for s in summarize(values, dates, group_by_year=True):
        rows.append((int(s.label), s.count, s.min, s.max, s.mean, s.std_dev))
    return SUMMARY_HEADER, rows


def gamma_by_year(gammas: dict[dt.date, float]):
    """Exponent summary per calendar year."""
    dates = sorted(gammas)
    if not dates:
        return SUMMARY_HEADER, []
    return _yearly([gammas[d] for d in dates], dates)


def avg_degree_by_year(daily: list[dict]):
    """Mean-degree summary per year, over days with a non-empty network."""
    live = [d for d in daily if d["n"] > 0]
    if not live:
        return SUMMARY_HEADER, []
    return _yearly([d["avg_degree"] for d in live], [d["date"] for d in live])


def year_end_counts(daily: list[dict]):
    """Node and edge counts on the last recorded day of each year.

    Two growth columns are emitted: the percentage increase and the
    ratio to the previous year-end level (both in percent).
    """
    header = ("date", "nodes", "edges", "node_growth_pct", "edge_growth_pct",
              "node_ratio_pct", "edge_ratio_pct")
    last: dict[int, dict] = {}
    for d in daily:
        last[d["date"].year] = d
    rows, prev = [], None
    for year in sorted(last):
        d = last[year]
        if prev is None or prev["n"] == 0 or prev["m"] == 0:
            growth = ("", "", "", "")
        else:
            growth = (
                growth_rate_pct(prev["n"], d["n"]), growth_rate_pct(prev["m"], d["m"]),
                growth_ratio_pct(prev["n"], d["n"]), growth_ratio_pct(prev["m"], d["m"]),
            )
        rows.append((d["date"].isoformat(), d["n"], d["m"], *growth))
        prev = d
    return header, rows


def regression_sample(daily: list[dict], gammas: dict[dt.date, float]):
    """Days with originations and a fitted exponent: ``(date, gamma, R, M, n)``."""
    return [
        (d["date"], gammas[d["date"]], d["R"], d["M"], d["n"])
        for d in daily
        if d["date"] in gammas and d["R"] != 0 and d["M"] != 0
    ]


def variable_summary(sample):
    header = ("variable", "mean", "median", "max", "min", "std_dev", "n_obs")
    if not sample:
        return header, []
    cols = dict(zip(("gamma", "R", "M", "n"), zip(*[s[1:] for s in sample])))
    rows = []
    for name in ("gamma", "n", "R", "M"):
        s = summarize(cols[name], label=name)[0]
        rows.append((name, s.mean, s.median, s.max, s.min, s.std_dev, s.count))
    return header, rows


def correlation_table(sample):
    names = ("gamma", "R", "n", "M")
    header = ("variable", *names)
    if len(sample) < 2:
        return header, []
    a = np.array([s[1:] for s in sample], dtype=float)  # gamma, R, M, n
    cols = [a[:, 0], a[:, 1], a[:, 3], a[:, 2]]
    try:
        corr = pearson_correlations(cols)
    except ValueError:
        return header, []
    return header, [(names[i], *map(float, corr[i])) for i in range(len(names))]
