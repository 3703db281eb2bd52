"""Loan ledger parsing and day-by-day replay into a debtor-creditor network.

A loan origination adds one edge per funding contribution between the
borrower and that lender, labelled with the loan id.  At maturity
(origination date plus the term in calendar months) the loan's edges are
deleted and any participant left without relationships leaves the network.
"""

from __future__ import annotations

import calendar
import csv
import datetime as dt
import enum
import io
import math
import os
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .graph import DegreeHistogram, DynamicGraph

LOAN_COLUMNS = ("loan_id", "borrower_id", "origination_date", "term_months", "interest_rate", "principal")
FUNDING_COLUMNS = ("loan_id", "lender_id", "amount")
DAILY_COLUMNS = (
    "date", "n", "m", "added_nodes", "added_edges", "deleted_nodes", "deleted_edges",
    "avg_degree", "avg_degree_added", "R", "M",
)
OVERLAP_COLUMNS = ("date", "borrowers", "lenders", "dual")


class LedgerError(ValueError):
    """Malformed or inconsistent ledger input."""


@dataclass(frozen=True)
class LoanRecord:
    loan_id: str
    borrower_id: str
    origination_date: dt.date
    term_months: int
    interest_rate: float
    principal: float

    @property
    def maturity_date(self) -> dt.date:
        return add_months(self.origination_date, self.term_months)


@dataclass(frozen=True)
class FundingRecord:
    loan_id: str
    lender_id: str
    amount: float


class EventKind(enum.IntEnum):
    # the value is the same-day ordering: originations before maturities
    ORIGINATE = 0
    MATURE = 1


@dataclass(frozen=True)
class LedgerEvent:
    date: dt.date
    kind: EventKind
    loan_id: str

    def sort_key(self):
        return (self.date, self.kind, id_sort_key(self.loan_id))


def id_sort_key(ident: str):
    """Numeric ids sort numerically, everything else lexically after them."""
    return (0, int(ident), "") if ident.isdigit() else (1, 0, ident)


def add_months(d: dt.date, months: int) -> dt.date:
    """Calendar-month addition, clamping to the last day of the target month."""
    total = d.year * 12 + (d.month - 1) + months
    year, month = divmod(total, 12)
    month += 1
    if not dt.MINYEAR <= year <= dt.MAXYEAR:
        raise LedgerError(f"date overflow adding {months} months to {d.isoformat()}")
    day = min(d.day, calendar.monthrange(year, month)[1])
    return dt.date(year, month, day)


# -- parsing ----------------------------------------------------------------

def _open_source(source):
    if isinstance(source, (str, os.PathLike)):
        path = Path(source)
        return path.name, path.open(newline="", encoding="utf-8")
    if isinstance(source, io.IOBase) or hasattr(source, "read"):
        return getattr(source, "name", "<stream>"), source
    raise TypeError(f"cannot read ledger from {type(source).__name__}")


def _read_rows(source, columns):
    name, fh = _open_source(source)
    try:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return name, []
        missing = [c for c in columns if c not in reader.fieldnames]
        if missing:
            raise LedgerError(f"{name}:1: missing column(s) {', '.join(missing)}")
        rows = [(reader.line_num, row) for row in reader]
    finally:
        if isinstance(source, (str, os.PathLike)):
            fh.close()
    return name, rows


def _field(name, line, row, col, conv):
    raw = row.get(col)
    if raw is None or raw.strip() == "":
        raise LedgerError(f"{name}:{line}: empty {col}")
    try:
        return conv(raw.strip())
    except ValueError:
        raise LedgerError(f"{name}:{line}: bad {col} {raw!r}") from None


def parse_ledger(loans_source, fundings_source) -> tuple[list[LoanRecord], list[FundingRecord]]:
    """Read and cross-validate ``loans.csv`` and ``fundings.csv``.

    Sources may be paths or open text streams.  Errors carry ``file:line``.
    """
    lname, loan_rows = _read_rows(loans_source, LOAN_COLUMNS)
    fname, fund_rows = _read_rows(fundings_source, FUNDING_COLUMNS)

    loans: list[LoanRecord] = []
    by_id: dict[str, LoanRecord] = {}
    for line, row in loan_rows:
        loan = LoanRecord(
            loan_id=_field(lname, line, row, "loan_id", str),
            borrower_id=_field(lname, line, row, "borrower_id", str),
            origination_date=_field(lname, line, row, "origination_date", dt.date.fromisoformat),
            term_months=_field(lname, line, row, "term_months", int),
            interest_rate=_field(lname, line, row, "interest_rate", float),
            principal=_field(lname, line, row, "principal", float),
        )
        if loan.term_months < 1:
            raise LedgerError(f"{lname}:{line}: term_months must be >= 1")
        if not 0 < loan.interest_rate < 1:
            raise LedgerError(f"{lname}:{line}: interest_rate must be a fraction in (0, 1)")
        if not (loan.principal > 0 and math.isfinite(loan.principal)):
            raise LedgerError(f"{lname}:{line}: principal must be positive")
        if loan.loan_id in by_id:
            raise LedgerError(f"{lname}:{line}: duplicate loan_id {loan.loan_id}")
        by_id[loan.loan_id] = loan
        loans.append(loan)

    fundings: list[FundingRecord] = []
    seen = set()
    for line, row in fund_rows:
        f = FundingRecord(
            loan_id=_field(fname, line, row, "loan_id", str),
            lender_id=_field(fname, line, row, "lender_id", str),
            amount=_field(fname, line, row, "amount", float),
        )
        if f.loan_id not in by_id:
            raise LedgerError(f"{fname}:{line}: funding references unknown loan {f.loan_id}")
        if not (f.amount > 0 and math.isfinite(f.amount)):
            raise LedgerError(f"{fname}:{line}: amount must be positive")
        if f.lender_id == by_id[f.loan_id].borrower_id:
            raise LedgerError(f"{fname}:{line}: borrower {f.lender_id} cannot fund own loan {f.loan_id}")
        if (f.loan_id, f.lender_id) in seen:
            raise LedgerError(f"{fname}:{line}: duplicate funding of loan {f.loan_id} by {f.lender_id}")
        seen.add((f.loan_id, f.lender_id))
        fundings.append(f)

    funded = {f.loan_id for f in fundings}
    for loan in loans:
        if loan.loan_id not in funded:
            raise LedgerError(f"{lname}: loan {loan.loan_id} has no funding")
    return loans, fundings


# -- events -----------------------------------------------------------------

def build_events(loans: Iterable[LoanRecord]) -> list[LedgerEvent]:
    """One origination and one maturity event per loan, totally ordered by
    (date, originations first, loan id)."""
    events = []
    for loan in loans:
        for kind, date in ((EventKind.ORIGINATE, loan.origination_date),
                           (EventKind.MATURE, loan.maturity_date)):
            events.append(LedgerEvent(date, kind, loan.loan_id))
    events.sort(key=LedgerEvent.sort_key)
    return events


# -- replay -----------------------------------------------------------------

@dataclass(frozen=True)
class DailySnapshot:
    date: dt.date
    n: int
    m: int
    added_nodes: int
    added_edges: int
    deleted_nodes: int
    deleted_edges: int
    avg_degree: float
    avg_degree_added: float
    mean_rate: float
    mean_term: float
    histogram: DegreeHistogram = field(repr=False)
    borrowers: int = 0
    lenders: int = 0
    dual: int = 0

    def row(self) -> tuple:
        return (
            self.date.isoformat(), self.n, self.m, self.added_nodes, self.added_edges,
            self.deleted_nodes, self.deleted_edges, self.avg_degree, self.avg_degree_added,
            self.mean_rate, self.mean_term,
        )


class Replayer:
    """Stateful replay of ledger events through a :class:`DynamicGraph`."""

    def __init__(self, loans, fundings):
        self.loans = {loan.loan_id: loan for loan in loans}
        self.fundings: dict[str, list[FundingRecord]] = {}
        for f in fundings:
            self.fundings.setdefault(f.loan_id, []).append(f)
        self.graph = DynamicGraph()
        self.node_of: dict[str, int] = {}
        self.participant_of: dict[int, str] = {}
        self.has_borrowed: set[str] = set()
        self.has_lent: set[str] = set()
        self._reset_day()

    def _reset_day(self):
        self.added_nodes = self.added_edges = 0
        self.deleted_nodes = self.deleted_edges = 0
        self.day_rates: list[float] = []
        self.day_terms: list[int] = []

    def _node(self, participant: str) -> int:
        v = self.node_of.get(participant)
        if v is None:
            v = self.graph.add_node()
            self.node_of[participant] = v
            self.participant_of[v] = participant
            self.added_nodes += 1
        return v

    def originate(self, loan_id: str):
        loan = self.loans[loan_id]
        b = self._node(loan.borrower_id)
        self.has_borrowed.add(loan.borrower_id)
        for f in self.fundings[loan_id]:
            self.graph.add_edge(b, self._node(f.lender_id), loan_id)
            self.has_lent.add(f.lender_id)
        self.added_edges += len(self.fundings[loan_id])
        self.day_rates.append(loan.interest_rate)
        self.day_terms.append(loan.term_months)

    def mature(self, loan_id: str):
        m0 = self.graph.m
        removed = self.graph.remove_loan(loan_id)
        self.deleted_edges += m0 - self.graph.m
        self.deleted_nodes += len(removed)
        for v in removed:
            del self.node_of[self.participant_of.pop(v)]

    def apply(self, event: LedgerEvent):
        if event.kind is EventKind.ORIGINATE:
            self.originate(event.loan_id)
        else:
            self.mature(event.loan_id)

    def relationships(self) -> Counter:
        """Multiset of ``(participant, participant, loan_id)`` edges, with the
        participant pair sorted; independent of internal node ids."""
        names = self.participant_of
        return Counter(
            (*sorted((names[u], names[v])), label) for u, v, label in self.graph.edges()
        )

    def role_counts(self) -> tuple[int, int, int]:
        borrowers = lenders = dual = 0
        for p in self.node_of:
            b, l = p in self.has_borrowed, p in self.has_lent
            if b and l:
                dual += 1
            elif b:
                borrowers += 1
            else:
                lenders += 1
        return borrowers, lenders, dual

    def snapshot(self, date: dt.date) -> DailySnapshot:
        g = self.graph
        rates, terms = self.day_rates, self.day_terms
        borrowers, lenders, dual = self.role_counts()
        snap = DailySnapshot(
            date=date,
            n=g.n,
            m=g.m,
            added_nodes=self.added_nodes,
            added_edges=self.added_edges,
            deleted_nodes=self.deleted_nodes,
            deleted_edges=self.deleted_edges,
            avg_degree=g.average_degree() if g.n else 0.0,
            avg_degree_added=2 * self.added_edges / self.added_nodes if self.added_nodes else 0.0,
            mean_rate=math.fsum(rates) / len(rates) if rates else 0.0,
            mean_term=math.fsum(terms) / len(terms) if terms else 0.0,
            histogram=g.degree_histogram(),
            borrowers=borrowers,
            lenders=lenders,
            dual=dual,
        )
        self._reset_day()
        return snap


def replay(events: list[LedgerEvent], loans, fundings) -> list[DailySnapshot]:
    """Apply events day by day and snapshot the network at the end of each
    calendar day between the first and last event, including quiet days.

    ``avg_degree_added`` is ``2 * added_edges / added_nodes`` for the day.
    ``R``/``M`` are unweighted means over loans originated that day (0 if none).
    """
    if not events:
        return []
    rp = Replayer(loans, fundings)
    snaps = []
    i = 0
    day = events[0].date
    one = dt.timedelta(days=1)
    while day <= events[-1].date:
        while i < len(events) and events[i].date == day:
            rp.apply(events[i])
            i += 1
        snaps.append(rp.snapshot(day))
        day += one
    return snaps


def rebuild_at(loans, fundings, date: dt.date) -> Replayer:
    """Network at the end of ``date`` rebuilt from scratch from the loans
    outstanding that day (no event history)."""
    rp = Replayer(loans, fundings)
    live = [l for l in loans if l.origination_date <= date < l.maturity_date]
    for loan in sorted(live, key=lambda l: id_sort_key(l.loan_id)):
        rp.originate(loan.loan_id)
    return rp


@dataclass(frozen=True)
class OverlapRow:
    date: dt.date
    borrowers: int
    lenders: int
    dual: int


def participant_overlap_report(snapshots: Iterable[DailySnapshot]) -> list[OverlapRow]:
    """Per-day counts of present participants by role history.

    A participant counts as dual from the first day on which it has both
    borrowed and lent, as long as it is in the network.
    """
    return [OverlapRow(s.date, s.borrowers, s.lenders, s.dual) for s in snapshots]


# -- output -----------------------------------------------------------------

def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, float) else str(x)


def write_daily_csv(snapshots, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(DAILY_COLUMNS)
        for s in snapshots:
            w.writerow([_fmt(x) for x in s.row()])


def write_histogram_csv(hist: DegreeHistogram, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("k", "count"))
        for k, v in hist.counts.items():
            w.writerow((k, v))


def write_overlap_csv(rows, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(OVERLAP_COLUMNS)
        for r in rows:
            w.writerow((r.date.isoformat(), r.borrowers, r.lenders, r.dual))


def histogram_filename(date: dt.date) -> str:
    return f"hist_{date.isoformat()}.csv"


def read_histogram_csv(path) -> DegreeHistogram:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return DegreeHistogram.from_counts({int(r["k"]): int(r["count"]) for r in rows})


def read_daily_csv(path) -> list[dict]:
    """Rows of a ``daily.csv`` with numeric columns converted."""
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in DAILY_COLUMNS if c not in (reader.fieldnames or ())]
        if missing:
            raise LedgerError(f"{Path(path).name}:1: missing column(s) {', '.join(missing)}")
        for row in reader:
            rec = {"date": dt.date.fromisoformat(row["date"])}
            for col in DAILY_COLUMNS[1:]:
                rec[col] = float(row[col]) if col in ("avg_degree", "avg_degree_added", "R", "M") else int(row[col])
            out.append(rec)
    return out
