"""Deterministic synthetic inputs: a small loan ledger and daily regression series."""

from __future__ import annotations

import csv
import datetime as dt
import math
import random

import numpy as np

from .ledger import FUNDING_COLUMNS, LOAN_COLUMNS, FundingRecord, LoanRecord

# intercept, interest rate, term (months), ln(node count)
REFERENCE_COEFFICIENTS = (0.368, -0.701, 0.0074, 0.124)
TERMS = (1, 2, 3, 6)


def generate_ledger(n_days: int = 90, loans_per_day: float = 2.2, seed: int = 2014,
                    start: dt.date = dt.date(2014, 11, 3)):
    """Grow a toy lending book.

    Borrowers are mostly newcomers, sometimes earlier participants (which
    produces dual-role participants).  Each loan draws 1-8 lenders; existing
    lenders are picked with weight ``1 + past fundings``, a rich-get-richer
    rule in the spirit of preferential attachment.
    """
    rng = random.Random(seed)
    loans: list[LoanRecord] = []
    fundings: list[FundingRecord] = []
    lend_count: dict[str, int] = {}
    participants: list[str] = []
    next_pid = 1

    def new_participant():
        nonlocal next_pid
        pid = f"P{next_pid:04d}"
        next_pid += 1
        participants.append(pid)
        return pid

    for day in range(n_days):
        date = start + dt.timedelta(days=day)
        # Knuth's Poisson sampler; small mean
        limit, k, prod = math.exp(-loans_per_day), 0, rng.random()
        while prod > limit:
            k += 1
            prod *= rng.random()
        for _ in range(k):
            loan_id = str(len(loans) + 1)
            if participants and rng.random() < 0.25:
                borrower = rng.choice(participants)
            else:
                borrower = new_participant()
            loans.append(LoanRecord(
                loan_id=loan_id,
                borrower_id=borrower,
                origination_date=date,
                term_months=rng.choice(TERMS),
                interest_rate=round(rng.uniform(0.09, 0.24), 4),
                principal=float(rng.randrange(10, 101) * 100),
            ))
            lenders: list[str] = []
            for _ in range(rng.randint(1, 8)):
                pool = [p for p in lend_count if p != borrower and p not in lenders]
                if pool and rng.random() < 0.7:
                    weights = [1 + lend_count[p] for p in pool]
                    lender = rng.choices(pool, weights)[0]
                else:
                    lender = new_participant()
                lenders.append(lender)
                lend_count[lender] = lend_count.get(lender, 0) + 1
            share = loans[-1].principal / len(lenders)
            for lender in lenders:
                fundings.append(FundingRecord(loan_id, lender, share))
    return loans, fundings


def write_ledger(loans, fundings, loans_path, fundings_path):
    with open(loans_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(LOAN_COLUMNS)
        for l in loans:
            w.writerow((l.loan_id, l.borrower_id, l.origination_date.isoformat(), l.term_months,
                        repr(l.interest_rate), repr(l.principal)))
    with open(fundings_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FUNDING_COLUMNS)
        for f in fundings:
            w.writerow((f.loan_id, f.lender_id, repr(f.amount)))


def regression_days(n_days: int = 1000, noise: float = 0.0, seed: int = 0,
                    coefficients=REFERENCE_COEFFICIENTS, zero_days: int = 0):
    """Synthetic ``(gamma, R, M, n)`` rows following the linear exponent model.

    ``R`` is uniform on [0.09, 0.234], ``M`` a term in months, ``n`` grows
    roughly geometrically from 5 to ~1.5e5 nodes.  ``zero_days`` extra rows
    with ``R = M = 0`` are mixed in to exercise the filter.
    """
    rng = np.random.default_rng(seed)
    c0, a, b, phi = coefficients
    R = rng.uniform(0.09, 0.234, n_days)
    M = rng.choice([3, 6, 9, 12, 15, 18, 24, 36], n_days).astype(float)
    n = np.round(5 * np.exp(np.linspace(0, math.log(151759 / 5), n_days) + rng.normal(0, 0.05, n_days)))
    n = np.maximum(n, 1)
    gamma = c0 + a * R + b * M + phi * np.log(n) + rng.normal(0, noise, n_days) * (noise > 0)
    rows = list(zip(gamma.tolist(), R.tolist(), M.tolist(), n.astype(int).tolist()))
    for i in range(zero_days):
        j = int(rng.integers(0, len(rows) + 1))
        rows.insert(j, (float(rng.uniform(1, 2)), 0.0, 0.0, int(rng.integers(5, 1000))))
    return rows
