"""Command-line entry point: ``debtnet <subcommand> ...``.

Every subcommand writes its outputs plus a ``manifest.json`` (config echo,
input and output hashes) into ``--out``.  Failures print exactly one line
``error: <kind>: <message>`` on stderr and exit non-zero.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import hashlib
import json
import logging
import sys
from pathlib import Path

from . import __version__, ledger, report, statfit
from .graph import DegreeHistogram
from .rateeq import RateEqParams, SolverError, asymptotic_pk, solve_stationary
from .sim import SamplingError, SimParams, run as run_sim

log = logging.getLogger("debtnet")

METHOD_CHOICES = ("ols0", "ols1", "ccdf")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- io helpers -------------------------------------------------------------

def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _cell(x):
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_table(out: Path, stem: str, header, rows, fmt: str) -> Path:
    if fmt == "json":
        path = out / f"{stem}.json"
        records = [dict(zip(header, row)) for row in rows]
        path.write_text(json.dumps(records, indent=1) + "\n", encoding="utf-8")
    else:
        path = out / f"{stem}.csv"
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_cell(x) for x in row])
    return path


def write_json(path: Path, obj) -> Path:
    path.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")
    return path


def read_records(directory: Path, stem: str) -> list[dict]:
    """Rows of ``stem.csv`` (or ``stem.json``) as string-valued dicts."""
    csv_path, json_path = directory / f"{stem}.csv", directory / f"{stem}.json"
    if csv_path.exists():
        with csv_path.open(newline="", encoding="utf-8") as fh:
            return list(csv.DictReader(fh))
    if json_path.exists():
        rows = json.loads(json_path.read_text(encoding="utf-8"))
        return [{k: ("" if v is None else _cell(v)) for k, v in r.items()} for r in rows]
    raise UsageError(f"missing input {csv_path}")


def _daily_rows(directory: Path) -> list[dict]:
    out = []
    for row in read_records(directory, "daily"):
        rec = {"date": dt.date.fromisoformat(row["date"])}
        for col in ledger.DAILY_COLUMNS[1:]:
            rec[col] = float(row[col]) if col in ("avg_degree", "avg_degree_added", "R", "M") else int(row[col])
        out.append(rec)
    return out


def _gamma_rows(directory: Path) -> list[dict]:
    return read_records(directory, "gamma_daily")


def _histogram(path: Path) -> DegreeHistogram:
    if path.suffix == ".json":
        rows = json.loads(path.read_text(encoding="utf-8"))
        return DegreeHistogram.from_counts({int(r["k"]): int(r["count"]) for r in rows})
    return ledger.read_histogram_csv(path)


def _find_hist(directory: Path, stem: str) -> Path:
    for suffix in (".csv", ".json"):
        if (directory / (stem + suffix)).exists():
            return directory / (stem + suffix)
    raise UsageError(f"missing histogram {directory / (stem + '.csv')}")


# -- subcommands ------------------------------------------------------------

def cmd_simulate(args, out: Path):
    try:
        params = SimParams(
            r=args.r, c=args.c, steps=args.steps, burn_in=args.burn_in, seed=args.seed,
            init_size=args.init_size, prune_isolates=args.prune_isolates,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    res = run_sim(params)
    hist = res.histogram
    method = statfit.resolve_method(args.method or "ccdf")
    k_min = 20 if args.kmin is None else args.kmin
    try:
        fit = statfit.fit_power_law(hist, method, k_min)
        emp_gamma, fit_points = fit.gamma, fit.n_points
    except statfit.FitError:
        emp_gamma, fit_points = None, 0

    outputs = [
        write_table(out, "hist", ("k", "count"), list(hist.counts.items()), args.format),
        write_table(
            out, "trace", ("step", "n", "m", "avg_degree"),
            [(int(s), int(n), int(m), 2 * int(m) / int(n))
             for s, n, m in zip(res.trace_steps, res.trace_n, res.trace_m)],
            args.format,
        ),
        write_json(out / "theory.json", {
            "r": params.r, "c": params.c, "steps": params.steps, "burn_in": params.burn_in,
            "seed": params.seed, "init_size": params.init_size,
            "prune_isolates": params.prune_isolates,
            "theoretical_gamma": res.theory.gamma,
            "theoretical_alpha": res.theory.alpha,
            "theoretical_mean_degree": res.theory.mean_degree,
            "empirical_mean_degree": res.stationary_mean_degree(),
            "final_mean_degree": hist.mean_degree(),
            "final_nodes": hist.n,
            "empirical_gamma": emp_gamma,
            "fit_method": method,
            "fit_k_min": k_min,
            "fit_points": fit_points,
            "isolated_created": res.isolated_created,
            "pruned": res.pruned,
        }),
    ]
    return [], outputs


def cmd_rateq(args, out: Path):
    try:
        params = RateEqParams(args.r, args.c, args.kmax)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    dist = solve_stationary(params)
    rows = [(0, float(dist.p[0]), "")]
    rows += [(k, float(dist.p[k]), asymptotic_pk(k, params.r)) for k in range(1, params.k_max + 1)]
    outputs = [
        write_table(out, "pk", ("k", "p_solved", "p_asymptotic"), rows, args.format),
        write_json(out / "rateq.json", {
            "r": params.r, "c": params.c, "k_max": params.k_max,
            "gamma": dist.gamma, "alpha": dist.alpha,
            "mean_degree_theory": dist.mean_degree_theory,
            "mean_degree": dist.mean_degree(), "total": dist.total(),
            "p0": float(dist.p[0]), "max_residual": dist.max_residual,
        }),
    ]
    return [], outputs


def cmd_replay(args, out: Path):
    if not args.loans or not args.fundings:
        raise UsageError("replay needs --loans and --fundings")
    inputs = [Path(args.loans), Path(args.fundings)]
    for p in inputs:
        if not p.exists():
            raise UsageError(f"missing input {p}")
    loans, fundings = ledger.parse_ledger(*inputs)
    if not loans:
        raise ledger.LedgerError("no loans")
    snaps = ledger.replay(ledger.build_events(loans), loans, fundings)
    outputs = [write_table(out, "daily", ledger.DAILY_COLUMNS, [s.row() for s in snaps], args.format)]
    if not args.no_hist:
        for s in snaps:
            outputs.append(write_table(
                out, f"hist_{s.date.isoformat()}", ("k", "count"),
                list(s.histogram.counts.items()), args.format,
            ))
    overlap = ledger.participant_overlap_report(snaps)
    outputs.append(write_table(
        out, "overlap", ledger.OVERLAP_COLUMNS,
        [(r.date.isoformat(), r.borrowers, r.lenders, r.dual) for r in overlap], args.format,
    ))
    return inputs, outputs


def _methods(args) -> list[str]:
    return [statfit.resolve_method(m) for m in (args.method or ["ols0", "ols1"])]


def cmd_fit(args, out: Path):
    if not args.input:
        raise UsageError("fit needs --input")
    src = Path(args.input)
    k_min = 1 if args.kmin is None else args.kmin
    if src.is_file():
        days = [("final", _histogram(src))]
        inputs = [src]
    elif src.is_dir():
        daily = _daily_rows(src)
        days, inputs = [], _input_files(src, ("daily",))
        for d in daily:
            path = _find_hist(src, f"hist_{d['date'].isoformat()}")
            days.append((d["date"].isoformat(), _histogram(path)))
            inputs.append(path)
    else:
        raise UsageError(f"missing input {src}")

    rows = []
    for method in _methods(args):
        for label, hist in days:
            try:
                f = statfit.fit_power_law(hist, method, k_min)
                rows.append((label, f.gamma, f.n_points, f.k_range[0], f.k_range[1], f.residual_sse, method))
            except statfit.FitError:
                rows.append((label, "", 0, "", "", "", "skip"))
    header = ("date", "gamma", "n_points", "k_min", "k_max", "sse", "method")
    outputs = [write_table(out, "gamma_daily", header, rows, args.format)]
    return inputs, outputs


def _gammas(src: Path, method: str) -> tuple[dict[dt.date, float], int]:
    gammas, skipped = {}, 0
    for row in _gamma_rows(src):
        if row["method"] == "skip":
            skipped += 1
            continue
        if row["method"] == method and row["date"] != "final":
            gammas[dt.date.fromisoformat(row["date"])] = float(row["gamma"])
    return gammas, skipped


def _input_files(src: Path, stems) -> list[Path]:
    out = []
    for stem in stems:
        for suffix in (".csv", ".json"):
            if (src / (stem + suffix)).exists():
                out.append(src / (stem + suffix))
                break
    return out


def cmd_regress(args, out: Path):
    if not args.input:
        raise UsageError("regress needs --input")
    src = Path(args.input)
    method = statfit.resolve_method((args.method or ["ols0"])[0])
    daily = _daily_rows(src)
    gammas, skipped = _gammas(src, method)
    days = [(gammas[d["date"]], d["R"], d["M"], d["n"]) for d in daily if d["date"] in gammas]
    res = statfit.regress_gamma(days)
    body = res.as_dict()
    body["method"] = method
    body["filter"]["skipped_fits"] = skipped
    body["filter"]["days_in"] = len(days)
    outputs = [write_json(out / "regression.json", body)]
    return _input_files(src, ("daily", "gamma_daily")), outputs


def cmd_report(args, out: Path):
    if not args.input:
        raise UsageError("report needs --input")
    src = Path(args.input)
    daily = _daily_rows(src)
    methods = _methods(args)
    gamma_sets = {m: _gammas(src, m)[0] for m in methods}

    t1_rows = []
    for m in methods:
        header, rows = report.gamma_by_year(gamma_sets[m])
        t1_rows += [(m, *r) for r in rows]
    outputs = [write_table(out, "gamma_by_year", ("method", *report.SUMMARY_HEADER), t1_rows, args.format)]
    outputs.append(write_table(out, "nodes_edges_by_year", *report.year_end_counts(daily), args.format))
    outputs.append(write_table(out, "avg_degree_by_year", *report.avg_degree_by_year(daily), args.format))
    sample = report.regression_sample(daily, gamma_sets[methods[0]])
    outputs.append(write_table(out, "variable_summary", *report.variable_summary(sample), args.format))
    outputs.append(write_table(out, "correlations", *report.correlation_table(sample), args.format))
    return _input_files(src, ("daily", "gamma_daily")), outputs


COMMANDS = {
    "simulate": cmd_simulate,
    "rateq": cmd_rateq,
    "replay": cmd_replay,
    "fit": cmd_fit,
    "regress": cmd_regress,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", required=True, help="output directory")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="debtnet", description="Debtor-creditor network model and ledger analysis")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", parents=[common], help="run the growth-deletion model")
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--c", type=int, required=True)
    s.add_argument("--steps", type=int, default=20000)
    s.add_argument("--burn-in", type=int, default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--init-size", type=int, default=None)
    s.add_argument("--kmin", type=int, default=None, help="tail cutoff for the exponent estimate (default 20)")
    s.add_argument("--method", choices=METHOD_CHOICES, default=None)
    s.add_argument("--prune-isolates", action="store_true",
                   help="remove nodes isolated by a deletion instead of keeping them at degree 0")

    s = sub.add_parser("rateq", parents=[common], help="solve the stationary rate equation")
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--c", type=int, required=True)
    s.add_argument("--kmax", type=int, default=5000)

    s = sub.add_parser("replay", parents=[common], help="replay a loan ledger into daily snapshots")
    s.add_argument("--loans")
    s.add_argument("--fundings")
    s.add_argument("--no-hist", action="store_true", help="skip per-day histogram files")

    for name, text in (("fit", "fit daily power-law exponents"),
                       ("regress", "regress daily exponents on rate, term and size"),
                       ("report", "write yearly summary tables")):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("--input", help="replay output directory (fit also takes a hist.csv)")
        s.add_argument("--method", choices=METHOD_CHOICES, action="append")
        if name == "fit":
            s.add_argument("--kmin", type=int, default=None)
    return p


def _config_echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("verbose", "out")}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        inputs, outputs = COMMANDS[args.command](args, out)
        write_json(out / "manifest.json", {
            "command": args.command,
            "version": __version__,
            "config": _config_echo(args),
            "inputs": {str(p): _sha256(p) for p in inputs},
            "outputs": {p.name: _sha256(p) for p in outputs},
        })
    except UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return 2
    except (ledger.LedgerError, statfit.FitError, SolverError, SamplingError, ValueError, OSError) as exc:
        kind = type(exc).__name__
        msg = str(exc).replace("\n", " ")
        print(f"error: {kind}: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
