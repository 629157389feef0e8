"""Command-line entry point: ``hyperham <subcommand> ...``.

CSV outputs start with a ``# schema=1`` line. The ``seconds`` column holds
wall time and is the only column allowed to differ between identical runs.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import formulas
from .graph import (KGraph, PartiteView, format_instance, min_codegree, parse_partition,
                    read_instance, validate_ell_cycle)
from .matching import estimate_mindeg_probability
from .models import FAMILIES, GenSpec, gen_complete, gen_dirac, gen_binomial, generate
from .oracle import CYCLE_LIMIT_N, LimitExceeded, count_ham_ell_cycles
from .pipeline import InfeasibleParams, sample_ham_cycles

SCHEMA = "# schema=1"
TIMING_COLUMNS = ("seconds",)

log = logging.getLogger("hyperham")


class ArgError(Exception):
    """Bad arguments; exit status 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        sys.stderr.write(f"E: {message}\n")
        raise SystemExit(2)


def stable_region(text: str) -> str:
    """CSV text with timing columns removed, for run-to-run comparison."""
    lines = text.splitlines()
    out, drop = [], None
    for row in csv.reader(lines):
        if row and row[0].startswith("#"):
            out.append(row)
            drop = None
            continue
        if drop is None:
            drop = {i for i, name in enumerate(row) if name in TIMING_COLUMNS}
        out.append([c for i, c in enumerate(row) if i not in drop])
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(out)
    return buf.getvalue()


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(round(x, 12))
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, bool):
        return "1" if x else "0"
    return str(x)


class Table:
    def __init__(self, columns: Sequence[str]):
        self.columns = list(columns)
        self.rows: list[list] = []

    def add(self, **values):
        self.rows.append([values[c] for c in self.columns])

    def render(self, fmt: str) -> str:
        buf = io.StringIO()
        if fmt == "csv":
            buf.write(SCHEMA + "\n")
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(self.columns)
            for r in self.rows:
                w.writerow([_fmt(x) for x in r])
        else:
            for r in self.rows:
                buf.write(" ".join(f"{c}={_fmt(x)}" for c, x in zip(self.columns, r)) + "\n")
        return buf.getvalue()


def _emit(args, text: str) -> None:
    if args.out and args.out != "-":
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _seed(args) -> int:
    if args.seed is None:
        args.seed = int(np.random.SeedSequence().entropy % 2**32)
        sys.stderr.write(f"# seed={args.seed}\n")
    return args.seed


def _load(path: str) -> KGraph:
    try:
        return read_instance(path)
    except FileNotFoundError:
        raise ArgError(f"no such instance file: {path}") from None


# -- subcommands --------------------------------------------------------------

def cmd_gen(args) -> int:
    seed = _seed(args)
    spec = GenSpec(args.family, args.n, args.k, p=args.p, delta=args.delta,
                   eps=Fraction(args.eps) if args.eps is not None else None, seed=seed)
    H = generate(spec)
    head = f"# family={spec.family} n={spec.n} k={spec.k} seed={seed}"
    for name in ("p", "delta", "eps"):
        if getattr(args, name) is not None:
            head += f" {name}={getattr(args, name)}"
    _emit(args, head + "\n" + format_instance(H))
    return 0


def cmd_oracle(args) -> int:
    table = Table(["instance", "n", "k", "ell", "distinct", "orderings", "seconds"])
    for path in args.instances:
        H = _load(path)
        t0 = time.perf_counter()
        census = count_ham_ell_cycles(H, args.ell, limit=args.limit_n, workers=args.workers)
        table.add(instance=Path(path).name, n=H.n, k=H.k, ell=args.ell,
                  distinct=census.distinct_cycles, orderings=census.orderings,
                  seconds=round(time.perf_counter() - t0, 3))
    _emit(args, table.render(args.format or "csv"))
    return 0


def cmd_formula(args) -> int:
    n, k, ell = args.n, args.k, args.ell
    rows = Table(["quantity", "n", "k", "ell", "value", "reliable"])
    if args.psi:
        v = formulas.psi(n, k, ell)
        rows.add(quantity="psi", n=n, k=k, ell=ell, value=v.value, reliable=v.reliable)
    if args.ck:
        rows.add(quantity="c_k_ell", n="", k=k, ell=ell, value=formulas.c_k_ell(k, ell), reliable=True)
    if args.dirac_log:
        if args.delta is None:
            raise ArgError("--dirac-log needs --delta")
        b = formulas.dirac_lower_bound_log(n, k, ell, args.delta, args.slack)
        rows.add(quantity="dirac_lower_bound_log", n=n, k=k, ell=ell, value=b.log_value, reliable=True)
    if args.gnp_log:
        if args.p is None:
            raise ArgError("--gnp-log needs --p")
        rows.add(quantity="gnp_expected_log", n=n, k=2, ell=1,
                 value=formulas.gnp_expected_ham_log(n, args.p), reliable=True)
    if not rows.rows:
        raise ArgError("choose at least one of --psi, --ck, --dirac-log, --gnp-log")
    fmt = args.format or "plain"
    if fmt == "plain":
        _emit(args, "".join(_fmt(r[4]) + "\n" for r in rows.rows))
    else:
        _emit(args, rows.render("csv"))
    return 0


def cmd_bpi(args) -> int:
    seed = _seed(args)
    H = _load(args.instance)
    parts = parse_partition(Path(args.partition).read_text())
    if len(parts) != H.k:
        raise ArgError(f"partition has {len(parts)} parts, need k={H.k}")
    view = PartiteView.equi(H, parts)
    # the fixed prefix is the listed order of parts 1..k-2
    prefix = [parts[i] for i in range(H.k - 2)]
    t0 = time.perf_counter()
    est = estimate_mindeg_probability(view, prefix, args.eps, args.trials, seed, args.workers)
    secs = round(time.perf_counter() - t0, 3)
    summary = Table(["m", "eps", "trials", "seed", "delta_star", "threshold", "successes",
                     "probability", "vacuous", "seconds"])
    summary.add(m=view.m, eps=args.eps, trials=est.trials, seed=seed, delta_star=est.delta_star,
                threshold=est.threshold, successes=est.successes, probability=est.probability,
                vacuous=est.vacuous, seconds=secs)
    hist = Table(["min_degree", "count"])
    for d, c in est.histogram().items():
        hist.add(min_degree=d, count=c)
    fmt = args.format or "csv"
    text = summary.render(fmt)
    text += ("# histogram\n" + hist.render(fmt).split("\n", 1)[1]) if fmt == "csv" else hist.render(fmt)
    _emit(args, text)
    return 0


SUMMARY_COLUMNS = ["seed", "n", "k", "ell", "m", "t", "requested", "found", "cs_attempts",
                   "cs_resamples", "eta", "samples", "partition_attempts", "path_failures",
                   "connector_failures", "repeats", "violations", "dstar_min",
                   "connectors_predicted", "seconds"]


def pipeline_summary(H: KGraph, ell: int, seed: int, result, seconds: float) -> Table:
    d = result.diagnostics
    P = d.params
    t = Table(SUMMARY_COLUMNS)
    t.add(seed=seed, n=H.n, k=H.k, ell=ell, m=P.m, t=P.t, requested=result.requested,
          found=len(result.cycles), cs_attempts=d.cs_attempts, cs_resamples=d.cs_resamples,
          eta=d.eta, samples=d.samples, partition_attempts=d.partition_attempts,
          path_failures=d.path_failures, connector_failures=d.connector_failures,
          repeats=d.repeats, violations=d.violations,
          dstar_min=min(d.dstar) if d.dstar else "",
          connectors_predicted=f"{d.connectors_predicted}/{d.connectors_total}",
          seconds=round(seconds, 3))
    return t


def _verify(H: KGraph, ell: int, path: str) -> int:
    bad = total = 0
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        # skip comments and CSV rows; cycle lines are space-separated integers
        if not line or line.startswith("#") or "," in line:
            continue
        order = [int(x) for x in line.split()]
        total += 1
        try:
            check = validate_ell_cycle(H, order, ell)
            ok = check.ok and check.spanning
        except ValueError:
            ok = False
        if not ok:
            bad += 1
            sys.stderr.write(f"E: line {lineno}: not a Hamiltonian {ell}-cycle\n")
    sys.stdout.write(f"verified {total - bad}/{total}\n")
    return 0 if bad == 0 and total else 1


def cmd_pipeline(args) -> int:
    H = _load(args.instance)
    if args.verify:
        return _verify(H, args.ell, args.verify)
    seed = _seed(args)
    t0 = time.perf_counter()
    result = sample_ham_cycles(H, args.ell, args.count, seed, target_m=args.m, target_t=args.t,
                               eta_target=args.eta, dstar_threshold=args.dstar_threshold,
                               workers=args.workers)
    secs = time.perf_counter() - t0
    cycles = "".join(" ".join(map(str, c.ordering)) + "\n" for c in result.cycles)
    summary = pipeline_summary(H, args.ell, seed, result, secs).render(args.format or "csv")
    if args.cycles:
        Path(args.cycles).write_text(cycles)
        _emit(args, summary)
    elif args.out and args.out != "-":
        sys.stdout.write(cycles)
        _emit(args, summary)
    else:
        sys.stdout.write(cycles + summary)
    if not result.complete:
        sys.stderr.write(f"E: {result.diagnostics.failure}\n")
        return 1
    return 0


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x]


def _ints(text: str) -> list[int]:
    out = []
    for tok in text.split(","):
        if "-" in tok:
            a, b = tok.split("-")
            out.extend(range(int(a), int(b) + 1))
        elif tok:
            out.append(int(tok))
    return out


def cmd_scan(args) -> int:
    seed = _seed(args)
    ns = _ints(args.ns)
    params = _floats(args.values) if args.values else [1.0]
    step = args.k - args.ell
    cells = [(n, v) for n in ns for v in params if n % step == 0 and n >= args.k]
    too_big = [n for n, _ in cells if n > args.limit_n]
    if too_big:
        raise ArgError(f"n={max(too_big)} exceeds the oracle limit {args.limit_n}; "
                       f"raise --limit-n or shrink the grid")
    if not cells:
        raise ArgError("no feasible cells: n must be a multiple of k-ell and at least k")
    table = Table(["family", "n", "k", "ell", "param", "seed", "min_codegree", "distinct",
                   "psi", "predicted", "ratio", "seconds"])
    for n, v in cells:
        if args.family == "complete":
            H = gen_complete(n, args.k)
        elif args.family == "binomial":
            H = gen_binomial(n, args.k, v, seed)
        else:
            H = gen_dirac(n, args.k, v, seed).graph
        t0 = time.perf_counter()
        census = count_ham_ell_cycles(H, args.ell, limit=args.limit_n, workers=args.workers)
        secs = round(time.perf_counter() - t0, 3)
        ps = formulas.psi(n, args.k, args.ell)
        predicted = float(ps.value) * v ** (n // step)
        table.add(family=args.family, n=n, k=args.k, ell=args.ell, param=v, seed=seed,
                  min_codegree=min_codegree(H), distinct=census.distinct_cycles, psi=ps.value,
                  predicted=predicted,
                  ratio=census.distinct_cycles / predicted if predicted else float("nan"),
                  seconds=secs)
    _emit(args, table.render(args.format or "csv"))
    return 0


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="seed for randomized steps (generated and reported if omitted)")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--limit-n", type=int, default=CYCLE_LIMIT_N,
                        help="largest n the exhaustive oracle accepts")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "plain"), default=None)
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="hyperham", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", parents=[common], help="generate an instance")
    g.add_argument("--family", choices=FAMILIES, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, default=3)
    g.add_argument("--p", type=float)
    g.add_argument("--delta", type=float)
    g.add_argument("--eps", type=str, help="e.g. 1/9")
    g.set_defaults(func=cmd_gen)

    o = sub.add_parser("oracle", parents=[common], help="count Hamiltonian ℓ-cycles exactly")
    o.add_argument("instances", nargs="+")
    o.add_argument("--ell", type=int, required=True)
    o.set_defaults(func=cmd_oracle)

    f = sub.add_parser("formula", parents=[common], help="evaluate closed forms")
    f.add_argument("--psi", action="store_true")
    f.add_argument("--ck", action="store_true")
    f.add_argument("--dirac-log", action="store_true")
    f.add_argument("--gnp-log", action="store_true")
    f.add_argument("--n", type=int, default=0)
    f.add_argument("--k", type=int, default=3)
    f.add_argument("--ell", type=int, default=1)
    f.add_argument("--delta", type=float)
    f.add_argument("--p", type=float)
    f.add_argument("--slack", type=float, default=1.0)
    f.set_defaults(func=cmd_formula)

    b = sub.add_parser("bpi", parents=[common], help="min-degree concentration of B_π")
    b.add_argument("instance")
    b.add_argument("--partition", required=True, help="file with one part per line")
    b.add_argument("--eps", type=float, default=0.1)
    b.add_argument("--trials", type=int, default=200)
    b.set_defaults(func=cmd_bpi)

    q = sub.add_parser("pipeline", parents=[common], help="sample distinct Hamiltonian ℓ-cycles")
    q.add_argument("instance")
    q.add_argument("--ell", type=int, default=1)
    q.add_argument("--count", type=int, default=1)
    q.add_argument("--m", type=int, default=2, help="target number of paths")
    q.add_argument("--t", type=int, default=5, help="target connector block size")
    q.add_argument("--eta", type=float, default=0.2)
    q.add_argument("--dstar-threshold", type=float, default=0.0)
    q.add_argument("--cycles", help="write cycle lines here instead of stdout")
    q.add_argument("--verify", metavar="FILE", help="re-validate cycle lines from FILE and exit")
    q.set_defaults(func=cmd_pipeline)

    s = sub.add_parser("scan", parents=[common], help="oracle vs formula over a grid")
    s.add_argument("--family", choices=("complete", "binomial", "dirac_rejection"), default="binomial")
    s.add_argument("--ns", required=True, help="e.g. 6,9 or 6-9")
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--ell", type=int, default=1)
    s.add_argument("--values", help="comma-separated p (binomial) or delta (dirac) values")
    s.set_defaults(func=cmd_scan)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ArgError as exc:
        sys.stderr.write(f"E: {exc}\n")
        return 2
    except (LimitExceeded, InfeasibleParams) as exc:
        sys.stderr.write(f"E: {exc}\n")
        return 2
    except Exception as exc:  # noqa: BLE001 - report, don't trace
        sys.stderr.write(f"E: {type(exc).__name__}: {exc}\n")
        return 1


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
