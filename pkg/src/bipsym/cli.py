"""Command line entry point: ``bipsym <subcommand> ...``.

Exit status is 0 on success, 1 when a computed object fails its own
verification, and 2 on bad arguments or inputs outside a routine's domain.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bn_seq, enumeration, extremal, sampling, stabilizer, sync_witness
from .errors import BipsymError, VerificationFailed
from .matrix_core import format_matrix, matrix_to_json, read_matrix

DEFAULT_SEED = 20240917
DEFAULT_COUNT_STATS_BUDGET = 200_000

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    subcommand: str
    output: str
    seed: int
    workers: int
    budget: int


def _emit_json(obj) -> str:
    return json.dumps(obj) + "\n"


def _emit_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit_kv(pairs) -> str:
    return "".join(f"{k}: {v}\n" for k, v in pairs)


def _render(fmt: str, record: dict) -> str:
    """One flat record in the requested format."""
    if fmt == "json":
        return _emit_json(record)
    if fmt == "csv":
        return _emit_csv(list(record), [[_cell(v) for v in record.values()]])
    return _emit_kv((k, _cell(v)) for k, v in record.items())


def _cell(v) -> str:
    if isinstance(v, (list, tuple)):
        return json.dumps(v)
    return str(v)


def _rows(N) -> list[list[int]]:
    return [list(r) for r in N.entries]


# ---------------------------------------------------------------------------
# subcommands; each returns (text, exit status)

def cmd_chi(args, cfg: RunConfig):
    record: dict = {"k": args.k, "l": args.l}
    status = EXIT_OK
    formula = None
    try:
        formula = extremal.chi_formula(args.k, args.l)
        record["chi"] = str(formula)
    except BipsymError:
        if not args.oracle:
            raise
    if args.construct:
        if args.l == 2:
            N, tag = extremal.cycle_minimizer(args.k), "cycle"
        else:
            m = extremal.construct_minimizer(args.k, args.l, seed=cfg.seed)
            N, tag = m.matrix, m.provenance
        rep = stabilizer.stabilizer(N)
        ok = rep.aut_order == formula and (rep.partwise_fixed or args.l == 2)
        record.update(construction=tag, construction_aut=str(rep.aut_order),
                      partwise_fixed=rep.partwise_fixed, construction_ok=ok, matrix=_rows(N))
        status = status if ok else EXIT_FAILED
    if args.oracle:
        value, witness = enumeration.chi_oracle(args.k, args.l, budget=cfg.budget)
        record.update(oracle=str(value), oracle_witness=_rows(witness))
        if formula is not None:
            record["oracle_ok"] = value == formula
            status = status if value == formula else EXIT_FAILED
    if cfg.output == "text" and set(record) == {"k", "l", "chi"}:
        return record["chi"] + "\n", status
    return _render(cfg.output, record), status


def cmd_mu(args, cfg: RunConfig):
    value = extremal.mu_formula(args.k, args.l)
    record: dict = {"k": args.k, "l": args.l, "mu": str(value)}
    status = EXIT_OK
    if args.oracle:
        got, witness = enumeration.mu_oracle(args.k, args.l, budget=cfg.budget)
        record.update(oracle=str(got), oracle_witness=_rows(witness), oracle_ok=got == value)
        status = EXIT_OK if got == value else EXIT_FAILED
    if cfg.output == "text" and not args.oracle:
        return f"{value}\n", status
    return _render(cfg.output, record), status


def cmd_construct(args, cfg: RunConfig):
    if args.l == 2:
        N, tag = extremal.cycle_minimizer(args.k), "cycle"
    else:
        m = extremal.construct_minimizer(args.k, args.l, seed=cfg.seed)
        N, tag = m.matrix, m.provenance
    rep = stabilizer.stabilizer(N)
    if cfg.output == "text":
        head = f"# provenance {tag}; |K_N| = {rep.order_KN}; |Aut| = {rep.aut_order}\n"
        return head + format_matrix(N), EXIT_OK
    record = {"provenance": tag, "order_KN": rep.order_KN, "aut_order": str(rep.aut_order),
              "matrix": matrix_to_json(N)}
    if cfg.output == "csv":
        return _emit_csv([f"c{j + 1}" for j in range(N.k)], _rows(N)), EXIT_OK
    return _emit_json(record), EXIT_OK


def cmd_stab(args, cfg: RunConfig):
    N = read_matrix(args.matrix)
    rep = stabilizer.stabilizer(N, generators=args.generators)
    if cfg.output == "text":
        lines = [f"order_KN: {rep.order_KN}", f"partwise_fixed: {rep.partwise_fixed}",
                 f"aut_order: {rep.aut_order}"]
        for g in rep.generators or []:
            j = g.to_json()
            lines.append(f"generator: rho={j['rho']} gamma={j['gamma']}")
        return "\n".join(lines) + "\n", EXIT_OK
    return _emit_json(rep.to_json()), EXIT_OK


def cmd_enumerate(args, cfg: RunConfig):
    stats = enumeration.enumerate_matrices(args.k, args.l, budget=cfg.budget,
                                           with_symmetry=args.stats, workers=cfg.workers)
    record = stats.to_json()
    if not args.stats:
        record = {"k": args.k, "l": args.l, "count": record["count"]}
    if cfg.output == "json":
        return _emit_json(record), EXIT_OK
    return _render(cfg.output, record), EXIT_OK


def cmd_count(args, cfg: RunConfig):
    header = ["l", f"H_{args.k}(l)", "min_aut", "max_aut", "trivial_KN_fraction", "factexp_ratio"]
    rows = []
    for l in range(args.lmax + 1):
        h = enumeration.count_matrices(args.k, l)
        row = [l, h, "", "", "", ""]
        if h <= args.stats_budget:
            s = enumeration.enumerate_matrices(args.k, l, workers=cfg.workers)
            row[2:] = [s.min_aut, s.max_aut, f"{s.trivial_KN_fraction:.6f}", str(s.factexp_ratio(12))]
        rows.append(row)
    status = EXIT_OK
    fit = None
    if args.fit:
        fit = enumeration.stanley_fit(args.k, max(args.lmax, (args.k - 1) ** 2))
        status = EXIT_OK if fit.held_out_ok else EXIT_FAILED
    if cfg.output == "json":
        out = {"k": args.k, "rows": [dict(zip(header, map(str, r))) for r in rows]}
        if fit:
            out["fit"] = {"degree": fit.degree, "coefficients": [str(c) for c in fit.coefficients],
                          "predicted_next": str(fit.predicted_next), "actual_next": str(fit.actual_next),
                          "held_out_ok": fit.held_out_ok}
        return _emit_json(out), status
    text = _emit_csv(header, rows)
    if fit:
        text += (f"# fit degree {fit.degree}; coefficients (ascending) "
                 f"{' '.join(str(c) for c in fit.coefficients)}\n"
                 f"# H_{args.k}({len(fit.data)}) predicted {fit.predicted_next}, "
                 f"actual {fit.actual_next}, held_out_ok {fit.held_out_ok}\n")
    return text, status


def cmd_sample(args, cfg: RunConfig):
    rng = np.random.default_rng(cfg.seed)
    if args.stat is None:
        batch, proposed = sampling.sample_batch(args.k, args.l, args.n, rng)
        if cfg.output == "json":
            return _emit_json({"k": args.k, "l": args.l, "proposed": proposed,
                               "samples": batch.tolist()}), EXIT_OK
        if cfg.output == "text":
            return "\n".join(format_matrix_array(X, args.l) for X in batch), EXIT_OK
        k = args.k
        header = [f"x{i + 1}{j + 1}" for i in range(k) for j in range(k)]
        return _emit_csv(header, [X.ravel().tolist() for X in batch]), EXIT_OK
    if args.stat == "rate":
        rep = sampling.acceptance_rate(args.k, args.l, args.n, rng, workers=cfg.workers)
    elif args.stat == "dev":
        rep = sampling.deviation_statistic(args.k, args.l, args.n, args.fexp, rng, workers=cfg.workers)
    else:
        rep = sampling.symmetry_statistics(args.k, args.l, args.n, rng, eps=args.eps, workers=cfg.workers)
    record = rep.to_json()
    if cfg.output == "json":
        return _emit_json(record), EXIT_OK
    return _render(cfg.output, record), EXIT_OK


def format_matrix_array(X, l: int) -> str:
    return f"{X.shape[0]} {l}\n" + "".join(" ".join(str(v) for v in row) + "\n" for row in X.tolist())


def cmd_bn(args, cfg: RunConfig):
    table = bn_seq.bn_recurrence(args.nmax)
    values = [str(v) for v in table.values]
    status = EXIT_OK
    summary = {}
    if args.verify:
        comps = bn_seq.verify_comps_bound(args.nmax, table) if args.nmax >= 1 else []
        prod = bn_seq.verify_prodmin(range(17, args.nmax + 1)) if args.nmax >= 17 else []
        direct_upto = min(args.nmax, 40)
        direct = [n for n in range(direct_upto + 1) if bn_seq.bn_direct(n) != table[n]]
        summary = {"comps_bound_violations": comps, "prodmin_violations": [list(v) for v in prod],
                   "direct_mismatches": direct, "direct_checked_upto": direct_upto}
        if comps or prod or direct:
            status = EXIT_FAILED
    if cfg.output == "json":
        return _emit_json({"values": values, **summary}), status
    if cfg.output == "csv":
        return _emit_csv(["n", "b_n"], list(enumerate(values))), status
    text = "\n".join(values) + "\n"
    if args.verify:
        text += "".join(f"# {k}: {v}\n" for k, v in summary.items())
    return text, status


def cmd_sync(args, cfg: RunConfig):
    try:
        w = sync_witness.verify_witness(args.k, args.l, x=args.x, method=args.method, seed=cfg.seed)
    except VerificationFailed as exc:
        return f"verification failed: {exc}\n", EXIT_FAILED
    if args.emit_witness:
        Path(args.emit_witness).write_text(sync_witness.format_witness(w))
    record = w.to_json()
    if cfg.output == "json":
        return _emit_json(record), EXIT_OK
    flat = {k: v for k, v in record.items() if k != "checks"}
    flat.update({f"check_{k}": v for k, v in record["checks"].items()})
    return _render(cfg.output, flat), EXIT_OK


# ---------------------------------------------------------------------------

def _positive(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _nonneg(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("text", "json", "csv"), default=None)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--workers", type=_positive, default=1)
    common.add_argument("--budget", type=_positive, default=enumeration.DEFAULT_BUDGET,
                        help="maximum number of matrices an enumeration may visit")

    p = argparse.ArgumentParser(prog="bipsym", description="Symmetries of regular bipartite multigraphs.")
    sub = p.add_subparsers(dest="subcommand", required=True)

    def kl(sp):
        sp.add_argument("--k", type=_positive, required=True)
        sp.add_argument("--l", type=_nonneg, required=True)

    sp = sub.add_parser("chi", parents=[common], help="minimum |Aut| (closed form, construction, oracle)")
    kl(sp)
    sp.add_argument("--construct", action="store_true")
    sp.add_argument("--oracle", action="store_true")
    sp.set_defaults(func=cmd_chi)

    sp = sub.add_parser("mu", parents=[common], help="maximum |Aut|")
    kl(sp)
    sp.add_argument("--oracle", action="store_true")
    sp.set_defaults(func=cmd_mu)

    sp = sub.add_parser("construct", parents=[common], help="explicit partwise-fixed minimizer")
    kl(sp)
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("stab", parents=[common], help="stabilizer of a matrix read from a file")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--generators", action="store_true")
    sp.set_defaults(func=cmd_stab, default_output="json")

    sp = sub.add_parser("enumerate", parents=[common], help="enumerate all intersection matrices")
    kl(sp)
    sp.add_argument("--stats", action="store_true")
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("count", parents=[common], help="H_k(l) table, optional polynomial fit")
    sp.add_argument("--k", type=_positive, required=True)
    sp.add_argument("--lmax", type=_nonneg, required=True)
    sp.add_argument("--fit", action="store_true")
    sp.add_argument("--stats-budget", type=_nonneg, default=DEFAULT_COUNT_STATS_BUDGET,
                    help="fill the symmetry columns only when H_k(l) is at most this")
    sp.set_defaults(func=cmd_count, default_output="csv")

    sp = sub.add_parser("sample", parents=[common], help="uniform samples and Monte Carlo statistics")
    kl(sp)
    sp.add_argument("--n", type=_positive, required=True)
    sp.add_argument("--stat", choices=("dev", "sym", "rate"))
    sp.add_argument("--fexp", type=float, default=0.5)
    sp.add_argument("--eps", type=float, default=0.5)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("bn", parents=[common], help="b_n table and its bounds")
    sp.add_argument("--nmax", type=_nonneg, required=True)
    sp.add_argument("--verify", action="store_true")
    sp.set_defaults(func=cmd_bn)

    sp = sub.add_parser("sync", parents=[common], help="clique / colouring witness on partitions")
    kl(sp)
    sp.add_argument("--x", type=_positive, default=1)
    sp.add_argument("--method", choices=("flow", "backtrack"), default="flow")
    sp.add_argument("--emit-witness", metavar="FILE")
    sp.set_defaults(func=cmd_sync)
    return p


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    output = args.output or getattr(args, "default_output", "text")
    cfg = RunConfig(args.subcommand, output, args.seed, args.workers, args.budget)
    try:
        text, status = args.func(args, cfg)
    except BipsymError as exc:
        print(f"bipsym {args.subcommand}: {exc}", file=sys.stderr)
        return EXIT_FAILED if isinstance(exc, VerificationFailed) else EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"bipsym {args.subcommand}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    stdout.write(text)
    return status
