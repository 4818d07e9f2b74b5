"""Command-line front end.

Subcommands: ``curves``, ``simulate``, ``validate``, ``date``, ``estimate``,
``sweep``. Exit status is 0 on success, 2 on usage errors and 1 on data or
domain errors (reported as a single line on stderr).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import analytics, dataio, estimation, metrics, simulator
from .errors import LexiclockError

PARAM_FLAGS = {
    "lam": "lambda",
    "mu": "mu",
    "n_eff": "n_eff",
    "l_eff": "l_eff",
    "m": "m",
    "theta": "theta",
}


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _nonneg_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def _finite(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text!r}")
    return value


def _nonneg(text):
    value = _finite(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative number, got {value}")
    return value


def _positive(text):
    value = _finite(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {value}")
    return value


def _unit(text):
    value = _finite(text)
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"expected a value in [0, 1], got {value}")
    return value


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model parameters (override config)")
    S = argparse.SUPPRESS
    g.add_argument("--lambda", dest="lam", type=_nonneg, default=S, help="word replacement rate per year")
    g.add_argument("--mu", type=_nonneg, default=S, help="character redraw rate per year")
    g.add_argument("--n-eff", type=_positive, default=S, help="effective alphabet size")
    g.add_argument("--l-eff", type=_positive, default=S, help="effective word length")
    g.add_argument("--m", type=_positive_int, default=S, help="number of concepts")
    g.add_argument("--theta", type=_unit, default=S, help="cognacy threshold on normalized Levenshtein")
    common.add_argument("--seed", type=_nonneg_int, default=0)
    common.add_argument("--threads", type=_positive_int, default=1)
    common.add_argument("--config", default=None, help="JSON config (default: $LEXICLOCK_CONFIG)")
    common.add_argument("-o", "--output", default=None, help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="lexiclock",
        description="Lexicon evolution: error curves, simulation, dating and rate estimation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curves", parents=[common], help="relative dating errors on a time grid")
    p.add_argument("--t-min", type=_positive, default=300.0)
    p.add_argument("--t-max", type=_positive, default=6000.0)
    p.add_argument("--step", type=_positive, default=100.0)

    p = sub.add_parser("simulate", parents=[common], help="simulate one language pair or a dataset")
    p.add_argument("--t", type=_nonneg, default=1000.0, help="separation time in years")
    p.add_argument("--n-sym", type=_positive_int, default=5)
    p.add_argument("--l-word", type=_positive_int, default=8)
    p.add_argument("--sampler", choices=("events", "endpoint"), default="events")
    p.add_argument("--clades", default=None, help="comma-separated clade sizes: simulate a dataset")
    p.add_argument("--t-root", type=_positive, default=1350.0)
    p.add_argument("--stem", type=_nonneg, default=0.0, help="years shared within a clade")
    p.add_argument("--lists-out", default=None)
    p.add_argument("--meta-out", default=None)

    p = sub.add_parser("validate", parents=[common], help="Monte Carlo check of the closed-form moments")
    p.add_argument("--t", type=_nonneg, default=1000.0)
    p.add_argument("--replicates", type=_positive_int, default=10000)
    p.add_argument("--n-sym", type=_positive_int, default=5)
    p.add_argument("--l-word", type=_positive_int, default=8)
    p.add_argument("--sampler", choices=("events", "endpoint"), default="endpoint")

    p = sub.add_parser("date", parents=[common], help="date a separation from statistics or word lists")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--omega", type=_finite)
    src.add_argument("--phi", type=_finite)
    src.add_argument("--varphi", type=_finite)
    src.add_argument("--ancestor", type=_finite, help="surviving fraction against the ancestor")
    src.add_argument("--lists", nargs=2, metavar=("A_TSV", "B_TSV"))
    src.add_argument("--dataset", nargs=2, metavar=("LISTS_TSV", "META_CSV"))
    p.add_argument("--pair", nargs=2, metavar=("VARIETY_A", "VARIETY_B"))
    p.add_argument("--metric", choices=("auto", "levenshtein"), default="auto")

    for name, helptext in (
        ("estimate", "effective N, L and rates lambda, mu from a dataset"),
        ("sweep", "lambda(g) and mu_hat(g) over distance thresholds"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--lists", required=True, help="word table (TSV)")
        p.add_argument("--meta", required=True, help="variety metadata (CSV)")
        p.add_argument("--metric", choices=("auto", "levenshtein"), default="auto")
        p.add_argument("--min-pairs", type=_positive_int, default=estimation.MIN_PAIRS)
        if name == "estimate":
            p.add_argument("--t-root", type=_positive, default=None)
            p.add_argument("--g", type=_nonneg, default=0.0)
        else:
            p.add_argument("--t-root", type=_positive, required=True)
            p.add_argument("--g-min", type=_nonneg, default=0.0)
            p.add_argument("--g-max", type=_nonneg, default=1500.0)
            p.add_argument("--step", type=_positive, default=100.0)
    return parser


def _config(args) -> dict:
    cfg = dataio.load_config(args.config)
    for attr, key in PARAM_FLAGS.items():
        if hasattr(args, attr):
            cfg[key] = getattr(args, attr)
    return cfg


def _params(cfg) -> analytics.EvolutionParams:
    return analytics.EvolutionParams.from_mapping(cfg)


def _fmt(value) -> str:
    return dataio.format_number(value)


def cmd_curves(args, cfg):
    rows = analytics.error_curves(_params(cfg), args.t_min, args.t_max, args.step)
    dataio.write_results(rows, args.output, args.format)


def cmd_simulate(args, cfg):
    if args.clades:
        try:
            sizes = tuple(int(s) for s in args.clades.split(","))
        except ValueError:
            raise LexiclockError(f"--clades must be comma-separated integers, got {args.clades!r}") from None
        if not args.lists_out or not args.meta_out:
            raise LexiclockError("--clades needs --lists-out and --meta-out")
        ds = simulator.simulate_dataset(
            cfg["lambda"], cfg["mu"], args.n_sym, args.l_word, cfg["m"], args.t_root,
            sizes, seed=args.seed, stem=args.stem,
        )
        dataio.write_dataset(ds, args.lists_out, args.meta_out)
        return
    p = simulator.SimParams(cfg["lambda"], cfg["mu"], args.n_sym, args.l_word, cfg["m"], args.t, args.seed)
    sampler = simulator.evolve_pair_events if args.sampler == "events" else simulator.evolve_pair_endpoint
    sample = sampler(p)
    columns = ["concept", "word_a", "word_b", "tag_a", "tag_b", "cognate"]
    rows = [
        [
            i,
            simulator.symbols_to_word(sample.symbols_a[i]),
            simulator.symbols_to_word(sample.symbols_b[i]),
            int(sample.tags_a[i]),
            int(sample.tags_b[i]),
            bool(sample.cognacy[i]),
        ]
        for i in range(p.m)
    ]
    dataio.write_results(rows, args.output, args.format, columns)


def cmd_validate(args, cfg):
    p = simulator.SimParams(cfg["lambda"], cfg["mu"], args.n_sym, args.l_word, cfg["m"], args.t, args.seed)
    mc = simulator.monte_carlo(p, args.replicates, args.sampler == "endpoint", args.threads)
    ref = simulator.analytic_reference(p)
    if args.format == "json":
        out = mc.to_dict()
        out["analytic"] = {k: {"mean": v.mean, "var": v.variance} for k, v in ref.items()}
        dataio.emit_text(json.dumps(out, indent=2) + "\n", args.output)
        return
    lines = [
        f"# sampler={mc.sampler} replicates={mc.replicates} seed={p.seed} t={_fmt(p.t)} "
        f"lambda={_fmt(p.lam)} mu={_fmt(p.mu)} n_sym={p.n_sym} l_word={p.l_word} m={p.m}",
        "stat,analytic_mean,sample_mean,se,z,analytic_var,sample_var,var_rel_diff",
    ]
    for name in simulator.STATISTICS:
        s, r = mc.stats[name], ref[name]
        z = (s.mean - r.mean) / s.se if s.se > 0 else 0.0
        rel = s.var / r.variance - 1.0 if r.variance > 0 else None
        lines.append(",".join(_fmt(v) for v in (name, r.mean, s.mean, s.se, z, r.variance, s.var, rel)))
    gap_z = mc.additivity_gap / mc.additivity_se if mc.additivity_se > 0 else 0.0
    lines.append(
        f"# var(phi)-var(varphi)-var(chi) = {_fmt(mc.additivity_gap)} "
        f"(se {_fmt(mc.additivity_se)}, z {_fmt(gap_z)})"
    )
    dataio.emit_text("\n".join(lines) + "\n", args.output)


def _date_rows(params, values):
    rows = []
    for method, value in values:
        try:
            r = analytics.date_from_statistic(value, params, method)
            rows.append([method, value, r.t_hat, r.t_lower, r.t_upper, "ok"])
        except LexiclockError as exc:
            if len(values) == 1:
                raise
            rows.append([method, value, None, None, None, type(exc).__name__])
    return rows


def cmd_date(args, cfg):
    params = _params(cfg)
    columns = ["method", "statistic", "t_hat", "t_lower", "t_upper", "status"]
    for method in analytics.DATING_METHODS:
        value = getattr(args, method)
        if value is not None:
            dataio.write_results(_date_rows(params, [(method, value)]), args.output, args.format, columns)
            return
    if args.lists:
        ca, wa = dataio.load_word_list(args.lists[0])
        cb, wb = dataio.load_word_list(args.lists[1])
        index_b = {c: k for k, c in enumerate(cb)}
        shared = [c for c in ca if c in index_b]
        if not shared:
            raise LexiclockError("the two lists share no concept")
        a = [wa[ca.index(c)] for c in shared]
        b = [wb[index_b[c]] for c in shared]
    else:
        if not args.pair:
            raise LexiclockError("--dataset needs --pair VARIETY_A VARIETY_B")
        ds = dataio.load_dataset(dataio.DatasetFiles(args.dataset[0], args.dataset[1]))
        a, b = ds.words_of(args.pair[0]), ds.words_of(args.pair[1])
    flags = metrics.detect_cognates(a, b, cfg["theta"])
    stats = metrics.pair_statistics(a, b, flags, params.n_eff, args.metric)
    values = [("omega", stats.omega), ("phi", stats.phi), ("varphi", stats.varphi)]
    columns.append("n_compared")
    rows = [row + [stats.n_compared] for row in _date_rows(params, values)]
    dataio.write_results(rows, args.output, args.format, columns)


def _load(args):
    return dataio.load_dataset(dataio.DatasetFiles(args.lists, args.meta))


def cmd_estimate(args, cfg):
    ds = _load(args)
    moments = estimation.cross_concept_moments(ds, args.metric, args.threads)
    n = estimation.estimate_n(ds, moments=moments)
    out = {
        "inputs": {
            "lists": args.lists,
            "meta": args.meta,
            "metric": args.metric,
            "varieties": ds.shape[0],
            "concepts": ds.shape[1],
            "theta": cfg["theta"],
            "t_root": args.t_root,
            "g": args.g,
            "min_pairs": args.min_pairs,
        },
        "cross_concept_pairs": moments.count,
        "n_eff": n,
        "l_eff": estimation.estimate_l(ds, n, moments=moments) if n > 1 else None,
    }
    if args.t_root is not None:
        obs = estimation.pair_observations(ds, cfg["theta"], args.metric)
        lam = estimation.estimate_lambda(ds, args.t_root, args.g, cfg["theta"], args.min_pairs, obs)
        mu, mu_hat = estimation.estimate_mu(
            ds, args.t_root, args.g, n, lam, args.min_pairs, obs, args.metric
        )
        out.update(
            pair_count=sum(1 for o in obs if o.km > args.g),
            **{"lambda": lam, "mu": mu, "mu_hat": mu_hat},
        )
    dataio.emit_text(json.dumps(out, indent=2) + "\n", args.output)


def cmd_sweep(args, cfg):
    ds = _load(args)
    rows = estimation.sweep_g(
        ds, args.t_root, args.g_min, args.g_max, args.step, cfg["theta"],
        min_pairs=args.min_pairs, metric=args.metric, threads=args.threads,
    )
    columns = ["g", "pair_count", "lambda", "mu_hat"]
    dataio.write_results(rows, args.output, args.format, columns)


COMMANDS = {
    "curves": cmd_curves,
    "simulate": cmd_simulate,
    "validate": cmd_validate,
    "date": cmd_date,
    "estimate": cmd_estimate,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(args)
        COMMANDS[args.command](args, cfg)
    except LexiclockError as exc:
        print(f"lexiclock {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"lexiclock {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
