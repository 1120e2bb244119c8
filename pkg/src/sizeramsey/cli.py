"""Command-line entry point.

Subcommands: gen (sample a host graph), decompose (block decomposition of a
pattern), embed (single embed-only run), arrow (exhaustive arrowing check),
scan (threshold scan to CSV), plotdata (aggregate a scan CSV). Exit codes:
0 success, 1 usage error, 2 runtime error, 3 all trials failed.
"""

import argparse
import sys

from .errors import ConfigError, SizeRamseyError


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser():
    p = _Parser(prog="sizeramsey",
                description="block decomposition, sparse-regular embedding, "
                            "and Ramsey arrowing experiments")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, *names):
        if "n" in names:
            sp.add_argument("--n", type=int, action="append",
                            help="host size (repeatable for scans)")
        if "p" in names:
            sp.add_argument("--p", type=float, action="append",
                            help="edge probability (repeatable for scans)")
            sp.add_argument("--p-exp", action="append", metavar="K,e",
                            help="edge probability K*n^e (repeatable)")
        if "pattern" in names:
            sp.add_argument("--pattern", default="cubic:40",
                            help="pattern spec, e.g. petersen, cycle:8, "
                                 "cubic:40")
        if "seed" in names:
            sp.add_argument("--seed", type=int, default=0)
        if "out" in names:
            sp.add_argument("--out", help="output path (default stdout)")
        if "budget" in names:
            sp.add_argument("--budget", type=int, default=1_000_000)

    sp = sub.add_parser("gen", help="sample a G(n,p) host to an edge list")
    common(sp, "n", "p", "seed", "out")

    sp = sub.add_parser("decompose", help="block-decompose a pattern")
    common(sp, "pattern", "seed", "out")
    sp.add_argument("--in", dest="infile",
                    help="read pattern from an edge-list file instead")
    sp.add_argument("--min-cycle", type=int, default=4)

    sp = sub.add_parser("embed", help="one embed-only run, mapping to stdout")
    common(sp, "n", "p", "pattern", "seed", "out", "budget")
    sp.add_argument("--bucket-count", type=int, default=2)
    sp.add_argument("--kappa", type=float, default=1.0 / 12.0)

    sp = sub.add_parser("arrow", help="exhaustive arrowing check G -> H")
    common(sp, "n", "p", "pattern", "seed", "out")
    sp.add_argument("--in", dest="infile", help="host edge-list file")

    sp = sub.add_parser("scan", help="threshold scan, CSV to --out")
    sp.add_argument("--n", type=int, action="append")
    sp.add_argument("--p", type=float, action="append")
    sp.add_argument("--p-exp", action="append", metavar="K,e")
    sp.add_argument("--pattern", default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--out")
    sp.add_argument("--budget", type=int, default=None)
    sp.add_argument("--trials", type=int, default=None)
    sp.add_argument("--mode", default=None,
                    choices=("embed-only", "colored-pipeline",
                             "arrowing-exhaustive"))
    sp.add_argument("--bucket-count", type=int, default=None)
    sp.add_argument("--kappa", type=float, default=None)
    sp.add_argument("--num-cells", type=int, default=None)
    sp.add_argument("--jobs", type=int, default=None)
    sp.add_argument("--no-timing", action="store_true",
                    help="write 0 for wall_time_ms (bit-exact replays)")
    sp.add_argument("--config", help="key=value config file; flags override")

    sp = sub.add_parser("plotdata", help="aggregate a scan CSV")
    sp.add_argument("--in", dest="infile", required=True)
    common(sp, "out")
    return p


def _open_out(args):
    if getattr(args, "out", None):
        return open(args.out, "w")
    return sys.stdout


def _parse_p_exp(text):
    try:
        k, e = text.split(",")
        return ("exp", float(k), float(e))
    except ValueError:
        raise ConfigError(f"--p-exp wants K,e; got {text!r}")


def _single(values, flag):
    if not values:
        raise ConfigError(f"{flag} is required")
    if len(values) > 1:
        raise ConfigError(f"{flag} given more than once")
    return values[0]


def _cmd_gen(args):
    from .graph import GnpParams, gnp_sample, write_edge_list
    n = _single(args.n, "--n")
    p = _single(args.p, "--p") if args.p else None
    if p is None and args.p_exp:
        p = experiment_resolve(_parse_p_exp(_single(args.p_exp, "--p-exp")), n)
    if p is None:
        raise ConfigError("--p or --p-exp is required")
    g = gnp_sample(GnpParams(n, p, args.seed))
    if args.out:
        write_edge_list(g, args.out)
    else:
        print(f"{g.n} {g.edge_count}")
        for u, v in g.edges():
            print(f"{u} {v}")
    return 0


def experiment_resolve(entry, n):
    from .experiment import resolve_p
    return resolve_p(entry, n)


def _load_pattern(args):
    from .experiment import pattern_for_trial
    from .graph import read_edge_list
    if getattr(args, "infile", None):
        return read_edge_list(args.infile)
    return pattern_for_trial(args.pattern, args.seed)


def _cmd_decompose(args):
    from .decompose import decompose_components, decomposition_to_text, \
        validate_decomposition
    h = _load_pattern(args)
    decomp, k4s = decompose_components(h)
    out = _open_out(args)
    try:
        if k4s:
            out.write(f"# k4-components: {k4s}\n")
        out.write(decomposition_to_text(decomp))
        violations = validate_decomposition(h, decomp, args.min_cycle)
        for v in violations:
            out.write(f"# violation: {v}\n")
        return 2 if violations else 0
    finally:
        if out is not sys.stdout:
            out.close()


def _cmd_embed(args):
    from .experiment import ExperimentConfig, _run_trial, resolve_p
    n = _single(args.n, "--n")
    entries = list(args.p or []) + [_parse_p_exp(t) for t in args.p_exp or []]
    p = resolve_p(_single(entries, "--p/--p-exp"), n)
    config = ExperimentConfig([n], [p], args.pattern, 1, args.seed,
                              mode="embed-only", budget=args.budget,
                              bucket_count=args.bucket_count,
                              kappa=args.kappa)
    rec = _run_trial(config, n, 0, p, 0)
    out = _open_out(args)
    try:
        out.write(f"# outcome={rec.outcome} buckets={rec.bucket_trace}\n")
        if rec.outcome == "success":
            out.write(_replay_mapping(config, n, p) + "\n")
        return 0 if rec.outcome == "success" else 3
    finally:
        if out is not sys.stdout:
            out.close()


def _replay_mapping(config, n, p):
    from .embedder import (EmbedConfig, HostPartition, embed_blocks)
    from .decompose import decompose_components
    from .experiment import pattern_for_trial
    from .graph import GnpParams, child_seed, gnp_sample, square_coloring
    trial_seed = child_seed(config.seed, n, 0, 0)
    h = pattern_for_trial(config.pattern, trial_seed)
    g = gnp_sample(GnpParams(n, p, child_seed(trial_seed, "host")))
    decomp, _ = decompose_components(h)
    col = square_coloring(h)
    part = HostPartition.random_equitable(
        range(g.n), col.num_colors, seed=child_seed(trial_seed, "part"))
    cfg = EmbedConfig(p=p, kappa=config.kappa,
                      bucket_count=config.bucket_count,
                      node_budget=config.budget,
                      seed=child_seed(trial_seed, "embed"))
    state = embed_blocks(g, h, decomp, part, col, cfg)
    return "\n".join(f"{v} {state.image[v]}" for v in sorted(state.image))


def _cmd_arrow(args):
    from .graph import GnpParams, gnp_sample, read_edge_list
    from .ramsey import is_ramsey_exhaustive
    from .experiment import pattern_for_trial
    if args.infile:
        g = read_edge_list(args.infile)
    else:
        n = _single(args.n, "--n")
        p = _single(args.p, "--p")
        g = gnp_sample(GnpParams(n, p, args.seed))
    h = pattern_for_trial(args.pattern, args.seed)
    res = is_ramsey_exhaustive(g, h)
    out = _open_out(args)
    try:
        out.write(f"arrows={str(res.arrows).lower()} "
                  f"colorings_checked={res.colorings_checked}\n")
        if res.certificate is not None:
            for line in res.certificate.to_lines():
                out.write(line + "\n")
        return 0
    finally:
        if out is not sys.stdout:
            out.close()


def _config_from_args(args):
    from .experiment import ExperimentConfig, load_config_file
    values = {}
    if args.config:
        values = load_config_file(args.config)

    def pick(flag_value, key, default, cast):
        if flag_value is not None:
            return flag_value
        return cast(values[key]) if key in values else default

    n_list = list(args.n) if args.n else \
        [int(x) for x in values.get("n_list", "").split(",") if x]
    p_grid = [float(x) for x in args.p or []]
    p_grid += [_parse_p_exp(t) for t in args.p_exp or []]
    if not p_grid and "p_grid" in values:
        p_grid = [float(x) for x in values["p_grid"].split(",") if x]
    if not p_grid and "p_exp_grid" in values:
        p_grid = [_parse_p_exp(x) for x in values["p_exp_grid"].split(";") if x]
    return ExperimentConfig(
        n_list=n_list,
        p_grid=p_grid,
        pattern=pick(args.pattern, "pattern", "cubic:40", str),
        trials=pick(args.trials, "trials", 20, int),
        seed=pick(args.seed, "seed", 0, int),
        mode=pick(args.mode, "mode", "embed-only", str),
        budget=pick(args.budget, "budget", 1_000_000, int),
        bucket_count=pick(args.bucket_count, "bucket_count", 2, int),
        kappa=pick(args.kappa, "kappa", 1.0 / 12.0, float),
        num_cells=pick(args.num_cells, "num_cells", 20, int),
        jobs=pick(args.jobs, "jobs", 1, int),
        record_timing=not args.no_timing,
    )


def _cmd_scan(args):
    from .experiment import threshold_scan
    config = _config_from_args(args)
    out = _open_out(args)
    try:
        records = threshold_scan(config, out)
    finally:
        if out is not sys.stdout:
            out.close()
    if records and all(rec.outcome != "success" for rec in records):
        return 3
    return 0


def _cmd_plotdata(args):
    from .experiment import emit_plot_data
    with open(args.infile) as fh:
        lines = fh.readlines()
    out = _open_out(args)
    try:
        emit_plot_data(lines, out)
        return 0
    finally:
        if out is not sys.stdout:
            out.close()


_COMMANDS = {
    "gen": _cmd_gen,
    "decompose": _cmd_decompose,
    "embed": _cmd_embed,
    "arrow": _cmd_arrow,
    "scan": _cmd_scan,
    "plotdata": _cmd_plotdata,
}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SizeRamseyError, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
