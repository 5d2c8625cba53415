"""Command line driver: ``sparsegl <subcommand> [flags]``.

Every subcommand is deterministic given its flags; all randomness comes
from explicit ``--seed`` values. On failure a single ``error: ...`` line is
written to stderr and the exit status is nonzero.
"""

from __future__ import annotations

import argparse
import itertools
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io
from ._validation import resolve_kernels
from .dictionary import build_dictionary, normalize_atoms
from .exceptions import SparseGLError
from .kernels import eval_kernel
from .learner import LearnConfig, ThresholdPolicy, learn_graph
from .metrics import aggregate, code_metrics, edge_metrics, format_table
from .synthetic import SyntheticGraphConfig, gen_graph, gen_signals

logger = logging.getLogger("sparsegl")

LEARN_DEFAULTS = {
    "beta_w": 1e-3,
    "step_size": 0.5,
    "n_outer": 50,
    "n_inner": 20,
    "t0": 4,
    "seed": 0,
    "threshold_mode": "value",
    "threshold_arg": None,
    "backtracking": False,
}
LEARN_TYPES = {
    "beta_w": float,
    "step_size": float,
    "n_outer": int,
    "n_inner": int,
    "t0": int,
    "seed": int,
    "threshold_mode": str,
    "threshold_arg": float,
    "backtracking": lambda v: str(v).lower() in ("1", "true", "yes", "on"),
}
GRID_KEYS = {"beta_w": "beta_w", "step": "step_size", "step_size": "step_size"}


class CLIError(Exception):
    pass


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _kernel_spec(args):
    if args.kernels == "file":
        if not args.kernels_file:
            raise CLIError("--kernels file requires --kernels-file")
        return io.read_kernels(args.kernels_file)
    return resolve_kernels(args.kernels, args.degree)


def _add_kernel_flags(p):
    p.add_argument("--kernels", choices=["general", "lowpass", "file"], default="general")
    p.add_argument("--kernels-file", help="one row of coefficients a_0..a_K per kernel")
    p.add_argument("--degree", type=_positive_int, default=15)


def _num(v):
    return repr(float(v))


def _seed_int(*parts):
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1)[0])


# -- gen-graph ---------------------------------------------------------------

def cmd_gen_graph(args):
    if args.model == "er" and args.p is None and args.target_edges is None:
        raise CLIError("--model er needs --p or --target-edges")
    if args.model == "rbf" and args.kappa is None and args.target_edges is None:
        raise CLIError("--model rbf needs --kappa or --target-edges")
    cfg = SyntheticGraphConfig(
        n=args.n, model=args.model, p=args.p, sigma=args.sigma, kappa=args.kappa,
        target_edges=args.target_edges, seed=args.seed,
    )
    g = gen_graph(cfg)
    io.write_graph(args.out, g, [
        "sparsegl gen-graph",
        f"model={cfg.model} n={cfg.n} p={cfg.p} sigma={cfg.sigma} kappa={cfg.kappa} "
        f"target_edges={cfg.target_edges} seed={cfg.seed}",
        f"edges={g.n_edges}",
    ])


# -- gen-signals -------------------------------------------------------------

def cmd_gen_signals(args):
    g = io.read_graph(args.graph)
    spec = _kernel_spec(args)
    inst = gen_signals(g, spec, args.m, args.t0, args.seed)
    prov = [
        "sparsegl gen-signals",
        f"graph={Path(args.graph).name} kernels={args.kernels} degree={spec.degree} "
        f"m={args.m} t0={args.t0} seed={args.seed}",
    ]
    io.write_matrix(args.out_signals, inst.signals, prov)
    io.write_codes(args.out_codes, inst.true_codes, prov)


# -- learn -------------------------------------------------------------------

def _learn_settings(args):
    settings = dict(LEARN_DEFAULTS)
    if args.config:
        for key, value in io.read_key_values(args.config).items():
            if key not in LEARN_TYPES:
                raise CLIError(f"{args.config}: unknown config key {key!r}")
            settings[key] = LEARN_TYPES[key](value)
    flags = {
        "beta_w": args.beta_w, "step_size": args.step, "n_outer": args.outer,
        "n_inner": args.inner, "t0": args.t0, "seed": args.seed,
        "threshold_mode": args.threshold_mode, "threshold_arg": args.threshold_arg,
        "backtracking": True if args.backtracking else None,
    }
    settings.update({k: v for k, v in flags.items() if v is not None})
    return settings


def _threshold(settings, truth):
    mode, arg = settings["threshold_mode"], settings["threshold_arg"]
    if mode == "count" and arg is None:
        if truth is None:
            raise CLIError("--threshold-mode count needs --threshold-arg or --truth")
        arg = truth.n_edges
    if mode == "value" and arg is None:
        arg = 1e-4
    return ThresholdPolicy(mode, arg)


def _parse_grid(items):
    grid = {}
    for item in items:
        key, _, values = item.partition("=")
        if key not in GRID_KEYS or not values:
            raise CLIError(f"bad --grid entry {item!r}; expected beta_w=a,b,... or step=x,y,...")
        grid[GRID_KEYS[key]] = [float(v) for v in values.split(",")]
    return grid


def cmd_learn(args):
    ys = io.read_matrix(args.signals)
    spec = _kernel_spec(args)
    truth = io.read_graph(args.truth) if args.truth else None
    settings = _learn_settings(args)
    base = LearnConfig(
        beta_w=settings["beta_w"], step_size=settings["step_size"],
        n_outer=settings["n_outer"], n_inner=settings["n_inner"], t0=settings["t0"],
        seed=settings["seed"], threshold=_threshold(settings, truth),
        backtracking=settings["backtracking"],
    )

    grid = _parse_grid(args.grid) if args.grid else {}
    keys = list(grid)
    runs = []
    for values in itertools.product(*(grid[k] for k in keys)):
        cfg = replace(base, **dict(zip(keys, values)))
        result = learn_graph(ys, spec, cfg)
        f = edge_metrics(result.learned_graph, truth).f_measure if truth is not None else None
        runs.append((cfg, result, f))
        logger.info("beta_w=%g step=%g objective=%.6g", cfg.beta_w, cfg.step_size, result.objective_trace[-1])

    if truth is not None:
        best = max(range(len(runs)), key=lambda i: (runs[i][2], -i))
    else:
        best = min(range(len(runs)), key=lambda i: (runs[i][1].objective_trace[-1], i))
    cfg, result, _ = runs[best]

    prov = [
        "sparsegl learn",
        f"signals={Path(args.signals).name} kernels={args.kernels} degree={spec.degree}",
        f"beta_w={_num(cfg.beta_w)} step_size={_num(cfg.step_size)} n_outer={cfg.n_outer} "
        f"n_inner={cfg.n_inner} t0={cfg.t0} seed={cfg.seed} backtracking={cfg.backtracking} "
        f"threshold={cfg.threshold.mode}:{cfg.threshold.arg}",
    ]
    io.write_graph(args.out_graph, result.learned_graph, prov)
    if args.out_raw:
        io.write_matrix(args.out_raw, result.raw_weights, prov)
    if args.out_codes:
        io.write_codes(args.out_codes, result.codes, prov)
    if args.out_trace:
        io.write_trace(args.out_trace, result.objective_trace, prov + ["iteration objective"])
    if args.grid:
        lines = ["# beta_w step_size final_objective edge_f selected"]
        for i, (c, r, f) in enumerate(runs):
            lines.append(
                f"{_num(c.beta_w)} {_num(c.step_size)} {_num(r.objective_trace[-1])} "
                f"{'nan' if f is None else _num(f)} {int(i == best)}"
            )
        report = "\n".join(lines) + "\n"
        if args.out_report:
            io._write(args.out_report, report)
        else:
            sys.stdout.write(report)


# -- evaluate ----------------------------------------------------------------

def cmd_evaluate(args):
    if len(args.learned) != len(args.truth):
        raise CLIError("--learned and --truth need the same number of files")
    if len(args.learned_codes) != len(args.true_codes):
        raise CLIError("--learned-codes and --true-codes need the same number of files")
    if args.learned_codes and len(args.learned_codes) != len(args.learned):
        raise CLIError("code files must pair up with the graph files")

    rows, edges, codes = [], [], []
    for i, (lp, tp) in enumerate(zip(args.learned, args.truth)):
        em = edge_metrics(io.read_graph(lp), io.read_graph(tp))
        edges.append(em)
        rows += [(i, f"edge_{k}", v) for k, v in em.as_dict().items()]
        if args.learned_codes:
            cm = code_metrics(io.read_codes(args.learned_codes[i]), io.read_codes(args.true_codes[i]))
            codes.append(cm)
            rows += [(i, f"code_{k}", v) for k, v in cm.as_dict().items()]

    body = "".join(f"{i}\t{k}\t{v if isinstance(v, int) else _num(v)}\n" for i, k, v in rows)
    text = "instance_id\tmetric\tvalue\n" + body
    if args.out:
        io._write(args.out, text)
    table = {"edges": aggregate(edges)}
    if codes:
        table["sparse codes"] = aggregate(codes)
    summary = format_table(table, f"mean +- std over {len(edges)} instance(s)")
    if args.out_table:
        io._write(args.out_table, summary)
    sys.stdout.write(summary)


# -- sweep -------------------------------------------------------------------

SWEEP_COLUMNS = [
    "replication", "t0", "m", "edge_precision", "edge_recall", "edge_f",
    "code_precision", "code_recall", "code_f",
]


def _int_list(text):
    return [int(v) for v in str(text).split(",") if v.strip()]


def load_manifest(path):
    """Sweep manifest: ``key = value`` lines, grids as comma-separated lists."""
    kv = io.read_key_values(path)
    known = {
        "n", "model", "p", "sigma", "kappa", "target_edges", "kernels", "kernels_file",
        "degree", "t0_grid", "m_grid", "replications", "seed", "beta_w", "step_size",
        "n_outer", "n_inner", "backtracking", "out",
    }
    unknown = set(kv) - known
    if unknown:
        raise CLIError(f"{path}: unknown manifest keys {sorted(unknown)}")
    for key in ("n", "t0_grid", "m_grid"):
        if key not in kv:
            raise CLIError(f"{path}: manifest needs {key!r}")
    m = {
        "n": int(kv["n"]),
        "model": kv.get("model", "er"),
        "p": float(kv["p"]) if "p" in kv else None,
        "sigma": float(kv.get("sigma", 0.5)),
        "kappa": float(kv["kappa"]) if "kappa" in kv else None,
        "target_edges": int(kv["target_edges"]) if "target_edges" in kv else None,
        "kernels": kv.get("kernels", "general"),
        "kernels_file": kv.get("kernels_file"),
        "degree": int(kv.get("degree", 15)),
        "t0_grid": _int_list(kv["t0_grid"]),
        "m_grid": _int_list(kv["m_grid"]),
        "replications": int(kv.get("replications", 1)),
        "seed": int(kv.get("seed", 0)),
        "out": kv.get("out"),
        "learn": {
            k: LEARN_TYPES[k](kv[k]) if k in kv else LEARN_DEFAULTS[k]
            for k in ("beta_w", "step_size", "n_outer", "n_inner", "backtracking")
        },
    }
    if m["replications"] < 1:
        raise CLIError(f"{path}: replications must be >= 1")
    if not m["t0_grid"] or not m["m_grid"]:
        raise CLIError(f"{path}: empty t0_grid or m_grid")
    if m["kernels_file"]:
        kf = Path(m["kernels_file"])
        if not kf.is_absolute():
            m["kernels_file"] = str(Path(path).parent / kf)
    return m


def _completed_replications(path):
    done = set()
    if Path(path).is_file():
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if line.strip() and not line.startswith(("#", "replication")):
                    done.add(int(line.split("\t")[0]))
    return done


def run_replication(manifest, rep, spec):
    """All ``(t0, m)`` grid points of one replication, as result rows."""
    cfg = SyntheticGraphConfig(
        n=manifest["n"], model=manifest["model"], p=manifest["p"], sigma=manifest["sigma"],
        kappa=manifest["kappa"], target_edges=manifest["target_edges"],
        seed=_seed_int(manifest["seed"], rep),
    )
    g = gen_graph(cfg)
    rows = []
    for t0 in manifest["t0_grid"]:
        for m in manifest["m_grid"]:
            inst = gen_signals(g, spec, m, t0, _seed_int(manifest["seed"], rep, t0, m))
            learn_cfg = LearnConfig(
                t0=t0, seed=_seed_int(manifest["seed"], rep, 1),
                threshold=ThresholdPolicy.target_edge_count(g.n_edges), **manifest["learn"],
            )
            result = learn_graph(inst.signals, spec, learn_cfg)
            em = edge_metrics(result.learned_graph, g)
            cm = code_metrics(result.codes, inst.true_codes)
            rows.append((rep, t0, m, em.precision, em.recall, em.f_measure,
                         cm.precision, cm.recall, cm.f_measure))
    return rows


def cmd_sweep(args):
    manifest = load_manifest(args.manifest)
    out = args.out or manifest["out"]
    if not out:
        raise CLIError("no output path: set 'out' in the manifest or pass --out")
    if manifest["kernels"] == "file":
        spec = io.read_kernels(manifest["kernels_file"])
    else:
        spec = resolve_kernels(manifest["kernels"], manifest["degree"])

    out = Path(out)
    done = _completed_replications(out)
    if not out.is_file():
        io._write(out, "\t".join(SWEEP_COLUMNS) + "\n")
    for rep in range(manifest["replications"]):
        if rep in done:
            logger.info("replication %d already present, skipping", rep)
            continue
        rows = run_replication(manifest, rep, spec)
        text = "".join(
            "\t".join(str(v) if isinstance(v, int) else _num(v) for v in row) + "\n" for row in rows
        )
        # one append per replication so an interrupted sweep never leaves half a replication
        with open(out, "a", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        logger.info("replication %d done", rep)


def read_sweep(path):
    """Rows of a sweep results file as a list of dicts."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        return [
            {k: (int(v) if k in ("replication", "t0", "m") else float(v))
             for k, v in zip(header, line.rstrip("\n").split("\t"))}
            for line in fh if line.strip()
        ]


# -- kernel-dump / dictionary-dump -------------------------------------------

def cmd_kernel_dump(args):
    spec = _kernel_spec(args)
    lam = np.linspace(0.0, 2.0, args.samples)
    for s, coeffs in enumerate(spec.coeffs, start=1):
        values = eval_kernel(coeffs, lam)
        io.write_matrix(
            f"{args.out_prefix}_kernel{s}.txt",
            np.column_stack([lam, values]),
            [f"sparsegl kernel-dump kernels={args.kernels} degree={spec.degree} kernel={s}", "lambda value"],
        )


def cmd_dictionary_dump(args):
    g = io.read_graph(args.graph)
    spec = _kernel_spec(args)
    d = build_dictionary(g, spec)
    if args.normalize:
        d = normalize_atoms(d)
    io.write_matrix(args.out, d.atoms, [
        f"sparsegl dictionary-dump kernels={args.kernels} degree={spec.degree} normalized={args.normalize}",
        "column s*N + v is kernel s centred at vertex v",
    ])


# -- entry point -------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="sparsegl", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graph", help="random ER or RBF ground-truth graph")
    p.add_argument("--model", choices=["er", "rbf"], default="er")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float)
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--kappa", type=float)
    p.add_argument("--target-edges", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_graph)

    p = sub.add_parser("gen-signals", help="planted sparse signals on a graph")
    p.add_argument("--graph", required=True)
    _add_kernel_flags(p)
    p.add_argument("--m", type=_positive_int, default=200)
    p.add_argument("--t0", type=_positive_int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-signals", required=True)
    p.add_argument("--out-codes", required=True)
    p.set_defaults(func=cmd_gen_signals)

    p = sub.add_parser("learn", help="learn a graph from signals")
    p.add_argument("--signals", required=True)
    _add_kernel_flags(p)
    p.add_argument("--config", help="key = value file with learner settings")
    p.add_argument("--beta-w", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--outer", type=_positive_int)
    p.add_argument("--inner", type=_positive_int)
    p.add_argument("--t0", type=_positive_int)
    p.add_argument("--seed", type=int)
    p.add_argument("--threshold-mode", choices=["count", "value"])
    p.add_argument("--threshold-arg", type=float)
    p.add_argument("--backtracking", action="store_true")
    p.add_argument("--grid", nargs="+", metavar="KEY=V1,V2", help="beta_w=... and/or step=...")
    p.add_argument("--truth", help="ground-truth graph for count thresholding and grid selection")
    p.add_argument("--out-graph", required=True)
    p.add_argument("--out-raw")
    p.add_argument("--out-codes")
    p.add_argument("--out-trace")
    p.add_argument("--out-report")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("evaluate", help="edge and code recovery metrics")
    p.add_argument("--learned", nargs="+", required=True)
    p.add_argument("--truth", nargs="+", required=True)
    p.add_argument("--learned-codes", nargs="*", default=[])
    p.add_argument("--true-codes", nargs="*", default=[])
    p.add_argument("--out", help="tab separated instance_id/metric/value rows")
    p.add_argument("--out-table")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="sparsity x signal-count recovery sweep")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("kernel-dump", help="sample kernels on [0, 2]")
    _add_kernel_flags(p)
    p.add_argument("--samples", type=_positive_int, default=101)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=cmd_kernel_dump)

    p = sub.add_parser("dictionary-dump", help="write the atom matrix of a graph")
    p.add_argument("--graph", required=True)
    _add_kernel_flags(p)
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_dictionary_dump)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        args.func(args)
    except (SparseGLError, CLIError, OSError, ValueError) as exc:
        message = " ".join(str(exc).split())
        print(f"error: {type(exc).__name__}: {message}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
