"""Command-line front end: diffusion runs, bound tables, benchmarks.

All commands emit CSV with ``#``-prefixed metadata lines, one header
row, then data rows. Floats are written with 17 significant digits so
files round-trip exactly. Exit codes: 0 success, 2 usage or input
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from contextlib import nullcontext

import numpy as np

from .bounds import AUTO, BoundKind, SignalStats, min_order, true_min_order
from .chebyshev import build_basis, cheb_coefficients, combine
from .diffusion import DEFAULT_SEED, estimate_lambda_max, expm_multiscale, make_plan
from .errors import NumericalError
from .graphs import build_laplacian, erdos_renyi, load_graph, load_signal, save_edge_list

__all__ = ["main", "entry"]

_KIND_CHOICES = [AUTO] + [k.value for k in BoundKind]


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _parse_scales(spec: str) -> list[float]:
    head, _, rest = spec.partition(":")
    if head in ("lin", "log"):
        parts = rest.split(":")
        if len(parts) != 3:
            raise ValueError(f"--scales grid must be {head}:start:stop:count, got {spec!r}")
        a, b, m = float(parts[0]), float(parts[1]), int(parts[2])
        if m < 1:
            raise ValueError("--scales grid count must be >= 1")
        if head == "lin":
            return [float(t) for t in np.linspace(a, b, m)]
        if a <= 0.0 or b <= 0.0:
            raise ValueError("--scales log grid endpoints must be positive")
        return [float(t) for t in np.logspace(math.log10(a), math.log10(b), m)]
    try:
        return [float(tok) for tok in spec.split(",")]
    except ValueError:
        raise ValueError(f"--scales expects lin:a:b:m, log:a:b:m or a comma list, got {spec!r}") from None


def _resolve_graph(spec: str, laplacian: str):
    """Graph spec -> (operator, n). Accepts er:n:p:seed or a file path."""
    if spec.startswith("er:"):
        parts = spec.split(":")
        if len(parts) != 4:
            raise ValueError(f"--graph generator must be er:n:p:seed, got {spec!r}")
        n, p, seed = int(parts[1]), float(parts[2]), int(parts[3])
        edges = erdos_renyi(n, p, seed)
    else:
        edges, n = load_graph(spec)
    return build_laplacian(edges, n, kind=laplacian), n


def _out_stream(path: str | None):
    if path:
        return open(path, "w", encoding="utf-8")
    return nullcontext(sys.stdout)


def cmd_diffuse(args) -> None:
    op, n = _resolve_graph(args.graph, args.laplacian)
    sig = load_signal(args.signal, n)
    scales = _parse_scales(args.scales)
    results = expm_multiscale(op, sig, scales, tol=args.tol, kind=args.bound,
                              lambda_max=args.lambda_max, seed=args.seed)
    rep = results[0][1]
    with _out_stream(args.out) as fh:
        fh.write("# command=diffuse\n")
        fh.write(f"# n={n} nnz={op.nnz} laplacian={args.laplacian}\n")
        fh.write(f"# K={rep.order} lambda_max={_fmt(rep.lambda_max)} kind={rep.kind.value}"
                 f" bound={_fmt(max(r.bound for _, r in results))} tol={_fmt(rep.tol)}"
                 f" matvecs={rep.matvecs} setup_matvecs={rep.setup_matvecs}\n")
        fh.write("node," + ",".join(f"tau={_fmt(t)}" for t in scales) + "\n")
        cols = [y for y, _ in results]
        for i in range(n):
            fh.write(str(i) + "," + ",".join(_fmt(c[i]) for c in cols) + "\n")


def bound_table_data(n: int, p: float, trials: int, taus, tol: float,
                     seed: int, with_true: bool):
    """Per-trial minimum orders for every certificate on ER graphs.

    Returns a dict with the scale list, the per-trial effective scales
    (trials x m), one (trials x m) integer array per bound kind, and the
    measured-minimum array when ``with_true``. Trial t draws the graph
    with ``seed + t`` and the standard-normal signal with
    ``seed + t + 10000``.
    """
    taus = [float(t) for t in taus]
    m = len(taus)
    tau_effs = np.zeros((trials, m))
    ratios = np.zeros(trials)
    orders = {kind: np.zeros((trials, m), dtype=np.int64) for kind in BoundKind}
    true_orders = np.zeros((trials, m), dtype=np.int64) if with_true else None
    for t in range(trials):
        edges = erdos_renyi(n, p, seed + t)
        op = build_laplacian(edges, n)
        sig = load_signal(f"normal:{seed + t + 10000}", n)
        stats = SignalStats.from_signal(sig)
        ratios[t] = stats.energy_ratio
        lam = estimate_lambda_max(op)
        for j, tau in enumerate(taus):
            te = lam * tau / 2.0
            tau_effs[t, j] = te
            for kind in BoundKind:
                orders[kind][t, j] = min_order(kind, te, tol, stats=stats)
            if with_true:
                true_orders[t, j] = true_min_order(op, sig, tau, tol, lambda_max=lam)
    return {"taus": taus, "tau_effs": tau_effs, "orders": orders, "true": true_orders,
            "ratios": ratios}


def cmd_bound_table(args) -> None:
    taus = _parse_scales(args.scales)
    data = bound_table_data(args.n, args.p, args.trials, taus, args.tol,
                            args.seed, args.true)
    names = [("true", data["true"])] if args.true else []
    names += [(kind.value.replace("-", "_"), data["orders"][kind]) for kind in BoundKind]
    with _out_stream(args.out) as fh:
        fh.write("# command=bound-table\n")
        fh.write(f"# n={args.n} p={_fmt(args.p)} trials={args.trials}"
                 f" tol={_fmt(args.tol)} seed={args.seed}\n")
        cols = ["tau", "tau_eff_median"]
        for name, _ in names:
            cols += [f"k_{name}_q25", f"k_{name}_median", f"k_{name}_q75"]
        fh.write(",".join(cols) + "\n")
        for j, tau in enumerate(data["taus"]):
            row = [_fmt(tau), _fmt(float(np.median(data["tau_effs"][:, j])))]
            for _, arr in names:
                q25, q50, q75 = np.percentile(arr[:, j], [25.0, 50.0, 75.0])
                row += [_fmt(q25), _fmt(q50), _fmt(q75)]
            fh.write(",".join(row) + "\n")


def cmd_bench(args) -> None:
    op, n = _resolve_graph(args.graph, args.laplacian)
    sig = load_signal(args.signal, n)
    scales = _parse_scales(args.scales)
    m = len(scales)

    def one_run():
        t0 = time.perf_counter()
        plan = make_plan(op, sig, scales, args.tol, kind=args.bound,
                         lambda_max=args.lambda_max, seed=args.seed)
        t1 = time.perf_counter()
        if plan.lambda_max > 0.0:
            op_scaled = op.scaled(2.0 / plan.lambda_max)
            cache = build_basis(op_scaled, sig, plan.order)
        else:
            cache = None
        t2 = time.perf_counter()
        combine_s = 0.0
        for tau_eff in plan.tau_effs:
            tc = time.perf_counter()
            if cache is not None:
                combine(cache, cheb_coefficients(tau_eff, plan.order))
            combine_s += time.perf_counter() - tc
        return plan, t1 - t0, t2 - t1, combine_s

    one_run()  # warm-up, not reported
    with _out_stream(args.out) as fh:
        fh.write("# command=bench\n")
        fh.write(f"# n={n} nnz={op.nnz} m={m} tol={_fmt(args.tol)} seed={args.seed}\n")
        fh.write("trial,K,matvecs,setup_matvecs,setup_s,basis_s,combine_total_s,combine_per_scale_s\n")
        for trial in range(args.trials):
            plan, setup_s, basis_s, combine_s = one_run()
            fh.write(",".join([
                str(trial), str(plan.order), str(plan.order), str(plan.setup_matvecs),
                _fmt(setup_s), _fmt(basis_s), _fmt(combine_s), _fmt(combine_s / m),
            ]) + "\n")


def cmd_gen_graph(args) -> None:
    edges = erdos_renyi(args.n, args.p, args.seed)
    save_edge_list(args.out, edges, args.n,
                   comment=f"p={_fmt(args.p)} seed={args.seed}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chebheat",
                                     description="Graph heat diffusion via Chebyshev expansions")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_graph_flags(p):
        p.add_argument("--graph", required=True,
                       help="graph file (edge list or Matrix Market) or er:n:p:seed")
        p.add_argument("--signal", required=True,
                       help="signal file or dirac:k / normal:seed / const:v")
        p.add_argument("--laplacian", choices=["combinatorial", "normalized"],
                       default="combinatorial")
        p.add_argument("--lambda-max", type=float, default=None,
                       help="known spectral radius; skips power iteration")
        p.add_argument("--bound", choices=_KIND_CHOICES, default=AUTO)

    def add_common(p):
        p.add_argument("--tol", type=float, default=1e-5)
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--out", default=None, help="output path (default stdout)")

    p = sub.add_parser("diffuse", help="apply the heat kernel at one or more scales")
    add_graph_flags(p)
    p.add_argument("--scales", required=True,
                   help="lin:a:b:m, log:a:b:m or comma-separated values")
    add_common(p)
    p.set_defaults(func=cmd_diffuse)

    p = sub.add_parser("bound-table",
                       help="minimum certified order per scale over random graphs")
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--p", type=float, default=0.05)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--scales", default="log:1e-2:1e2:25")
    p.add_argument("--true", action=argparse.BooleanOptionalAction, default=True,
                   help="include the measured minimum order (needs n small enough "
                        "for the dense oracle)")
    add_common(p)
    p.set_defaults(func=cmd_bound_table)

    p = sub.add_parser("bench", help="time basis build vs per-scale recombination")
    add_graph_flags(p)
    p.add_argument("--scales", required=True)
    p.add_argument("--trials", type=int, default=5)
    add_common(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen-graph", help="write a reproducible random graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_graph)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        args.func(args)
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
