"""Command-line front end.

Exit status: 0 on success, 2 for unreadable or invalid input, 3 when the
numerical model rejects a well-formed input.
"""

from __future__ import annotations

import argparse
import contextlib
import os
import sys
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from graphsp import __version__, errors
from graphsp import io as gio
from graphsp.filtering import (
    apply_exact,
    chebyshev_apply,
    chebyshev_fit,
    kernel_from_json,
    spectral_upper_bound,
)
from graphsp.graph import ShiftKind, cycle_graph, knn_graph, shift
from graphsp.sampling import (
    BandlimitedModel,
    SamplingSet,
    detect_outliers,
    greedy_select,
    random_bandlimited,
    reconstruct,
)
from graphsp.spectral import TV_NORM, eigendecompose, gft, spectral_radius, total_variation

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


@dataclass
class RunConfig:
    command: str
    graph: str | None = None
    directed: bool = False
    shift: ShiftKind = ShiftKind.LAPLACIAN
    nodes: int | None = None
    signal: str | None = None
    out: str | None = None
    seed: int | None = None
    options: dict = field(default_factory=dict)

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        common = {"command", "graph", "directed", "shift", "nodes", "signal", "out", "seed", "func"}
        return cls(
            command=ns.command,
            graph=ns.graph,
            directed=ns.directed,
            shift=ShiftKind(ns.shift),
            nodes=ns.nodes,
            signal=getattr(ns, "signal", None),
            out=ns.out,
            seed=ns.seed,
            options={k: v for k, v in vars(ns).items() if k not in common},
        )

    def load_graph(self):
        if self.graph is None:
            raise errors.InputError("--graph is required")
        return gio.load_graph(self.graph, directed=self.directed, n=self.nodes)

    def load_signal(self, n: int) -> np.ndarray:
        if self.signal is None:
            raise errors.InputError("--signal is required")
        return gio.read_signal(self.signal, n)


@contextlib.contextmanager
def _output(path: str | None):
    if path is None:
        yield sys.stdout
        return
    try:
        fh = open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise errors.InputError(f"cannot write {path}: {exc}") from exc
    with fh:
        yield fh


def cmd_graph(cfg: RunConfig) -> int:
    o = cfg.options
    if o["points"] is not None:
        g = knn_graph(gio.read_points(o["points"]), o["k"], o["sigma"])
    elif o["cycle"] is not None:
        g = cycle_graph(o["cycle"], directed=cfg.directed)
    else:
        g = cfg.load_graph()
    with _output(cfg.out) as fh:
        gio.write_graph(g, fh)
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig) -> int:
    g = cfg.load_graph()
    op = shift(g, cfg.shift)
    s = cfg.load_signal(g.n) if cfg.signal else None
    basis = eigendecompose(op)
    coeffs = gft(basis, s) if s is not None else None
    with _output(cfg.out) as fh:
        gio.write_spectrum(basis.eigenvalues, basis.ordering, coeffs, fh)
    return EXIT_OK


def _kernel(spec: str):
    if os.path.exists(spec):
        with open(spec, encoding="utf-8") as fh:
            spec = fh.read()
    return kernel_from_json(spec)


def cmd_filter(cfg: RunConfig) -> int:
    o = cfg.options
    g = cfg.load_graph()
    op = shift(g, cfg.shift)
    s = cfg.load_signal(g.n)
    kernel = _kernel(o["kernel"])
    if o["method"] == "chebyshev":
        ub = o["lambda_ub"]
        if ub is None:
            if op.kind is not ShiftKind.NORMALIZED and cfg.seed is None:
                raise errors.InputError(
                    "--seed is required to estimate the spectral bound (or pass --lambda-ub)"
                )
            ub = spectral_upper_bound(op, seed=cfg.seed or 0)
        f = chebyshev_fit(kernel, o["degree"], ub)
        out = chebyshev_apply(op, f, s, seed=cfg.seed or 0)
        if o["coeffs_out"]:
            with _output(o["coeffs_out"]) as fh:
                fh.write(f.to_csv())
    else:
        out = apply_exact(eigendecompose(op), kernel, s)
    with _output(cfg.out) as fh:
        gio.write_signal(out, fh)
    if o["compare"] and o["method"] == "chebyshev":
        exact = apply_exact(eigendecompose(op), kernel, s)
        print(f"max_abs_diff={gio.fmt(np.abs(out - exact).max())}")
        print(f"signal_norm={gio.fmt(np.linalg.norm(s))}")
    return EXIT_OK


def _model(cfg: RunConfig, bandwidth: int):
    g = cfg.load_graph()
    basis = eigendecompose(shift(g, cfg.shift))
    if not 1 <= bandwidth <= basis.n:
        raise errors.InputError(f"-K must lie in [1, {basis.n}]")
    return BandlimitedModel(basis, bandwidth)


def cmd_sample(cfg: RunConfig) -> int:
    model = _model(cfg, cfg.options["K"])
    sset = greedy_select(model, cfg.options["m"])
    with _output(cfg.out) as fh:
        gio.write_nodes(sset.nodes, fh)
    return EXIT_OK


def cmd_reconstruct(cfg: RunConfig) -> int:
    model = _model(cfg, cfg.options["K"])
    nodes, y = gio.read_samples(cfg.options["samples"], model.n)
    sset = SamplingSet(tuple(nodes.tolist()))
    s = reconstruct(model, sset, y)
    residual = float(np.linalg.norm(s[nodes] - y))
    with _output(cfg.out) as fh:
        gio.write_signal(s, fh)
    print(f"residual_norm={gio.fmt(residual)}")
    return EXIT_OK


def cmd_outliers(cfg: RunConfig) -> int:
    o = cfg.options
    g = cfg.load_graph()
    op = shift(g, cfg.shift)
    s = cfg.load_signal(g.n)
    found = detect_outliers(op, s, o["cutoff"], o["tau"])
    with _output(cfg.out) as fh:
        gio.write_nodes(found, fh)
    return EXIT_OK


def cmd_tv(cfg: RunConfig) -> int:
    g = cfg.load_graph()
    op = shift(g, ShiftKind.ADJACENCY)
    s = cfg.load_signal(g.n)
    lam_max = spectral_radius(op)
    tv = total_variation(op, s, lambda_max=lam_max)
    with _output(cfg.out) as fh:
        fh.write("norm,lambda_max,tv\n")
        fh.write(f"{TV_NORM},{gio.fmt(lam_max)},{gio.fmt(tv)}\n")
    return EXIT_OK


def cmd_bandlimited(cfg: RunConfig) -> int:
    model = _model(cfg, cfg.options["K"])
    s = random_bandlimited(model, cfg.seed)
    with _output(cfg.out) as fh:
        gio.write_signal(s, fh)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", metavar="PATH", help="edge-list CSV (src,dst,weight)")
    common.add_argument("--directed", action="store_true", help="treat edges as directed")
    common.add_argument("--shift", choices=[k.value for k in ShiftKind], default="laplacian")
    common.add_argument("--nodes", type=int, help="node count (default: max index + 1)")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--seed", type=int, help="seed for every random draw")

    parser = argparse.ArgumentParser(prog="graphsp", description="Graph signal processing tools.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func: Callable, help: str, signal: bool = False):
        p = sub.add_parser(name, parents=[common], help=help)
        if signal:
            p.add_argument("--signal", metavar="PATH", required=True, help="signal CSV (node,value)")
        p.set_defaults(func=func)
        return p

    p = add("graph", cmd_graph, "build or normalize a graph and write its edge list")
    p.add_argument("--points", metavar="PATH", help="points CSV (id,x,y,...) for a k-NN graph")
    p.add_argument("-k", type=int, default=4, help="neighbours per point")
    p.add_argument("--sigma", type=float, default=1.0, help="Gaussian kernel width")
    p.add_argument("--cycle", type=int, metavar="N", help="ring on N nodes")

    p = add("spectrum", cmd_spectrum, "eigenvalues (and GFT of --signal) in frequency order")
    p.add_argument("--signal", metavar="PATH", help="signal CSV to transform")

    p = add("filter", cmd_filter, "apply a graph filter", signal=True)
    p.add_argument("--kernel", required=True, help='filter JSON or a path to it, e.g. \'{"kind": "heat", "t": 1}\'')
    p.add_argument("--method", choices=["exact", "chebyshev"], default="exact")
    p.add_argument("--degree", type=int, default=30, help="Chebyshev degree")
    p.add_argument("--lambda-ub", type=float, dest="lambda_ub", help="Chebyshev spectral bound")
    p.add_argument("--coeffs-out", dest="coeffs_out", metavar="PATH", help="write Chebyshev coefficients (k,c_k)")
    p.add_argument("--compare", action="store_true", help="also run the exact route and report the difference")

    p = add("sample", cmd_sample, "greedy sampling set for a bandlimited model")
    p.add_argument("-K", type=int, required=True, help="bandwidth")
    p.add_argument("-m", type=int, required=True, help="number of samples")

    p = add("reconstruct", cmd_reconstruct, "least-squares recovery from samples")
    p.add_argument("-K", type=int, required=True, help="bandwidth")
    p.add_argument("--samples", metavar="PATH", required=True, help="samples CSV (node,value)")

    p = add("outliers", cmd_outliers, "high-pass outlier detection", signal=True)
    p.add_argument("--cutoff", type=float, required=True, help="high-pass cutoff frequency")
    p.add_argument("--tau", type=float, required=True, help="threshold in residual standard deviations")

    add("tv", cmd_tv, "total variation of a signal on the adjacency shift", signal=True)

    p = add("bandlimited", cmd_bandlimited, "random bandlimited signal (needs --seed)")
    p.add_argument("-K", type=int, required=True, help="bandwidth")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.command == "bandlimited" and ns.seed is None:
        parser.error("bandlimited requires --seed")
    cfg = RunConfig.from_args(ns)
    try:
        return ns.func(cfg)
    except errors.InputError as exc:
        print(f"graphsp: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except errors.GSPError as exc:
        print(f"graphsp: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except np.linalg.LinAlgError as exc:
        print(f"graphsp: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
