"""CSV readers and writers for graphs, points, signals and spectra.

All files are UTF-8 with a header row.  Floats are written with
``repr`` so they round-trip bit for bit.
"""

from __future__ import annotations

import csv
import io
import os
from typing import IO, Iterable, Sequence

import numpy as np

from graphsp import errors
from graphsp.graph import Graph, from_edge_list

EDGE_HEADER = ["src", "dst", "weight"]
SIGNAL_HEADER = ["node", "value"]
SPECTRUM_HEADER = ["index", "eigenvalue_re", "eigenvalue_im", "coefficient_re", "coefficient_im"]


def fmt(x: float) -> str:
    x = float(x)
    return repr(0.0 if x == 0 else x)


def _read_rows(path: str | os.PathLike, expected: Sequence[str] | None = None,
               prefix: Sequence[str] | None = None) -> tuple[list[str], list[list[str]]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except FileNotFoundError as exc:
        raise errors.InputError(f"no such file: {path}") from exc
    except (OSError, UnicodeDecodeError) as exc:
        raise errors.InputError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise errors.InputError(f"{path}: empty file, expected a header row")
    header = [c.strip() for c in rows[0]]
    if expected is not None and header != list(expected):
        raise errors.InputError(f"{path}: header {header} != {list(expected)}")
    if prefix is not None and header[: len(prefix)] != list(prefix):
        raise errors.InputError(f"{path}: header must start with {list(prefix)}")
    body = rows[1:]
    for lineno, r in enumerate(body, start=2):
        if len(r) != len(header):
            raise errors.InputError(f"{path}:{lineno}: expected {len(header)} fields, got {len(r)}")
    return header, body


def _floats(path, body: list[list[str]], ncols: int) -> np.ndarray:
    try:
        return np.array([[float(c) for c in r] for r in body], dtype=np.float64).reshape(-1, ncols)
    except ValueError as exc:
        raise errors.InputError(f"{path}: non-numeric field ({exc})") from exc


def _int_column(path, col: np.ndarray, what: str) -> np.ndarray:
    if np.any(col != np.round(col)) or np.any(~np.isfinite(col)):
        raise errors.InputError(f"{path}: {what} must be integers")
    return col.astype(np.int64)


def read_edge_rows(path) -> np.ndarray:
    _, body = _read_rows(path, EDGE_HEADER)
    return _floats(path, body, 3)


def load_graph(path, directed: bool = False, n: int | None = None) -> Graph:
    """Load an edge-list CSV.  ``n`` defaults to the largest index plus one."""
    rows = read_edge_rows(path)
    if n is None:
        n = int(rows[:, :2].max()) + 1 if rows.size else 1
    return from_edge_list(rows, n, directed=directed)


def write_graph(g: Graph, fh: IO[str]) -> None:
    """Edge list sorted by (src, dst); undirected edges appear in both directions."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(EDGE_HEADER)
    for i, j, x in zip(g.src, g.dst, g.weight):
        w.writerow([int(i), int(j), fmt(x)])


def read_points(path) -> np.ndarray:
    """Points CSV ``id,x,y[,z...]``; returns coordinates ordered by id."""
    header, body = _read_rows(path, prefix=["id", "x"])
    data = _floats(path, body, len(header))
    ids = _int_column(path, data[:, 0], "ids")
    if not np.array_equal(np.sort(ids), np.arange(ids.size)):
        raise errors.InputError(f"{path}: ids must be 0..n-1, each exactly once")
    out = np.empty((ids.size, data.shape[1] - 1))
    out[ids] = data[:, 1:]
    return out


def read_signal(path, n: int) -> np.ndarray:
    """Full signal CSV ``node,value[,value_im]`` covering every node once."""
    header, body = _read_rows(path, prefix=SIGNAL_HEADER)
    if header not in (SIGNAL_HEADER, SIGNAL_HEADER + ["value_im"]):
        raise errors.InputError(f"{path}: unexpected header {header}")
    data = _floats(path, body, len(header))
    nodes = _int_column(path, data[:, 0], "nodes")
    if not np.array_equal(np.sort(nodes), np.arange(n)):
        raise errors.InputError(f"{path}: signal must list every node 0..{n - 1} exactly once")
    values = data[:, 1] if len(header) == 2 else data[:, 1] + 1j * data[:, 2]
    out = np.empty(n, dtype=values.dtype)
    out[nodes] = values
    return out


def write_signal(values: np.ndarray, fh: IO[str]) -> None:
    values = np.asarray(values)
    w = csv.writer(fh, lineterminator="\n")
    if np.iscomplexobj(values):
        w.writerow(SIGNAL_HEADER + ["value_im"])
        for i, v in enumerate(values):
            w.writerow([i, fmt(v.real), fmt(v.imag)])
    else:
        w.writerow(SIGNAL_HEADER)
        for i, v in enumerate(values):
            w.writerow([i, fmt(v)])


def read_samples(path, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Samples CSV ``node,value``; returns (nodes, values) sorted by node."""
    _, body = _read_rows(path, SIGNAL_HEADER)
    data = _floats(path, body, 2)
    nodes = _int_column(path, data[:, 0], "nodes")
    if np.any((nodes < 0) | (nodes >= n)):
        raise errors.InputError(f"{path}: node index outside [0, {n})")
    if np.unique(nodes).size != nodes.size:
        raise errors.InputError(f"{path}: node sampled twice")
    order = np.argsort(nodes)
    return nodes[order], data[order, 1]


def write_nodes(nodes: Iterable[int], fh: IO[str]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["node"])
    for i in nodes:
        w.writerow([int(i)])


def read_nodes(path) -> list[int]:
    _, body = _read_rows(path, ["node"])
    return _int_column(path, _floats(path, body, 1)[:, 0], "nodes").tolist()


def write_spectrum(eigenvalues, ordering, coefficients, fh: IO[str]) -> None:
    """One row per frequency, low to high.

    ``index`` is the eigenpair's solver index.  Coefficient fields are
    left empty when no signal was transformed.
    """
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SPECTRUM_HEADER)
    lam = np.asarray(eigenvalues, dtype=np.complex128)
    scale = max(1.0, float(np.abs(lam).max(initial=0.0)))
    for k in ordering:
        ev = lam[k]
        re = 0.0 if abs(ev.real) <= 1e-14 * scale else ev.real
        im = 0.0 if abs(ev.imag) <= 1e-14 * scale else ev.imag
        if coefficients is None:
            c = ["", ""]
        else:
            ck = complex(coefficients[k])
            c = [fmt(ck.real), fmt(ck.imag)]
        w.writerow([int(k), fmt(re), fmt(im), *c])


def to_string(writer, *args) -> str:
    buf = io.StringIO()
    writer(*args, buf)
    return buf.getvalue()
