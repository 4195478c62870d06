"""Plain-text formats for graphs, matrices, filters and traces.

Graph edge list::

    50
    0 7
    0 12
    # pos 0 0.12345 0.67890

Line 1 is the node count, then one ``i j`` line per edge with ``i < j``;
positions are optional ``# pos i x y`` comment lines. Matrices are dense
whitespace-separated rows. A filter is the CSV line ``k, a0, ..., ak``.
"""
from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .filters import PolynomialFilter
from .graph import Graph

__all__ = [
    "fmt",
    "format_graph",
    "parse_graph",
    "write_graph",
    "read_graph",
    "format_matrix",
    "parse_matrix",
    "write_matrix",
    "read_matrix",
    "format_filter",
    "parse_filter",
    "write_csv",
    "trace_rows",
    "csv_text",
]

PathLike = Union[str, Path]


def fmt(x) -> str:
    """Round-trippable float text (17 significant digits); integers and blanks pass through."""
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def format_graph(g: Graph) -> str:
    lines = [str(g.n)]
    lines += [f"{i} {j}" for i, j in g.edges]
    if g.positions is not None:
        lines += [f"# pos {i} {fmt(x)} {fmt(y)}" for i, (x, y) in enumerate(g.positions)]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    n = None
    edges = []
    pos = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if parts and parts[0] == "pos":
                if len(parts) != 4:
                    raise ValueError(f"malformed position line: {raw!r}")
                pos[int(parts[1])] = (float(parts[2]), float(parts[3]))
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 1:
                raise ValueError("first line must hold the node count")
            n = int(parts[0])
            continue
        if len(parts) != 2:
            raise ValueError(f"malformed edge line: {raw!r}")
        i, j = int(parts[0]), int(parts[1])
        if not i < j:
            raise ValueError(f"edge lines must have i < j: {raw!r}")
        edges.append((i, j))
    if n is None:
        raise ValueError("empty graph file")
    positions = None
    if pos:
        if sorted(pos) != list(range(n)):
            raise ValueError("positions must be given for every node or none")
        positions = np.array([pos[i] for i in range(n)])
    return Graph(n, edges, positions)


def write_graph(g: Graph, path: PathLike) -> None:
    Path(path).write_text(format_graph(g))


def read_graph(path: PathLike) -> Graph:
    return parse_graph(Path(path).read_text())


def format_matrix(W) -> str:
    W = np.atleast_2d(np.asarray(W, dtype=float))
    return "".join(" ".join(fmt(v) for v in row) + "\n" for row in W)


def parse_matrix(text: str) -> np.ndarray:
    rows = [[float(v) for v in line.split()] for line in text.splitlines()
            if line.strip() and not line.lstrip().startswith("#")]
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("matrix rows must be non-empty and of equal length")
    return np.array(rows)


def write_matrix(W, path: PathLike) -> None:
    Path(path).write_text(format_matrix(W))


def read_matrix(path: PathLike) -> np.ndarray:
    return parse_matrix(Path(path).read_text())


def format_filter(f: PolynomialFilter) -> str:
    return ", ".join([str(f.k)] + [fmt(c) for c in f.coeffs])


def parse_filter(line: str) -> PolynomialFilter:
    parts = [p.strip() for p in line.strip().split(",")]
    k = int(parts[0])
    coeffs = [float(p) for p in parts[1:]]
    if len(coeffs) != k + 1:
        raise ValueError(f"filter line declares k={k} but carries {len(coeffs)} coefficients")
    return PolynomialFilter(coeffs)


def write_csv(path_or_stream, header: Sequence[str], rows: Iterable[Sequence],
              comment: str = None) -> None:
    """Write rows with a header; floats use :func:`fmt` so output is byte-stable."""
    own = isinstance(path_or_stream, (str, Path))
    stream = open(path_or_stream, "w", newline="") if own else path_or_stream
    try:
        if comment:
            stream.write(f"# {comment}\n")
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    finally:
        if own:
            stream.close()


def trace_rows(trace, trial=None):
    for t, e in enumerate(trace.errors):
        yield (t, e) if trial is None else (trial, t, e)


def csv_text(header, rows, comment=None) -> str:
    buf = io.StringIO()
    write_csv(buf, header, rows, comment)
    return buf.getvalue()
