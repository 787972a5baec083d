"""Text format for coloured hypergraphs (``.cg``).

::

    n k c
    v1 ... vk color      # one line per edge, 1-based, vertices ascending

Blank lines and lines starting with ``#`` are ignored.
"""
from __future__ import annotations

import os
import tempfile

import numpy as np

from .core import ColoredHypergraph


class GraphFormatError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def parse_graph(text: str) -> ColoredHypergraph:
    header = None
    edges, colors, seen = [], [], set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            fields = [int(tok) for tok in line.split()]
        except ValueError:
            raise GraphFormatError(lineno, f"non-integer field in {line!r}") from None
        if header is None:
            if len(fields) != 3:
                raise GraphFormatError(lineno, "header must be 'n k c'")
            n, k, c = fields
            if k < 2 or n < k or c < 1:
                raise GraphFormatError(lineno, f"invalid header n={n} k={k} c={c}")
            header = (n, k, c)
            continue
        n, k, c = header
        if len(fields) != k + 1:
            raise GraphFormatError(lineno, f"expected {k} vertices and a colour")
        verts, color = fields[:k], fields[k]
        if any(not 1 <= v <= n for v in verts):
            raise GraphFormatError(lineno, f"vertex outside 1..{n}")
        if any(a >= b for a, b in zip(verts, verts[1:])):
            raise GraphFormatError(lineno, "vertices must be strictly ascending")
        if not 1 <= color <= c:
            raise GraphFormatError(lineno, f"colour outside 1..{c}")
        key = tuple(verts)
        if key in seen:
            raise GraphFormatError(lineno, "duplicate edge")
        seen.add(key)
        edges.append([v - 1 for v in verts])
        colors.append(color - 1)
    if header is None:
        raise GraphFormatError(0, "empty file")
    n, k, c = header
    return ColoredHypergraph(n, k, c, np.array(edges, dtype=np.int64).reshape(-1, k), colors)


def format_graph(G: ColoredHypergraph) -> str:
    lines = [f"{G.n} {G.k} {G.c}"]
    for e, col in zip(G.edges.tolist(), G.colors.tolist()):
        lines.append(" ".join(str(v + 1) for v in e) + f" {col + 1}")
    return "\n".join(lines) + "\n"


def read_graph(path) -> ColoredHypergraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def write_atomic(path, data: str) -> None:
    """Write via a temp file in the target directory, then rename."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_graph(path, G: ColoredHypergraph) -> None:
    write_atomic(path, format_graph(G))
