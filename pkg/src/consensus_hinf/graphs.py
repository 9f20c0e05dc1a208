"""Weighted undirected graphs: construction, named families, density, and I/O.

Graphs are dense adjacency matrices with symmetric nonnegative weights and a
zero diagonal.  Two interchange formats are supported and round-trip exactly:

* edge-list text, one edge per line ``i j w`` (0-based indices, ``#`` comments
  and blank lines ignored);
* JSON documents ``{"n": int, "edges": [[i, j, w], ...]}``.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import GraphInputError

# Ingested matrices may disagree across the diagonal by serialization noise up
# to this absolute tolerance; larger mismatches are modeling errors.
SYMMETRY_TOL = 1e-12


class FamilyKind(str, Enum):
    COMPLETE = "complete"
    STAR = "star"
    PATH = "path"
    RING = "ring"


@dataclass(frozen=True)
class Graph:
    """Immutable weighted undirected graph on ``n >= 2`` vertices.

    The adjacency matrix is validated on construction: it must be square,
    exactly symmetric, nonnegative, and have a zero diagonal.  The stored
    array is a read-only copy, so instances are safe to share across threads.
    """

    n: int
    adjacency: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.adjacency, dtype=float)
        if a.ndim != 2 or a.shape != (self.n, self.n):
            raise GraphInputError(
                f"adjacency must be {self.n}x{self.n}, got shape {a.shape}"
            )
        if self.n < 2:
            raise GraphInputError("a graph needs at least 2 vertices")
        if not np.all(np.isfinite(a)):
            raise GraphInputError("adjacency contains non-finite weights")
        if not np.array_equal(a, a.T):
            raise GraphInputError("adjacency must be symmetric")
        if np.any(np.diagonal(a) != 0.0):
            raise GraphInputError("self-loops are not allowed (diagonal must be zero)")
        if np.any(a < 0.0):
            raise GraphInputError("edge weights must be nonnegative")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "adjacency", a)

    def edges(self) -> list[tuple[int, int, float]]:
        """Present edges as ``(i, j, w)`` with ``i < j`` and ``w > 0``."""
        i_idx, j_idx = np.nonzero(np.triu(self.adjacency, 1))
        return [(int(i), int(j), float(self.adjacency[i, j])) for i, j in zip(i_idx, j_idx)]


@dataclass(frozen=True)
class GraphFamily:
    """A named 0-1 weighted graph family instance.

    ``k`` is the neighbor radius and applies to ring lattices only, which
    require ``n >= 2k + 1``.
    """

    kind: FamilyKind
    n: int
    k: int | None = None

    def __post_init__(self):
        kind = FamilyKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if self.n < 2:
            raise ValueError(f"{kind.value} graph needs n >= 2, got n={self.n}")
        if kind is FamilyKind.RING:
            if self.k is None or self.k < 1:
                raise ValueError("ring lattice needs a neighbor radius k >= 1")
            if self.n < 2 * self.k + 1:
                raise ValueError(
                    f"ring lattice needs n >= 2k+1, got n={self.n}, k={self.k}"
                )
        elif self.k is not None:
            raise ValueError(f"k only applies to ring lattices, not {kind.value}")

    def label(self) -> str:
        if self.kind is FamilyKind.RING:
            return f"C_{{{self.k},{self.n}}}"
        prefix = {"complete": "K", "star": "S", "path": "P"}[self.kind.value]
        return f"{prefix}_{self.n}"


def complete_graph(n: int) -> Graph:
    a = np.ones((n, n)) - np.eye(n)
    return Graph(n, a)


def star_graph(n: int) -> Graph:
    """Hub vertex 0 adjacent to every other vertex."""
    a = np.zeros((n, n))
    a[0, 1:] = 1.0
    a[1:, 0] = 1.0
    return Graph(n, a)


def path_graph(n: int) -> Graph:
    a = np.zeros((n, n))
    idx = np.arange(n - 1)
    a[idx, idx + 1] = 1.0
    a[idx + 1, idx] = 1.0
    return Graph(n, a)


def ring_lattice(n: int, k: int) -> Graph:
    """2k-regular ring: each vertex linked to its k nearest neighbors each way."""
    a = np.zeros((n, n))
    for d in range(1, k + 1):
        idx = np.arange(n)
        a[idx, (idx + d) % n] = 1.0
        a[(idx + d) % n, idx] = 1.0
    return Graph(n, a)


def build_family(family: GraphFamily) -> Graph:
    """Construct the 0-1 weighted graph for a family instance."""
    if family.kind is FamilyKind.COMPLETE:
        return complete_graph(family.n)
    if family.kind is FamilyKind.STAR:
        return star_graph(family.n)
    if family.kind is FamilyKind.PATH:
        return path_graph(family.n)
    return ring_lattice(family.n, family.k)


def density(g: Graph) -> Fraction:
    """Fraction of present edges out of the n(n-1)/2 possible ones.

    An edge is present iff its weight is strictly positive; weights below
    machine noise must be pruned by the caller.  The result is exact.
    """
    eps = int(np.count_nonzero(np.triu(g.adjacency, 1) > 0.0))
    return Fraction(eps, g.n * (g.n - 1) // 2)


def components(g: Graph) -> list[list[int]]:
    """Connected components by breadth-first search, each sorted ascending."""
    seen = [False] * g.n
    out: list[list[int]] = []
    for start in range(g.n):
        if seen[start]:
            continue
        comp = []
        queue = deque([start])
        seen[start] = True
        while queue:
            u = queue.popleft()
            comp.append(u)
            for v in np.nonzero(g.adjacency[u] > 0.0)[0]:
                if not seen[v]:
                    seen[v] = True
                    queue.append(int(v))
        out.append(sorted(comp))
    return out


def _graph_from_entries(n: int, entries: list[tuple[str, int, int, float]]) -> Graph:
    """Assemble a symmetrized adjacency matrix from (where, i, j, w) entries."""
    if n < 2:
        raise GraphInputError(f"need at least 2 vertices, got n={n}")
    by_pair: dict[tuple[int, int], list[float]] = {}
    for where, i, j, w in entries:
        if not (0 <= i < n and 0 <= j < n):
            raise GraphInputError(f"{where}: vertex index out of range for n={n}")
        if not np.isfinite(w):
            raise GraphInputError(f"{where}: non-finite weight {w}")
        if w < 0.0:
            raise GraphInputError(f"{where}: negative weight {w}")
        if i == j:
            if w != 0.0:
                raise GraphInputError(f"{where}: self-loop with nonzero weight {w}")
            continue
        by_pair.setdefault((min(i, j), max(i, j)), []).append(w)
    a = np.zeros((n, n))
    for (i, j), ws in by_pair.items():
        if max(ws) - min(ws) > SYMMETRY_TOL:
            raise GraphInputError(
                f"edge ({i},{j}): weights disagree beyond {SYMMETRY_TOL:g}: {ws}"
            )
        w = float(np.mean(ws))
        a[i, j] = w
        a[j, i] = w
    return Graph(n, a)


def parse_edgelist(text: str) -> Graph:
    """Parse edge-list text; vertex count is one past the largest index."""
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise GraphInputError(f"line {lineno}: expected 'i j w', got {raw!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
            w = float(parts[2])
        except ValueError as exc:
            raise GraphInputError(f"line {lineno}: {exc}") from exc
        entries.append((f"line {lineno}", i, j, w))
    if not entries:
        raise GraphInputError("edge list is empty")
    n = max(max(i, j) for _, i, j, _ in entries) + 1
    return _graph_from_entries(n, entries)


def parse_graph_json(text: str) -> Graph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphInputError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "n" not in doc or "edges" not in doc:
        raise GraphInputError('JSON graph must be {"n": int, "edges": [[i, j, w], ...]}')
    try:
        n = int(doc["n"])
    except (TypeError, ValueError) as exc:
        raise GraphInputError(f"invalid vertex count: {doc['n']!r}") from exc
    entries = []
    for pos, edge in enumerate(doc["edges"]):
        if not isinstance(edge, (list, tuple)) or len(edge) != 3:
            raise GraphInputError(f"edge #{pos}: expected [i, j, w], got {edge!r}")
        try:
            entries.append((f"edge #{pos}", int(edge[0]), int(edge[1]), float(edge[2])))
        except (TypeError, ValueError) as exc:
            raise GraphInputError(f"edge #{pos}: {exc}") from exc
    return _graph_from_entries(n, entries)


def format_edgelist(g: Graph) -> str:
    lines = [f"{i} {j} {w!r}" for i, j, w in g.edges()]
    return "\n".join(lines) + "\n"


def format_graph_json(g: Graph) -> str:
    return json.dumps({"n": g.n, "edges": [[i, j, w] for i, j, w in g.edges()]})


def load_graph(path: str | Path) -> Graph:
    """Load a graph file, sniffing JSON vs edge-list format."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise GraphInputError(f"cannot read {path}: {exc}") from exc
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        return parse_graph_json(text)
    return parse_edgelist(text)


def save_graph(g: Graph, path: str | Path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".json":
        path.write_text(format_graph_json(g) + "\n")
    else:
        path.write_text(format_edgelist(g))
