"""Complete edge-labeled graphs with self loops, stored as the lower triangle.

Edges are unordered pairs; the canonical name of an edge is (i, j) with
i >= j, and the lexicographic position of that pair in the full edge list is
``edge_index(i, j) = i*(i+1)//2 + j``.  A node failure erases the node's whole
neighborhood; erasure is tracked with a mask rather than a sentinel value
because 0 is a perfectly legal label.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import ErasedAccessError, FieldMismatchError
from .field import GF, parse_field

MIN_NODES = 3
MAX_NODES = 10_000

TEXT_MAGIC = "graphcode-v1"


def check_node_count(n: int) -> int:
    if not MIN_NODES <= n <= MAX_NODES:
        raise ValueError(f"node count must be in [{MIN_NODES}, {MAX_NODES}], got {n}")
    return n


def num_edges(n: int) -> int:
    """Number of edges of the complete graph with self loops: C(n+1, 2)."""
    return n * (n + 1) // 2


def normalize_edge(i: int, j: int) -> tuple[int, int]:
    """Canonical (i, j) with i >= j; (i, j) and (j, i) name the same edge."""
    if i < 0 or j < 0:
        raise ValueError(f"negative node index in edge ({i}, {j})")
    return (i, j) if i >= j else (j, i)


def edge_index(i: int, j: int) -> int:
    """Position of edge (i, j) in the lexicographic lower-triangle order."""
    i, j = normalize_edge(i, j)
    return i * (i + 1) // 2 + j


def edge_at(k: int) -> tuple[int, int]:
    """Inverse of edge_index."""
    if k < 0:
        raise ValueError("edge index must be nonnegative")
    i = (math.isqrt(8 * k + 1) - 1) // 2
    return i, k - i * (i + 1) // 2


def neighborhood(n: int, m: int) -> list[tuple[int, int]]:
    """The n edges incident to node m, in lexicographic order.

    Entry l of the result is the edge joining node m and node l.
    """
    check_node_count(n)
    if not 0 <= m < n:
        raise ValueError(f"node {m} out of range for n={n}")
    return [(m, l) for l in range(m + 1)] + [(l, m) for l in range(m + 1, n)]


def failure_edges(n: int, failed) -> list[tuple[int, int]]:
    """Union of the neighborhoods of the failed nodes, in lexicographic order."""
    check_node_count(n)
    failed = set(failed)
    for m in failed:
        if not 0 <= m < n:
            raise ValueError(f"node {m} out of range for n={n}")
    edges = set()
    for m in failed:
        edges.update(neighborhood(n, m))
    return sorted(edges)


class LabeledGraph:
    """A complete graph on n nodes with field-valued edge labels.

    Labels live in ``labels`` (numpy int64, length C(n+1,2), lexicographic
    edge order); ``erased`` is a boolean mask of the same length.  Masked
    positions always store 0 so equal graphs compare equal bit-for-bit.
    Public operations are pure; decoders mutate only their own copies.
    """

    __slots__ = ("n", "gf", "labels", "erased")

    def __init__(self, n: int, gf: GF, labels=None, erased=None):
        check_node_count(n)
        self.n = n
        self.gf = gf
        t = num_edges(n)
        if labels is None:
            self.labels = np.zeros(t, dtype=np.int64)
        else:
            arr = gf.validate_arr(np.array(labels, dtype=np.int64))
            if arr.shape != (t,):
                raise ValueError(f"expected {t} labels, got {arr.shape}")
            self.labels = arr
        mask = np.zeros(t, dtype=bool)
        if erased is not None:
            if isinstance(erased, np.ndarray) and erased.dtype == bool:
                if erased.shape != (t,):
                    raise ValueError("bad erasure mask shape")
                mask |= erased
            else:
                for e in erased:
                    mask[edge_index(*e)] = True
        self.erased = mask
        self.labels[self.erased] = 0

    # -- access ---------------------------------------------------------------

    def _index(self, i: int, j: int) -> int:
        i, j = normalize_edge(i, j)
        if i >= self.n:
            raise ValueError(f"node {i} out of range for n={self.n}")
        return i * (i + 1) // 2 + j

    def label(self, i: int, j: int) -> int:
        k = self._index(i, j)
        if self.erased[k]:
            raise ErasedAccessError(f"edge ({i},{j}) is erased")
        return int(self.labels[k])

    def is_erased(self, i: int, j: int) -> bool:
        return bool(self.erased[self._index(i, j)])

    def set_label(self, i: int, j: int, value: int) -> None:
        """Assign a label on a non-erased edge (builder use)."""
        k = self._index(i, j)
        if self.erased[k]:
            raise ErasedAccessError(f"edge ({i},{j}) is erased; use fill()")
        self.labels[k] = self.gf.validate(value)

    def fill(self, i: int, j: int, value: int) -> None:
        """Recover an erased edge: store the value and clear its mask bit."""
        k = self._index(i, j)
        if not self.erased[k]:
            raise ValueError(f"edge ({i},{j}) is not erased")
        self.labels[k] = self.gf.validate(value)
        self.erased[k] = False

    def erased_edges(self) -> list[tuple[int, int]]:
        return [edge_at(int(k)) for k in np.nonzero(self.erased)[0]]

    @property
    def has_erasures(self) -> bool:
        return bool(self.erased.any())

    def edge_vector(self, edges) -> np.ndarray:
        """Labels of the given edge set in lexicographic order."""
        idx = sorted(self._index(*e) for e in edges)
        if len(set(idx)) != len(idx):
            raise ValueError("duplicate edges in set")
        for k in idx:
            if self.erased[k]:
                raise ErasedAccessError(f"edge {edge_at(k)} is erased")
        return self.labels[idx].copy()

    # -- pure operations --------------------------------------------------------

    def copy(self) -> "LabeledGraph":
        return LabeledGraph(self.n, self.gf, self.labels.copy(), self.erased.copy())

    def erase_nodes(self, failed) -> "LabeledGraph":
        """Copy of the graph with every edge of the failed nodes erased."""
        mask = self.erased.copy()
        for i, j in failure_edges(self.n, failed):
            mask[edge_index(i, j)] = True
        return LabeledGraph(self.n, self.gf, self.labels.copy(), mask)

    def erase_edges(self, edges) -> "LabeledGraph":
        """Copy of the graph with the given individual edges erased."""
        mask = self.erased.copy()
        for e in edges:
            mask[self._index(*e)] = True
        return LabeledGraph(self.n, self.gf, self.labels.copy(), mask)

    def _check_compatible(self, other: "LabeledGraph") -> None:
        if self.n != other.n:
            raise ValueError("graph sizes differ")
        if self.gf != other.gf:
            raise FieldMismatchError(f"{self.gf.name} vs {other.gf.name}")
        if self.has_erasures or other.has_erasures:
            raise ErasedAccessError("arithmetic on erased graphs")

    def __add__(self, other: "LabeledGraph") -> "LabeledGraph":
        self._check_compatible(other)
        return LabeledGraph(self.n, self.gf, self.gf.add_arr(self.labels, other.labels))

    def scaled(self, alpha: int) -> "LabeledGraph":
        if self.has_erasures:
            raise ErasedAccessError("arithmetic on erased graphs")
        alpha = self.gf.validate(alpha)
        return LabeledGraph(self.n, self.gf, self.gf.mul_arr(self.labels, np.int64(alpha)))

    def adjacency(self) -> np.ndarray:
        """Symmetric n x n adjacency view (computed, never stored)."""
        if self.has_erasures:
            raise ErasedAccessError("adjacency of an erased graph")
        a = np.zeros((self.n, self.n), dtype=np.int64)
        for k, v in enumerate(self.labels):
            i, j = edge_at(k)
            a[i, j] = a[j, i] = v
        return a

    def lower_triangle(self) -> np.ndarray:
        """n x n view with entries above the diagonal zeroed."""
        a = np.zeros((self.n, self.n), dtype=np.int64)
        for k, v in enumerate(self.labels):
            i, j = edge_at(k)
            a[i, j] = v
        return a

    def __eq__(self, other):
        return (
            isinstance(other, LabeledGraph)
            and self.n == other.n
            and self.gf == other.gf
            and bool(np.array_equal(self.labels, other.labels))
            and bool(np.array_equal(self.erased, other.erased))
        )

    def __repr__(self):
        er = int(self.erased.sum())
        return f"LabeledGraph(n={self.n}, {self.gf.name}, erased={er})"

    # -- serialization ------------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"{TEXT_MAGIC} n={self.n} field={self.gf.name}"]
        if self.has_erasures:
            lines.append("erased=" + ",".join(f"{i}:{j}" for i, j in self.erased_edges()))
        for i in range(self.n):
            row = self.labels[edge_index(i, 0) : edge_index(i, i) + 1]
            lines.append(" ".join(str(int(v)) for v in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LabeledGraph":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty graph file")
        head = lines[0].split()
        if len(head) != 3 or head[0] != TEXT_MAGIC:
            raise ValueError(f"bad header {lines[0]!r}")
        if not head[1].startswith("n=") or not head[2].startswith("field="):
            raise ValueError(f"bad header {lines[0]!r}")
        n = int(head[1][2:])
        gf = parse_field(head[2][6:])
        body = lines[1:]
        erased = []
        if body and body[0].startswith("erased="):
            spec = body[0][len("erased=") :]
            if spec:
                for pair in spec.split(","):
                    i, j = pair.split(":")
                    erased.append(normalize_edge(int(i), int(j)))
            body = body[1:]
        if len(body) != n:
            raise ValueError(f"expected {n} label rows, got {len(body)}")
        values = []
        for i, ln in enumerate(body):
            row = [int(tok) for tok in ln.split()]
            if len(row) != i + 1:
                raise ValueError(f"row {i} must have {i + 1} entries, got {len(row)}")
            values.extend(row)
        return cls(n, gf, values, erased)

    def to_json_obj(self) -> dict:
        obj = {
            "version": TEXT_MAGIC,
            "n": self.n,
            "field": self.gf.name,
            "erased": [f"{i}:{j}" for i, j in self.erased_edges()],
            "rows": [
                [int(v) for v in self.labels[edge_index(i, 0) : edge_index(i, i) + 1]]
                for i in range(self.n)
            ],
        }
        return obj

    @classmethod
    def from_json_obj(cls, obj: dict) -> "LabeledGraph":
        if obj.get("version") != TEXT_MAGIC:
            raise ValueError(f"bad version {obj.get('version')!r}")
        n = int(obj["n"])
        gf = parse_field(obj["field"])
        erased = []
        for item in obj.get("erased", []):
            if isinstance(item, str):
                i, j = item.split(":")
            else:
                i, j = item
            erased.append(normalize_edge(int(i), int(j)))
        rows = obj["rows"]
        if len(rows) != n:
            raise ValueError(f"expected {n} rows, got {len(rows)}")
        values = []
        for i, row in enumerate(rows):
            if len(row) != i + 1:
                raise ValueError(f"row {i} must have {i + 1} entries")
            values.extend(int(v) for v in row)
        return cls(n, gf, values, erased)

    @classmethod
    def from_string(cls, data: str) -> "LabeledGraph":
        """Parse either the text format or its JSON mirror."""
        if data.lstrip().startswith("{"):
            return cls.from_json_obj(json.loads(data))
        return cls.from_text(data)

    def save(self, path, fmt: str = "text") -> None:
        with open(path, "w", encoding="utf-8") as fh:
            if fmt == "json":
                json.dump(self.to_json_obj(), fh, indent=None, separators=(",", ":"))
                fh.write("\n")
            else:
                fh.write(self.to_text())

    @classmethod
    def load(cls, path) -> "LabeledGraph":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_string(fh.read())


def failed_nodes_of(g: LabeledGraph) -> set[int] | None:
    """The failed-node set when the erasure mask is a union of neighborhoods.

    A node is failed exactly when its self loop is erased (self loops belong
    to a single neighborhood).  Returns None when the mask is not a node
    failure pattern.
    """
    failed = {i for i in range(g.n) if g.erased[edge_index(i, i)]}
    expect = np.zeros(num_edges(g.n), dtype=bool)
    for i, j in failure_edges(g.n, failed):
        expect[edge_index(i, j)] = True
    if not np.array_equal(expect, g.erased):
        return None
    return failed
