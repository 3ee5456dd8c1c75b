"""Optimal binary double-node-failure code for a prime number of nodes.

Checks come in two families over GF(2):

* row sets ``S_m``: for m < n-2 the edges joining node m to nodes 0..n-2
  (so the last node is left out), and ``S_{n-2}`` holding the self loops of
  nodes 0..n-2; n-1 checks of size n-1 each.
* diagonal sets ``D_m``: edges (k, l) with k, l != n-2 and k+l = m (mod n),
  plus the bridging edge (n-1, n-2) which belongs to every diagonal; n checks
  of size (n+1)/2 each.

Decoding a pair of failed nodes i < j < n-2 walks two zig-zag loops that
alternate a diagonal check (one new unknown, given the unknown resolved in
the previous step) with a row check (second unknown of the same row).  The
loop step is d = j - i (mod n); primality of n makes d invertible, which is
what guarantees the walk covers everything except a fixed three-edge
residual, finished off by one diagonal and two row checks.  Pairs touching
the two redundancy nodes go to the oracle decoder instead.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import (
    CorruptedInputError,
    NonPrimeNodeCountError,
    OutsideAlgorithmDomainError,
)
from .field import Matrix, field, is_prime
from .framework import (
    DecodeReport,
    GraphCodeSpec,
    ProvenanceEntry,
    oracle_decode,
    survivor_syndrome,
)
from .graphs import LabeledGraph, edge_index, failed_nodes_of, normalize_edge, num_edges


@dataclass(frozen=True)
class ParityFamily:
    """The row and diagonal edge sets for one value of n."""

    n: int
    row_sets: tuple  # index m in [n-1]
    diag_sets: tuple  # index m in [n]

    def failure_set(self, m: int) -> list[tuple[int, int]]:
        return [normalize_edge(m, l) for l in range(self.n)]


def _check_prime(n: int) -> None:
    if n < 5 or not is_prime(n):
        raise NonPrimeNodeCountError(f"need a prime n >= 5, got {n}")


@functools.lru_cache(maxsize=None)
def parity_sets(n: int) -> ParityFamily:
    """Build the row/diagonal edge sets for a prime n >= 5."""
    _check_prime(n)
    rows = []
    for m in range(n - 2):
        rows.append(tuple(sorted(normalize_edge(m, l) for l in range(n - 1))))
    rows.append(tuple((l, l) for l in range(n - 1)))
    diags = []
    keep = [k for k in range(n) if k != n - 2]
    for m in range(n):
        edges = {(n - 1, n - 2)}
        for k in keep:
            l = (m - k) % n
            if l != n - 2:
                edges.add(normalize_edge(k, l))
        diags.append(tuple(sorted(edges)))
    return ParityFamily(n, tuple(rows), tuple(diags))


def double_parity_code(n: int) -> GraphCodeSpec:
    """Assemble the binary check matrix: n-1 row checks then n diagonal checks."""
    fam = parity_sets(n)
    gf = field(2)
    h = np.zeros((2 * n - 1, num_edges(n)), dtype=np.int64)
    names = []
    for m, edges in enumerate(fam.row_sets):
        for i, j in edges:
            h[m, edge_index(i, j)] = 1
        names.append(f"S_{m}")
    for m, edges in enumerate(fam.diag_sets):
        for i, j in edges:
            h[n - 1 + m, edge_index(i, j)] = 1
        names.append(f"D_{m}")
    return GraphCodeSpec(n, gf, Matrix(gf, h), family="double", k_info=n - 2, row_names=names)


def encode_double(spec: GraphCodeSpec, info) -> LabeledGraph:
    """Systematic encode by filling the 2n-1 redundancy edges one check at a time.

    Order: cross edges of node n-2 (each the only unknown of one row check),
    the self loop of n-2 (self-loop check), the bridging edge (its diagonal
    has no other edge at node n-1), then the remaining edges of node n-1
    (one diagonal each).
    """
    n = spec.n
    fam = parity_sets(n)
    gf = spec.gf
    t = num_edges(n)
    labels = np.zeros(t, dtype=np.int64)
    k_edges = num_edges(n - 2)
    if isinstance(info, dict):
        if len(info) != k_edges:
            raise ValueError(f"expected {k_edges} information labels, got {len(info)}")
        for (i, j), v in info.items():
            k = edge_index(i, j)
            if k >= k_edges:
                raise ValueError(f"edge ({i},{j}) is not an information edge")
            labels[k] = gf.validate(v)
    else:
        arr = gf.validate_arr(np.asarray(info, dtype=np.int64))
        if arr.shape != (k_edges,):
            raise ValueError(f"expected {k_edges} information labels, got {arr.shape}")
        labels[:k_edges] = arr

    def solve_one(edges, target):
        acc = 0
        ti = edge_index(*target)
        for e in edges:
            k = edge_index(*e)
            if k != ti:
                acc = gf.add(acc, int(labels[k]))
        labels[ti] = gf.neg(acc)

    for l in range(n - 2):
        solve_one(fam.row_sets[l], (n - 2, l))
    solve_one(fam.row_sets[n - 2], (n - 2, n - 2))
    solve_one(fam.diag_sets[(2 * n - 3) % n], (n - 1, n - 2))
    for l in list(range(n - 2)) + [n - 1]:
        solve_one(fam.diag_sets[(n - 1 + l) % n], (n - 1, l))
    return LabeledGraph(n, gf, labels)


@dataclass(frozen=True)
class ZigzagSchedule:
    """Visit order of the two decode loops for a failed pair i < j < n-2."""

    n: int
    i: int
    j: int
    d: int
    x: int
    y: int
    s1: tuple  # first-loop row indices, t = 0..x
    s2: tuple  # first-loop diagonal indices
    s1b: tuple  # second-loop row indices, t = 0..y
    s2b: tuple  # second-loop diagonal indices

    @property
    def first_visits(self) -> set:
        return set(self.s1)

    @property
    def second_visits(self) -> set:
        return set(self.s1b)


def zigzag_schedule(n: int, i: int, j: int) -> ZigzagSchedule:
    _check_prime(n)
    if not (0 <= i < j <= n - 3):
        raise OutsideAlgorithmDomainError(f"pair ({i},{j}) not handled by the schedule")
    d = (j - i) % n
    dinv = pow(d, -1, n)
    x = (-1 - dinv) % n
    y = (-1 + dinv) % n
    s1 = tuple((-d * (t + 1) - 2) % n for t in range(x + 1))
    s2 = tuple((s + j) % n for s in s1)
    s1b = tuple((d * (t + 1) - 2) % n for t in range(y + 1))
    s2b = tuple((s + i) % n for s in s1b)
    return ZigzagSchedule(n, i, j, d, x, y, s1, s2, s1b, s2b)


@dataclass
class Syndromes:
    """Survivor sums of the row and diagonal checks for a failed pair."""

    n: int
    failed: tuple[int, int]
    row: np.ndarray  # length n-1; entries at failed indices are meaningless
    diag: np.ndarray  # length n

    def row_sum(self, m: int) -> int:
        if m in self.failed:
            raise ValueError(f"row syndrome {m} is undefined for failed pair {self.failed}")
        return int(self.row[m])

    def diag_sum(self, m: int) -> int:
        return int(self.diag[m])


def compute_syndromes(spec: GraphCodeSpec, g: LabeledGraph) -> Syndromes:
    """Survivor syndromes for a graph with exactly two failed nodes."""
    failed = failed_nodes_of(g)
    if failed is None or len(failed) != 2:
        raise ValueError("graph must have exactly two failed nodes")
    n = spec.n
    syn = survivor_syndrome(spec, g)
    i, j = sorted(failed)
    return Syndromes(n, (i, j), syn[: n - 1], syn[n - 1 :])


def decode_double(spec: GraphCodeSpec, g: LabeledGraph) -> DecodeReport:
    """Recover a two-node failure with the zig-zag walk plus residual finish.

    Failure patterns that are not a pair inside the information nodes go to
    the oracle decoder (same output contract).
    """
    n = spec.n
    failed = failed_nodes_of(g)
    if failed is None or len(failed) != 2:
        return oracle_decode(spec, g)
    i, j = sorted(failed)
    if j >= n - 2:
        return oracle_decode(spec, g)
    gf = spec.gf
    fam = parity_sets(n)
    sched = zigzag_schedule(n, i, j)
    syn = compute_syndromes(spec, g)
    work = g.copy()
    prov: list[ProvenanceEntry] = []

    def fill(a, b, value, constraint, loop, t):
        e = normalize_edge(a, b)
        work.fill(e[0], e[1], value)
        prov.append(ProvenanceEntry(e, constraint, loop, t))

    b_prev = 0
    for t, (s1, s2) in enumerate(zip(sched.s1, sched.s2)):
        if s1 not in (i, j, n - 1):
            v = gf.neg(gf.add(syn.diag_sum(s2), b_prev))
            fill(s1, j, v, f"D_{s2}", 1, t)
            w = gf.neg(gf.add(syn.row_sum(s1), v))
            fill(s1, i, w, f"S_{s1}", 1, t)
            b_prev = w
        elif s1 == j:
            v = gf.neg(gf.add(syn.diag_sum(s2), b_prev))
            fill(j, j, v, f"D_{s2}", 1, t)
            w = gf.neg(gf.add(syn.row_sum(n - 2), v))
            fill(i, i, w, f"S_{n - 2}", 1, t)
            b_prev = w
        elif s1 == n - 1:
            v = gf.neg(gf.add(syn.diag_sum(s2), b_prev))
            fill(n - 1, j, v, f"D_{s2}", 1, t)
        # s1 == i: the iteration is a no-op; b_prev carries over unchanged

    b_prev = 0
    for t, (s1, s2) in enumerate(zip(sched.s1b, sched.s2b)):
        if s1 not in (i, j, n - 1):
            v = gf.neg(gf.add(syn.diag_sum(s2), b_prev))
            fill(s1, i, v, f"D_{s2}", 2, t)
            w = gf.neg(gf.add(syn.row_sum(s1), v))
            fill(s1, j, w, f"S_{s1}", 2, t)
            b_prev = w
        elif s1 == i:
            v = gf.neg(gf.add(syn.diag_sum(s2), b_prev))
            fill(i, i, v, f"D_{s2}", 2, t)
            w = gf.neg(gf.add(syn.row_sum(n - 2), v))
            fill(j, j, w, f"S_{n - 2}", 2, t)
            b_prev = w
        elif s1 == n - 1:
            v = gf.neg(gf.add(syn.diag_sum(s2), b_prev))
            fill(n - 1, i, v, f"D_{s2}", 2, t)
        # s1 == j: no-op

    # residual after both loops: (i, j) and the two edges to node n-2
    def peel(edges, target, constraint, t):
        acc = 0
        for e in edges:
            if e != target:
                acc = gf.add(acc, work.label(*e))
        fill(target[0], target[1], gf.neg(acc), constraint, "finish", t)

    m = (i + j) % n
    peel(fam.diag_sets[m], normalize_edge(i, j), f"D_{m}", 0)
    peel(fam.row_sets[i], (n - 2, i), f"S_{i}", 1)
    peel(fam.row_sets[j], (n - 2, j), f"S_{j}", 2)

    if survivor_syndrome(spec, work).any():
        raise CorruptedInputError("surviving labels are not consistent with any codeword")
    return DecodeReport("ok", work, prov)


# ---------------------------------------------------------------------------
# property suites (used by tests and by the CLI verify command)


def check_set_intersections(n: int) -> list[str]:
    """Exhaustive identities on how row/diagonal sets meet failure sets."""
    fam = parity_sets(n)
    rows = [set(e) for e in fam.row_sets]
    diags = [set(e) for e in fam.diag_sets]
    fail = [set(fam.failure_set(m)) for m in range(n)]
    bad = []
    rng = range(n - 2)
    for i in rng:
        for j in rng:
            if i == j:
                continue
            fij = fail[i] | fail[j]
            for h in rng:
                if h in (i, j):
                    continue
                want = {normalize_edge(h, i), normalize_edge(h, j)}
                if rows[h] & fij != want:
                    bad.append(f"row[{h}] vs failures ({i},{j})")
            if rows[n - 2] & fij != {(i, i), (j, j)}:
                bad.append(f"selfloop row vs failures ({i},{j})")
            m = (j - 2) % n
            if diags[m] & fij != {normalize_edge((j - i - 2) % n, i)}:
                bad.append(f"diag[{m}] vs failures ({i},{j})")
            m = (i + j) % n
            if diags[m] & fij != {normalize_edge(i, j)}:
                bad.append(f"diag[{m}] vs pair ({i},{j})")
    for i in rng:
        for s in range(n):
            if s == (i - 2) % n:
                continue
            want = {normalize_edge((s - i) % n, i)}
            if diags[s] & fail[i] != want:
                bad.append(f"diag[{s}] vs failure {i}")
    return bad


def check_schedule_invariants(n: int) -> list[str]:
    """Exhaustive schedule sanity for every pair of information nodes."""
    _check_prime(n)
    bad = []
    for i in range(n - 2):
        for j in range(i + 1, n - 2):
            s = zigzag_schedule(n, i, j)
            a, b = s.first_visits, s.second_visits
            if s.x == s.y or s.x + s.y != n - 2:
                bad.append(f"({i},{j}): loop lengths x={s.x} y={s.y}")
            if s.s1[-1] != n - 1 or s.s1b[-1] != n - 1:
                bad.append(f"({i},{j}): loops do not end at node {n - 1}")
            in_a = i in a and j in a
            in_b = i in b and j in b
            if in_a == in_b:
                bad.append(f"({i},{j}): failed pair not in exactly one loop")
            if n - 2 in a | b:
                bad.append(f"({i},{j}): schedule visits node {n - 2}")
            if len(a) != s.x + 1 or len(b) != s.y + 1 or a & b != {n - 1}:
                bad.append(f"({i},{j}): visit sets overlap incorrectly")
    return bad
