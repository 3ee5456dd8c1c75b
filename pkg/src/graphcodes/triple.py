"""Optimal q-ary triple-node-failure code (q >= n+1) with a three-stage decoder.

Two ingredients over GF(q) with distinct nonzero evaluation points
a_0..a_{n-1} (code l+1 for point l):

* a neighborhood code: the edge vector of every node m < n-2 must satisfy a
  3-row Vandermonde check (any 3 erasures in a neighborhood are solvable);
* a cross-edge code on the pair edges among the first n-2 nodes plus three
  appended edges touching the last two nodes ((n-2,n-2), (n-1,n-2),
  (n-1,n-1)).  The column of pair edge (i, j) is (1, a_s, a_s^2) with
  s = i+j mod n; the appended columns are the identity.  Distinct pair sums
  make any three pair columns a Vandermonde block, and appended columns are
  unit vectors, so every erasure pattern the decoder meets is solvable.

Decoding three failed nodes: (1) every surviving neighborhood has exactly
three erasures, solve them all; (2) the cross-edge vector now has exactly
three erasures (pair edges among failed nodes and/or appended edges), solve;
(3) each failed node's neighborhood has at most three erasures left (its self
loop and its edges to the last two nodes), solve.  The same three stages
cover failures touching the last two nodes.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import CorruptedInputError, FieldTooSmallError, InconsistentSystemError
from .field import GF, Matrix, field, is_prime_power, vandermonde
from .framework import (
    DecodeReport,
    GraphCodeSpec,
    ProvenanceEntry,
    oracle_decode,
    survivor_syndrome,
)
from .graphs import (
    LabeledGraph,
    edge_index,
    failed_nodes_of,
    failure_edges,
    neighborhood,
    normalize_edge,
    num_edges,
)


@dataclass(frozen=True)
class TripleParams:
    """Evaluation points, check blocks, and index tables for one (n, field)."""

    n: int
    gf: GF
    alphas: tuple  # n distinct nonzero codes, alphas[l] = l+1
    h_nbhd: np.ndarray  # 3 x n Vandermonde check of the neighborhood code
    cross_edges: tuple  # pair edges among first n-2 nodes (lex) + 3 appended
    cross_cols: np.ndarray  # edge_index of each cross edge
    h_cross: np.ndarray  # 3 x len(cross_edges)
    nbhd_cols: np.ndarray  # n x n; [m, l] = edge_index of the edge joining m, l

    def to_json_obj(self) -> dict:
        """n, field string, and evaluation points: enough to rebuild the code
        bit-exactly in another process or implementation."""
        return {"n": self.n, "field": self.gf.name, "alphas": list(self.alphas)}

    @classmethod
    def from_json_obj(cls, obj: dict) -> "TripleParams":
        from .field import parse_field

        params = triple_code_params(int(obj["n"]), parse_field(obj["field"]))
        if list(params.alphas) != [int(a) for a in obj["alphas"]]:
            raise ValueError("evaluation points do not match the canonical assignment")
        return params


def smallest_field_order(n: int) -> int:
    """Smallest prime power >= n + 1 (the minimal field for this family)."""
    q = n + 1
    while not is_prime_power(q):
        q += 1
    return q


@functools.lru_cache(maxsize=None)
def _params_cached(n: int, q: int, poly) -> TripleParams:
    gf = field(q, poly)
    alphas = np.arange(1, n + 1, dtype=np.int64)
    h_nbhd = vandermonde(gf, alphas, 3).a
    pairs = sorted((k, l) for k in range(n - 2) for l in range(k))
    cross_edges = tuple(pairs) + ((n - 2, n - 2), (n - 1, n - 2), (n - 1, n - 1))
    h_cross = np.zeros((3, len(cross_edges)), dtype=np.int64)
    for c, (k, l) in enumerate(pairs):
        a = int(alphas[(k + l) % n])
        h_cross[0, c] = 1
        h_cross[1, c] = a
        h_cross[2, c] = gf.mul(a, a)
    h_cross[:, -3:] = np.eye(3, dtype=np.int64)
    cross_cols = np.array([edge_index(i, j) for i, j in cross_edges], dtype=np.int64)
    nbhd_cols = np.zeros((n, n), dtype=np.int64)
    for m in range(n):
        for l in range(n):
            nbhd_cols[m, l] = edge_index(m, l)
    return TripleParams(n, gf, tuple(int(a) for a in alphas), h_nbhd,
                        cross_edges, cross_cols, h_cross, nbhd_cols)


def triple_code_params(n: int, gf: GF) -> TripleParams:
    if n < 5:
        raise ValueError(f"need n >= 5, got {n}")
    if gf.q < n + 1:
        raise FieldTooSmallError(f"need field order >= {n + 1}, got {gf.q}")
    return _params_cached(n, gf.q, gf.poly)


def triple_parity_code(params: TripleParams) -> GraphCodeSpec:
    """Stack 3 checks per constrained neighborhood plus the 3 cross checks."""
    n = params.n
    gf = params.gf
    h = np.zeros((3 * n - 3, num_edges(n)), dtype=np.int64)
    names = []
    for m in range(n - 2):
        for t in range(3):
            h[3 * m + t, params.nbhd_cols[m]] = params.h_nbhd[t]
            names.append(f"N_{m}[{t}]")
    for t in range(3):
        h[3 * (n - 2) + t, params.cross_cols] = params.h_cross[t]
        names.append(f"P[{t}]")
    return GraphCodeSpec(n, gf, Matrix(gf, h), family="triple", k_info=n - 3, row_names=names)


def triple_code(n: int, gf: GF | None = None) -> GraphCodeSpec:
    """Convenience builder; picks the smallest valid field when none is given."""
    gf = gf if gf is not None else field(smallest_field_order(n))
    return triple_parity_code(triple_code_params(n, gf))


def _solve3(gf: GF, a: np.ndarray, b) -> list[int]:
    """Solve a 3x3 system by elimination on Python ints (hot path)."""
    m = [[int(a[r, c]) for c in range(3)] + [int(b[r])] for r in range(3)]
    for col in range(3):
        piv = next((r for r in range(col, 3) if m[r][col]), None)
        if piv is None:
            raise InconsistentSystemError("singular 3x3 block")
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
        inv = gf.inv(m[col][col])
        m[col] = [gf.mul(inv, v) for v in m[col]]
        for r in range(3):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [gf.sub(v, gf.mul(f, w)) for v, w in zip(m[r], m[col])]
    return [m[r][3] for r in range(3)]


def encode_triple(spec: GraphCodeSpec, info) -> LabeledGraph:
    """Systematic encode: neighborhood checks of each information node fix its
    three edges to the redundancy side, the cross checks fix the appended
    edges, and the last constrained neighborhood fixes its own three."""
    n = spec.n
    gf = spec.gf
    params = triple_code_params(n, gf)
    k_edges = num_edges(n - 3)
    labels = np.zeros(num_edges(n), dtype=np.int64)
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

    tail = [n - 3, n - 2, n - 1]
    a_tail = params.h_nbhd[:, tail]

    def solve_neighborhood(m):
        known = gf.dot(params.h_nbhd, labels[params.nbhd_cols[m]])
        x = _solve3(gf, a_tail, gf.neg_arr(known))
        for pos, l in enumerate(tail):
            labels[params.nbhd_cols[m, l]] = x[pos]

    for m in range(n - 3):
        solve_neighborhood(m)
    known = gf.dot(params.h_cross, labels[params.cross_cols])
    labels[params.cross_cols[-3:]] = gf.neg_arr(known)
    solve_neighborhood(n - 3)
    return LabeledGraph(n, gf, labels)


def decode_triple(spec: GraphCodeSpec, g: LabeledGraph) -> DecodeReport:
    """Three-stage recovery of a three-node failure (other patterns: oracle)."""
    n = spec.n
    failed = failed_nodes_of(g)
    if failed is None or len(failed) != 3:
        return oracle_decode(spec, g)
    gf = spec.gf
    params = triple_code_params(n, gf)
    fi, fj, fk = sorted(failed)
    work = g.copy()
    prov: list[ProvenanceEntry] = []

    # stage 1: surviving constrained neighborhoods, all with the same three
    # erased coordinates (the failed nodes); one shared 3x3 solve block
    survivors = [m for m in range(n - 2) if m not in failed]
    a_cols = params.h_nbhd[:, [fi, fj, fk]]
    vecs = work.labels[params.nbhd_cols[survivors]]  # len(survivors) x n, erased are 0
    syn = gf.matmul(params.h_nbhd, vecs.T)  # 3 x len(survivors)
    for t, m in enumerate(survivors):
        x = _solve3(gf, a_cols, gf.neg_arr(syn[:, t]))
        for pos, l in enumerate((fi, fj, fk)):
            work.fill(*normalize_edge(m, l), x[pos])
            prov.append(ProvenanceEntry(normalize_edge(m, l), f"N_{m}", 1, t))

    # stage 2: the cross-edge vector has exactly the pair edges among failed
    # nodes and/or appended edges left erased
    positions = [c for c, e in enumerate(params.cross_edges) if work.is_erased(*e)]
    if positions:
        vec = work.labels[params.cross_cols]
        syn2 = gf.dot(params.h_cross, vec)
        sub = Matrix(gf, params.h_cross[:, positions])
        try:
            x = sub.solve(gf.neg_arr(syn2))
        except InconsistentSystemError as exc:
            raise CorruptedInputError(f"cross-edge checks are inconsistent: {exc}") from exc
        for t, c in enumerate(positions):
            e = params.cross_edges[c]
            work.fill(*e, int(x[t]))
            prov.append(ProvenanceEntry(normalize_edge(*e), "P", 2, t))

    # stage 3: each failed constrained neighborhood has <= 3 erasures left
    for t, m in enumerate(sorted(failed & set(range(n - 2)))):
        coords = [l for l in range(n) if work.is_erased(*normalize_edge(m, l))]
        if not coords:
            continue
        vec = work.labels[params.nbhd_cols[m]]
        syn3 = gf.dot(params.h_nbhd, vec)
        sub = Matrix(gf, params.h_nbhd[:, coords])
        try:
            x = sub.solve(gf.neg_arr(syn3))
        except InconsistentSystemError as exc:
            raise CorruptedInputError(f"neighborhood checks are inconsistent: {exc}") from exc
        for pos, l in enumerate(coords):
            work.fill(*normalize_edge(m, l), int(x[pos]))
            prov.append(ProvenanceEntry(normalize_edge(m, l), f"N_{m}", 3, t))

    if work.has_erasures:
        raise CorruptedInputError("erased edges remain after all stages")
    if survivor_syndrome(spec, work).any():
        raise CorruptedInputError("surviving labels are not consistent with any codeword")
    return DecodeReport("ok", work, prov)


# ---------------------------------------------------------------------------
# property suites


def check_cross_independence(n: int, gf: GF) -> list[str]:
    """Any three pair-edge columns of the cross check are independent, and the
    three pair sums behind them are pairwise distinct mod n."""
    params = triple_code_params(n, gf)
    npairs = len(params.cross_edges) - 3
    by_edge = {e: c for c, e in enumerate(params.cross_edges[:npairs])}
    bad = []
    for k in range(n - 2):
        for j in range(k):
            for i in range(j):
                sums = {(i + j) % n, (i + k) % n, (j + k) % n}
                if len(sums) != 3:
                    bad.append(f"pair sums collide for ({i},{j},{k})")
                cols = [by_edge[(j, i)], by_edge[(k, i)], by_edge[(k, j)]]
                m = Matrix(gf, params.h_cross[:, cols])
                if m.rank() != 3:
                    bad.append(f"dependent cross columns for ({i},{j},{k})")
    return bad


def check_neighborhood_overlap(n: int) -> list[str]:
    """A surviving node's neighborhood meets three failed neighborhoods in
    exactly three edges."""
    import itertools

    bad = []
    for trip in itertools.combinations(range(n), 3):
        fset = set(failure_edges(n, trip))
        for m in range(n):
            if m in trip:
                continue
            hit = len(fset & set(neighborhood(n, m)))
            if hit != 3:
                bad.append(f"node {m} overlaps failures {trip} in {hit} edges")
    return bad
