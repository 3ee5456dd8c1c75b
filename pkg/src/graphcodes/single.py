"""Single-node-failure code: every neighborhood sums to zero.

One parity check per node over its n incident edges (self loop included).
The n checks are independent, so the redundancy is n, which meets the
erased-edge lower bound for one failure.  The same check matrix is valid
over any field; the classic instance is binary.
"""

from __future__ import annotations

import numpy as np

from .errors import CorruptedInputError
from .field import GF, Matrix, field
from .framework import (
    DecodeReport,
    GraphCodeSpec,
    ProvenanceEntry,
    oracle_decode,
    survivor_syndrome,
)
from .graphs import LabeledGraph, edge_index, failed_nodes_of, neighborhood, num_edges


def single_parity_code(n: int, gf: GF | None = None) -> GraphCodeSpec:
    """Code whose checks are the n neighborhood parities."""
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    gf = gf if gf is not None else field(2)
    h = np.zeros((n, num_edges(n)), dtype=np.int64)
    for m in range(n):
        for i, j in neighborhood(n, m):
            h[m, edge_index(i, j)] = 1
    return GraphCodeSpec(n, gf, Matrix(gf, h), family="single", k_info=n - 1,
                         row_names=[f"N_{m}" for m in range(n)])


def decode_single(spec: GraphCodeSpec, g: LabeledGraph) -> DecodeReport:
    """Peel a single failed node: each cross edge from the partner's parity,
    then the self loop from the failed node's own parity.

    Any other erasure pattern is delegated to the oracle decoder.
    """
    failed = failed_nodes_of(g)
    if failed is None or len(failed) != 1:
        return oracle_decode(spec, g)
    (i,) = failed
    gf = spec.gf
    n = spec.n
    syn = survivor_syndrome(spec, g)
    work = g.copy()
    prov = []
    for t, l in enumerate(m for m in range(n) if m != i):
        work.fill(i, l, gf.neg(int(syn[l])))
        prov.append(ProvenanceEntry((max(i, l), min(i, l)), f"N_{l}", 1, t))
    acc = 0
    for l in range(n):
        if l != i:
            acc = gf.add(acc, work.label(i, l))
    work.fill(i, i, gf.neg(acc))
    prov.append(ProvenanceEntry((i, i), f"N_{i}", 1, n - 1))
    if survivor_syndrome(spec, work).any():
        raise CorruptedInputError("surviving labels are not consistent with any codeword")
    return DecodeReport("ok", work, prov)
