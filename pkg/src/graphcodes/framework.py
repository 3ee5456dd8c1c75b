"""Linear codes over graphs given by parity checks on edge coordinates.

A GraphCodeSpec is a parity-check matrix whose columns follow the
lexicographic edge order of the graph.  The oracle decoder solves the check
system restricted to the erased columns and is the ground truth every
structured family decoder is compared against.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .errors import (
    ErasedAccessError,
    InconsistentSystemError,
    NotSystematicError,
    UnderdeterminedSystemError,
)
from .field import GF, Matrix
from .graphs import LabeledGraph, edge_at, edge_index, num_edges

REASON_UNDERDETERMINED = "underdetermined"
REASON_INCONSISTENT = "inconsistent"
REASON_MISMATCH = "mismatch"


class GraphCodeSpec:
    """A linear code over graphs: n, field, and a parity-check matrix.

    ``family`` tags the built-in constructions (single/double/triple) so the
    CLI can dispatch structured decoders; ``k_info`` is the declared number of
    information nodes for systematic families.  ``row_names`` labels the check
    rows for decode provenance.
    """

    def __init__(self, n: int, gf: GF, h: Matrix, family: str = "custom",
                 k_info: int | None = None, row_names: list[str] | None = None):
        if h.gf != gf:
            raise ValueError("parity-check field does not match code field")
        if h.cols != num_edges(n):
            raise ValueError(f"parity check must have {num_edges(n)} columns, got {h.cols}")
        if row_names is not None and len(row_names) != h.rows:
            raise ValueError("row_names length must match row count")
        self.n = n
        self.gf = gf
        self.h = h
        self.family = family
        self.k_info = k_info
        self.row_names = row_names
        self._rank: int | None = None
        self._encoder: np.ndarray | None = None

    @property
    def rank(self) -> int:
        if self._rank is None:
            self._rank = self.h.rank()
        return self._rank

    @property
    def dimension(self) -> int:
        return num_edges(self.n) - self.rank

    @property
    def redundancy(self) -> int:
        return self.rank

    def info_edges(self) -> list[tuple[int, int]]:
        """Information edges: all edges among the first k_info nodes."""
        if self.k_info is None:
            raise NotSystematicError("code has no declared information nodes")
        k = self.k_info
        return [edge_at(t) for t in range(num_edges(k))]

    def __repr__(self):
        return f"GraphCodeSpec(family={self.family!r}, n={self.n}, {self.gf.name})"


@dataclass
class CodeMetrics:
    """Dimension/rate/redundancy report plus the failure-count lower bound."""

    n: int
    q: int
    rho: int
    dimension: int
    redundancy: int
    rate: Fraction
    bound: int
    gap: int

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "rho": self.rho,
            "dimension": self.dimension,
            "redundancy": self.redundancy,
            "rate": f"{self.rate.numerator}/{self.rate.denominator}",
            "bound": self.bound,
            "gap": self.gap,
        }


def erased_edge_bound(n: int, rho: int) -> int:
    """Edges erased by rho node failures: rho*n - C(rho, 2)."""
    return rho * n - rho * (rho - 1) // 2


def metrics(spec: GraphCodeSpec, rho: int) -> CodeMetrics:
    k = spec.dimension
    r = spec.redundancy
    return CodeMetrics(
        n=spec.n,
        q=spec.gf.q,
        rho=rho,
        dimension=k,
        redundancy=r,
        rate=Fraction(k, num_edges(spec.n)),
        bound=erased_edge_bound(spec.n, rho),
        gap=r - erased_edge_bound(spec.n, rho),
    )


@dataclass
class ProvenanceEntry:
    """Which constraint recovered which edge, and at which step."""

    edge: tuple[int, int]
    constraint: str
    loop: int | str
    t: int

    def as_dict(self) -> dict:
        return {
            "edge": f"{self.edge[0]}:{self.edge[1]}",
            "constraint": self.constraint,
            "loop": self.loop,
            "t": self.t,
        }


@dataclass
class DecodeReport:
    """Outcome of an erasure decode."""

    status: str  # "ok" | "failed"
    graph: LabeledGraph | None
    provenance: list[ProvenanceEntry] = dc_field(default_factory=list)
    reason: str | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def provenance_json(self) -> list[dict]:
        return [p.as_dict() for p in self.provenance]


def syndrome(spec: GraphCodeSpec, g: LabeledGraph) -> np.ndarray:
    """Parity-check values of a fully known graph."""
    if g.has_erasures:
        raise ErasedAccessError("syndrome of an erased graph")
    _check_graph(spec, g)
    return spec.gf.dot(spec.h.a, g.labels)


def survivor_syndrome(spec: GraphCodeSpec, g: LabeledGraph) -> np.ndarray:
    """Check sums over the surviving labels only (erased entries count as 0)."""
    _check_graph(spec, g)
    return spec.gf.dot(spec.h.a, g.labels)


def is_codeword(spec: GraphCodeSpec, g: LabeledGraph) -> bool:
    return not syndrome(spec, g).any()


def _check_graph(spec: GraphCodeSpec, g: LabeledGraph) -> None:
    if g.n != spec.n or g.gf != spec.gf:
        raise ValueError("graph does not match code parameters")


def oracle_decode(spec: GraphCodeSpec, g: LabeledGraph) -> DecodeReport:
    """Solve the parity checks restricted to the erased columns.

    Succeeds exactly when the erased columns of the check matrix are linearly
    independent; in that case the recovered graph is the unique codeword
    agreeing with the surviving labels.
    """
    _check_graph(spec, g)
    erased = np.nonzero(g.erased)[0]
    if erased.size == 0:
        return DecodeReport("ok", g.copy())
    gf = spec.gf
    rhs = gf.neg_arr(survivor_syndrome(spec, g))
    sub = Matrix(gf, spec.h.a[:, erased])
    try:
        x = sub.solve(rhs)
    except UnderdeterminedSystemError:
        return DecodeReport("failed", None, reason=REASON_UNDERDETERMINED)
    except InconsistentSystemError:
        return DecodeReport("failed", None, reason=REASON_INCONSISTENT)
    out = g.copy()
    prov = []
    for t, k in enumerate(erased):
        i, j = edge_at(int(k))
        out.fill(i, j, int(x[t]))
        prov.append(ProvenanceEntry((i, j), "oracle", "oracle", t))
    return DecodeReport("ok", out, prov)


def erased_columns_independent(spec: GraphCodeSpec, failed) -> bool:
    """Rank predicate equivalent to oracle decodability of a failure set."""
    g = LabeledGraph(spec.n, spec.gf).erase_nodes(failed)
    erased = np.nonzero(g.erased)[0]
    return Matrix(spec.gf, spec.h.a[:, erased]).rank() == erased.size


def _systematic_encoder(spec: GraphCodeSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Cached map from information labels to redundancy labels.

    Returns (info_cols, red_cols, E) where E satisfies
    labels[red_cols] = E @ labels[info_cols] for every codeword.
    """
    if spec._encoder is not None:
        return spec._encoder
    if spec.k_info is None:
        raise NotSystematicError("code has no declared information nodes")
    t = num_edges(spec.n)
    info_cols = np.arange(num_edges(spec.k_info))
    red_cols = np.arange(num_edges(spec.k_info), t)
    gf = spec.gf
    a = Matrix(gf, spec.h.a[:, red_cols])
    rhs = gf.neg_arr(spec.h.a[:, info_cols])
    try:
        e = a.solve_many(rhs)
    except (UnderdeterminedSystemError, InconsistentSystemError) as exc:
        raise NotSystematicError(f"redundancy edges are not determined: {exc}") from exc
    spec._encoder = (info_cols, red_cols, e)
    return spec._encoder


def encode_systematic(spec: GraphCodeSpec, info) -> LabeledGraph:
    """Codeword carrying the given labels on the information edges.

    ``info`` is either a mapping {(i, j): value} covering exactly the edges
    among the first k_info nodes, or a sequence of values in lexicographic
    order of those edges.
    """
    info_cols, red_cols, enc = _systematic_encoder(spec)
    gf = spec.gf
    vec = np.zeros(len(info_cols), dtype=np.int64)
    if isinstance(info, dict):
        seen = set()
        for key, value in info.items():
            i, j = key
            k = edge_index(i, j)
            if k >= len(info_cols):
                raise ValueError(f"edge ({i},{j}) is not an information edge")
            vec[k] = gf.validate(value)
            seen.add(k)
        if len(seen) != len(info_cols):
            raise ValueError(f"expected {len(info_cols)} information labels, got {len(seen)}")
    else:
        arr = gf.validate_arr(np.asarray(info, dtype=np.int64))
        if arr.shape != (len(info_cols),):
            raise ValueError(f"expected {len(info_cols)} information labels, got {arr.shape}")
        vec = arr
    labels = np.zeros(num_edges(spec.n), dtype=np.int64)
    labels[info_cols] = vec
    labels[red_cols] = gf.dot(enc, vec)
    return LabeledGraph(spec.n, gf, labels)


def random_codeword(spec: GraphCodeSpec, rng: random.Random) -> LabeledGraph:
    """Uniform random codeword (via the systematic map when available)."""
    if spec.k_info is not None:
        info = [rng.randrange(spec.gf.q) for _ in range(num_edges(spec.k_info))]
        return encode_systematic(spec, info)
    basis = spec.h.nullspace()
    coeffs = np.array([rng.randrange(spec.gf.q) for _ in range(basis.shape[0])], dtype=np.int64)
    labels = spec.gf.dot(basis.T.copy(), coeffs)
    return LabeledGraph(spec.n, spec.gf, labels)


def _pattern_rng(seed: int, pattern: tuple[int, ...], trial: int) -> random.Random:
    # string seeding is stable across runs and processes
    return random.Random(f"{seed}|{','.join(map(str, pattern))}|{trial}")


def _verify_pattern(spec: GraphCodeSpec, pattern: tuple[int, ...], trials: int,
                    seed: int, decoder) -> tuple[tuple[int, ...], str | None]:
    decode = decoder if decoder is not None else oracle_decode
    for trial in range(trials):
        rng = _pattern_rng(seed, pattern, trial)
        original = random_codeword(spec, rng)
        report = decode(spec, original.erase_nodes(pattern))
        if not report.ok:
            return pattern, report.reason or "failed"
        if report.graph != original:
            return pattern, REASON_MISMATCH
    return pattern, None


def verify_exhaustive(spec: GraphCodeSpec, rho: int, trials: int = 10, *,
                      seed: int = 0, decoder=None, jobs: int = 1) -> dict:
    """Erase-decode-compare over every rho-subset of nodes.

    Each (pattern, trial) pair gets its own deterministic RNG, so reports are
    reproducible regardless of scheduling.  Failures are data, not errors.
    """
    start = time.perf_counter()
    patterns = list(itertools.combinations(range(spec.n), rho))
    failures = []
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(
                _verify_pattern_star,
                [(spec, p, trials, seed, decoder) for p in patterns],
                chunksize=max(1, len(patterns) // (4 * jobs) or 1),
            ))
    else:
        results = [_verify_pattern(spec, p, trials, seed, decoder) for p in patterns]
    for pattern, reason in results:
        if reason is not None:
            failures.append({"failed_nodes": list(pattern), "reason": reason})
    return {
        "family": spec.family,
        "n": spec.n,
        "q": spec.gf.q,
        "rho": rho,
        "trials": trials,
        "patterns_total": len(patterns),
        "patterns_ok": len(patterns) - len(failures),
        "failures": failures,
        "elapsed_ms": (time.perf_counter() - start) * 1000.0,
    }


def _verify_pattern_star(args):
    return _verify_pattern(*args)
