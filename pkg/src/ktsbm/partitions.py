"""Enumeration engines for labelings of small graphs.

Two flavors are provided:

* canonical set partitions (restricted growth strings): one representative
  per orbit of the label-permutation group, with exact multiplicity weights.
  Valid whenever the quantity being accumulated is invariant under permuting
  label values (KT mixtures, profile likelihood).
* full mixed-radix enumeration of {0..k-1}^n, chunked, for quantities that
  depend on the actual label values (marginal likelihood at fixed params,
  exact EM responsibilities).

Per-labeling statistics use a condensed cell layout: cells are the pairs
(a, b) with a <= b in row-major order; ``hn`` is the number of unordered
node pairs in the cell and ``ho`` the number of edges, so the diagonal cell
(a, a) holds n_a(n_a-1)/2 pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InfeasibleSizeError

__all__ = [
    "PartitionTable",
    "partition_count",
    "partition_table",
    "graph_cell_edges",
    "cell_layout",
    "labeling_stats",
    "iter_labeling_stats",
]

_CHUNK_ROWS = 1 << 17


def cell_layout(m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Condensed upper-triangle cell indexing for an m x m symmetric matrix.

    Returns (cell_a, cell_b, cell_of) with cell_of[a, b] the flat cell index.
    """
    cell_a, cell_b = np.triu_indices(m)
    cell_of = np.zeros((m, m), dtype=np.int64)
    cell_of[cell_a, cell_b] = np.arange(cell_a.size)
    cell_of[cell_b, cell_a] = cell_of[cell_a, cell_b]
    return cell_a, cell_b, cell_of


def _cell_pair_counts(counts: np.ndarray, cell_a: np.ndarray, cell_b: np.ndarray) -> np.ndarray:
    ca = counts[:, cell_a].astype(np.int64)
    cb = counts[:, cell_b].astype(np.int64)
    hn = ca * cb
    diag = cell_a == cell_b
    hn[:, diag] = ca[:, diag] * (ca[:, diag] - 1) // 2
    return hn


@lru_cache(maxsize=None)
def partition_count(n: int, m_max: int) -> int:
    """Number of set partitions of n items into at most m_max blocks (exact)."""
    m_max = min(m_max, n)
    # dp[c] = number of restricted growth prefixes whose max value is c
    dp = [0] * m_max
    dp[0] = 1
    for _ in range(n - 1):
        new = [0] * m_max
        for c in range(m_max):
            new[c] = dp[c] * (c + 1)
            if c > 0:
                new[c] += dp[c - 1]
        dp = new
    return sum(dp)


def _rgs_codes(n: int, m_max: int) -> tuple[np.ndarray, np.ndarray]:
    """All restricted growth strings of length n over at most m_max values.

    Returns (codes, maxval): codes is (P, n) int8 with first occurrences in
    increasing order 0, 1, 2, ...; maxval[p] is the largest value used.
    """
    codes = np.zeros((1, 1), dtype=np.int8)
    maxval = np.zeros(1, dtype=np.int8)
    for _ in range(n - 1):
        nchild = np.minimum(maxval.astype(np.int64) + 2, m_max)
        rows = np.repeat(np.arange(codes.shape[0]), nchild)
        starts = np.repeat(np.cumsum(nchild) - nchild, nchild)
        newvals = (np.arange(rows.size) - starts).astype(np.int8)
        codes = np.concatenate([codes[rows], newvals[:, None]], axis=1)
        maxval = np.maximum(maxval[rows], newvals)
    return codes, maxval


@dataclass(frozen=True)
class PartitionTable:
    """Canonical labelings of n nodes with at most m_max blocks, plus the
    graph-independent parts of their statistics."""

    n: int
    m_max: int
    codes: np.ndarray      # (P, n) int8, restricted growth strings
    nblocks: np.ndarray    # (P,) int64
    counts: np.ndarray     # (P, m_max) int64 block sizes
    hn: np.ndarray         # (P, C) int64 pairs per condensed cell
    cell_a: np.ndarray
    cell_b: np.ndarray
    cell_of: np.ndarray

    @property
    def size(self) -> int:
        return self.codes.shape[0]


@lru_cache(maxsize=8)
def partition_table(n: int, m_max: int) -> PartitionTable:
    m_max = min(m_max, n)
    codes, maxval = _rgs_codes(n, m_max)
    P = codes.shape[0]
    flat = np.arange(P, dtype=np.int64)[:, None] * m_max + codes
    counts = np.bincount(flat.ravel(), minlength=P * m_max).reshape(P, m_max)
    cell_a, cell_b, cell_of = cell_layout(m_max)
    hn = _cell_pair_counts(counts, cell_a, cell_b)
    return PartitionTable(
        n=n,
        m_max=m_max,
        codes=codes,
        nblocks=maxval.astype(np.int64) + 1,
        counts=counts,
        hn=hn,
        cell_a=cell_a,
        cell_b=cell_b,
        cell_of=cell_of,
    )


def require_partitions(n: int, m_max: int, cap: int) -> PartitionTable:
    count = partition_count(n, min(m_max, n))
    if count > cap:
        raise InfeasibleSizeError(
            f"exact enumeration needs {count} canonical labelings at n={n}, "
            f"m_max={min(m_max, n)}, above the cap {cap}"
        )
    return partition_table(n, min(m_max, n))


def graph_cell_edges(table: PartitionTable, edges: np.ndarray) -> np.ndarray:
    """Edges per condensed cell for every partition: (P, C) int64."""
    P = table.size
    C = table.cell_a.size
    ho = np.zeros((P, C), dtype=np.int64)
    if edges.size == 0:
        return ho
    ei = edges[:, 0]
    ej = edges[:, 1]
    for lo in range(0, P, _CHUNK_ROWS):
        hi = min(lo + _CHUNK_ROWS, P)
        A = table.codes[lo:hi, ei].astype(np.int64)
        B = table.codes[lo:hi, ej].astype(np.int64)
        cells = table.cell_of[A, B]
        base = np.arange(hi - lo, dtype=np.int64)[:, None] * C
        ho[lo:hi] = np.bincount(
            (base + cells).ravel(), minlength=(hi - lo) * C
        ).reshape(hi - lo, C)
    return ho


def labeling_count(n: int, k: int) -> int:
    return k ** n


def _decode_labelings(lo: int, hi: int, n: int, k: int) -> np.ndarray:
    idx = np.arange(lo, hi, dtype=np.int64)
    powers = k ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] // powers) % k).astype(np.int8)


def iter_labeling_stats(n: int, k: int, edges: np.ndarray, chunk: int = _CHUNK_ROWS):
    """Yield (counts, hn, ho) over all k**n labelings in fixed chunks.

    counts is (L, k); hn/ho are (L, C) in the condensed cell layout of k.
    """
    total = labeling_count(n, k)
    cell_a, cell_b, cell_of = cell_layout(k)
    C = cell_a.size
    for lo in range(0, total, chunk):
        hi = min(lo + chunk, total)
        codes = _decode_labelings(lo, hi, n, k)
        L = hi - lo
        flat = np.arange(L, dtype=np.int64)[:, None] * k + codes
        counts = np.bincount(flat.ravel(), minlength=L * k).reshape(L, k)
        hn = _cell_pair_counts(counts, cell_a, cell_b)
        if edges.size:
            A = codes[:, edges[:, 0]].astype(np.int64)
            B = codes[:, edges[:, 1]].astype(np.int64)
            cells = cell_of[A, B]
            base = np.arange(L, dtype=np.int64)[:, None] * C
            ho = np.bincount((base + cells).ravel(), minlength=L * C).reshape(L, C)
        else:
            ho = np.zeros((L, C), dtype=np.int64)
        yield counts, hn, ho


def labeling_stats(n: int, k: int, edges: np.ndarray, cap: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Materialized statistics of every labeling in {1..k}^n (for exact EM)."""
    total = labeling_count(n, k)
    if total > cap:
        raise InfeasibleSizeError(
            f"exact enumeration needs k**n = {total} labelings, above the cap {cap}"
        )
    parts = list(iter_labeling_stats(n, k, edges))
    counts = np.concatenate([p[0] for p in parts])
    hn = np.concatenate([p[1] for p in parts])
    ho = np.concatenate([p[2] for p in parts])
    return counts, hn, ho
