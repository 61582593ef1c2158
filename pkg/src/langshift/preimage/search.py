"""Exact preimage enumeration for finite patterns.

A preimage of an ``n x m`` target is an ``(n+2) x (m+2)`` block whose image
on its interior equals the target; the outer ring is constrained only
through the interior neighbourhoods.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from ..errors import BudgetExhausted, TooLarge
from ..lattice import step_interior
from ..patterns import Pattern, occurrences
from ..rule import Params
from . import _kernel

DEFAULT_BUDGET = 10**8
ORACLE_MAX_CELLS = 13
_LEVELS = {"none": 0, "complete": 1, "forward": 2}


@dataclass(frozen=True)
class PreimageQuery:
    target: Pattern
    params: Params

    def __post_init__(self):
        object.__setattr__(self, "params", Params.coerce(self.params))

    @property
    def block_shape(self) -> tuple[int, int]:
        return self.target.rows + 2, self.target.cols + 2


@dataclass
class PreimageResult:
    """Preimages of a query, stored as packed codes in row-major lexicographic order.

    ``complete`` is False when the search stopped on its budget, in which case
    ``codes`` is the subset found so far.
    """

    query: PreimageQuery
    codes: np.ndarray = field(repr=False)
    complete: bool
    explored_nodes: int

    def __len__(self) -> int:
        return int(self.codes.shape[0])

    @property
    def count(self) -> int:
        return len(self)

    def arrays(self, start: int = 0, stop: int | None = None) -> np.ndarray:
        """Decode a slice of the result into a ``(k, R, C)`` uint8 stack."""
        R, C = self.query.block_shape
        return decode_codes(self.codes[start:stop], R, C)

    def __getitem__(self, i: int) -> Pattern:
        i = range(len(self))[i]
        return Pattern.from_array(self.arrays(i, i + 1)[0])

    def __iter__(self) -> Iterator[Pattern]:
        for start in range(0, len(self), 65536):
            for a in self.arrays(start, start + 65536):
                yield Pattern.from_array(a)

    @property
    def patterns(self) -> list[Pattern]:
        return list(self)

    def __contains__(self, p: Pattern) -> bool:
        if p.shape != self.query.block_shape:
            return False
        code = encode_block(p.array)
        hit = (self.codes == code).all(axis=1)
        return bool(hit.any())

    def summary(self) -> str:
        return f"count={len(self)} complete={str(self.complete).lower()} nodes={self.explored_nodes}"


def _words(ncells: int) -> int:
    return (ncells + 31) // 32


def encode_block(a: np.ndarray) -> np.ndarray:
    flat = np.asarray(a, dtype=np.uint64).ravel()
    n = flat.size
    out = np.zeros(_words(n), dtype=np.uint64)
    for p in range(n):
        out[p // 32] |= flat[p] << np.uint64(2 * (31 - p % 32))
    return out


def decode_codes(codes: np.ndarray, R: int, C: int) -> np.ndarray:
    n = R * C
    k = codes.shape[0]
    out = np.empty((k, n), dtype=np.uint8)
    for p in range(n):
        out[:, p] = (codes[:, p // 32] >> np.uint64(2 * (31 - p % 32))) & np.uint64(3)
    return out.reshape(k, R, C)


def _sort_codes(codes: np.ndarray) -> np.ndarray:
    if codes.shape[0] < 2:
        return codes
    if codes.shape[1] == 1:
        return np.sort(codes, axis=0)
    return codes[np.lexsort(codes.T[::-1])]


@dataclass(frozen=True)
class _Problem:
    R: int
    C: int
    order: np.ndarray
    dom: np.ndarray
    cell_cons: np.ndarray
    cell_ncons: np.ndarray
    center: np.ndarray
    tm: np.ndarray
    tn: np.ndarray


def cell_order(R: int, C: int, kind: str = "center-out") -> np.ndarray:
    """Assignment order for an ``R x C`` block.

    ``row-major`` is the plain order.  ``center-out`` visits cells by
    increasing sup-distance from the block centre (row-major among ties), so
    tightly constrained interior cells are fixed before the loosely
    constrained outer ring.
    """
    idx = np.arange(R * C)
    if kind == "row-major":
        return idx
    if kind != "center-out":
        raise ValueError(f"unknown order {kind!r}")
    r, c = np.divmod(idx, C)
    d = np.maximum(np.abs(2 * r - (R - 1)), np.abs(2 * c - (C - 1)))
    return idx[np.lexsort((idx, d))]


def _build(q: PreimageQuery, level: int, order: str) -> _Problem:
    t = q.target.array
    n, m = t.shape
    R, C = n + 2, m + 2
    N = R * C
    cell_cons = np.full((N, 9), -1, dtype=np.int64)
    cell_ncons = np.zeros(N, dtype=np.int64)
    center = np.empty(n * m, dtype=np.int64)
    for i in range(n):
        for j in range(m):
            k = i * m + j
            center[k] = (i + 1) * C + (j + 1)
            for di in range(3):
                for dj in range(3):
                    x = (i + di) * C + (j + dj)
                    cell_cons[x, cell_ncons[x]] = k
                    cell_ncons[x] += 1
    tm = (t.ravel() >> 1).astype(np.int64)
    tn = (t.ravel() & 1).astype(np.int64)
    dom = np.full(N, 0b1111, dtype=np.int64)
    if level == 2:
        # bits never clear: the centre state must be a bit-subset of its target
        for k in range(n * m):
            tv = int(t.ravel()[k])
            dom[center[k]] = sum(1 << v for v in range(4) if v & ~tv == 0)
    return _Problem(R, C, cell_order(R, C, order), dom, cell_cons, cell_ncons, center, tm, tn)


@dataclass(frozen=True)
class _Placements:
    cells: np.ndarray
    vals: np.ndarray
    lens: np.ndarray
    ptr: np.ndarray
    idx: np.ndarray

    @classmethod
    def empty(cls, N: int) -> "_Placements":
        z = np.zeros((0, 1), dtype=np.int64)
        return cls(z, z, np.zeros(0, dtype=np.int64), np.zeros(N + 1, dtype=np.int64),
                   np.zeros(0, dtype=np.int64))


def _placements(prob: _Problem, motifs: Sequence[Pattern]) -> _Placements:
    R, C, N = prob.R, prob.C, prob.R * prob.C
    if not motifs:
        return _Placements.empty(N)
    rank = np.empty(N, dtype=np.int64)
    rank[prob.order] = np.arange(N)
    cells, vals = [], []
    for mo in motifs:
        mr, mc = mo.shape
        for i in range(R - mr + 1):
            for j in range(C - mc + 1):
                cells.append([(i + a) * C + (j + b) for a in range(mr) for b in range(mc)])
                vals.append(list(mo.cells))
    P = len(cells)
    L = max((len(c) for c in cells), default=1)
    pc = np.zeros((P, L), dtype=np.int64)
    pv = np.zeros((P, L), dtype=np.int64)
    pl = np.zeros(P, dtype=np.int64)
    last = np.zeros(P, dtype=np.int64)
    for q, (cs, vs) in enumerate(zip(cells, vals)):
        pc[q, :len(cs)] = cs
        pv[q, :len(vs)] = vs
        pl[q] = len(cs)
        last[q] = max(cs, key=lambda x: rank[x])
    by_last = np.argsort(last, kind="stable")
    ptr = np.searchsorted(last[by_last], np.arange(N + 1)).astype(np.int64)
    return _Placements(pc, pv, pl, ptr, by_last.astype(np.int64))


@dataclass
class SearchOutcome:
    status: int
    nodes: int
    leaves: int
    motif_free: int
    codes: np.ndarray
    witness: Pattern | None


def _run(q: PreimageQuery, budget: int, *, store: bool = True, max_leaves: int = -1,
         motifs: Sequence[Pattern] = (), avoid: bool = False, classify: bool = False,
         stop_free: bool = False, prune: str = "forward", order: str = "center-out",
         threads: int = 1) -> SearchOutcome:
    if budget <= 0:
        raise ValueError("budget must be positive")
    level = _LEVELS[prune]
    prob = _build(q, level, order)
    pl = _placements(prob, motifs) if (avoid or classify) else _placements(prob, ())
    N = prob.R * prob.C
    words = _words(N)
    p = q.params

    def sub(root_value: int, sub_budget: int, sub_leaves: int):
        return _kernel.search(
            prob.order, prob.dom, prob.cell_cons, prob.cell_ncons, prob.center,
            prob.tm, prob.tn, p.pz, p.pe, level,
            pl.cells, pl.vals, pl.lens, pl.ptr, pl.idx, avoid, classify, stop_free,
            root_value, sub_budget, sub_leaves, store, words,
        )

    # The space is split on the value of the first assigned cell.  Subtrees are
    # merged in value order against one node budget, which reproduces the
    # sequential run exactly whatever the thread count.
    roots = [v for v in range(4) if (prob.dom[prob.order[0]] >> v) & 1]
    parts = None
    if threads > 1 and store:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda v: sub(v, budget, max_leaves), roots))

    status = _kernel.STATUS_COMPLETE
    nodes = leaves = motif_free = 0
    chunks = []
    witness = None
    for i, v in enumerate(roots):
        remaining = budget - nodes
        want = max_leaves - leaves if max_leaves > 0 else -1
        if parts is None:
            st, n_nodes, n_leaves, n_free, codes, leaf_nodes, wit = sub(v, remaining, want)
        else:
            st, n_nodes, n_leaves, n_free, codes, leaf_nodes, wit = parts[i]
            keep = leaf_nodes <= remaining
            if want > 0:
                keep &= np.arange(len(keep)) < want
            if n_nodes > remaining:
                st, n_nodes = _kernel.STATUS_BUDGET, remaining
            if want > 0 and keep.sum() == want:
                st, n_nodes = _kernel.STATUS_STOPPED, int(leaf_nodes[want - 1])
            codes = codes[keep]
            n_leaves = int(keep.sum())
        nodes += n_nodes
        leaves += n_leaves
        motif_free += n_free
        if classify and n_free and witness is None:
            witness = Pattern.from_array(wit.reshape(prob.R, prob.C).astype(np.uint8))
        if store:
            chunks.append(codes)
        if st != _kernel.STATUS_COMPLETE:
            status = st
            break
    if store:
        codes = np.concatenate(chunks) if chunks else np.zeros((0, words), dtype=np.uint64)
        codes = _sort_codes(codes)
    else:
        codes = np.zeros((0, words), dtype=np.uint64)
    return SearchOutcome(status, nodes, leaves, motif_free, codes, witness)


def preimages(q: PreimageQuery, budget: int = DEFAULT_BUDGET, *, prune: str = "forward",
              order: str = "center-out", threads: int = 1) -> PreimageResult:
    """All blocks whose interior image equals the target.

    ``budget`` caps the number of search nodes (accepted partial
    assignments).  When it runs out the result holds the blocks found so far
    with ``complete=False``; no exception is raised.
    """
    out = _run(q, budget, prune=prune, order=order, threads=threads)
    return PreimageResult(q, out.codes, out.status == _kernel.STATUS_COMPLETE, out.nodes)


def has_preimage(q: PreimageQuery, budget: int = DEFAULT_BUDGET) -> str:
    """``"yes"``, ``"no"`` (space exhausted), or ``"unknown"`` (budget hit)."""
    out = _run(q, budget, store=False, max_leaves=1)
    if out.leaves:
        return "yes"
    return "no" if out.status == _kernel.STATUS_COMPLETE else "unknown"


def find_preimage(q: PreimageQuery, budget: int = DEFAULT_BUDGET) -> Pattern | None:
    out = _run(q, budget, max_leaves=1)
    if len(out.codes):
        R, C = q.block_shape
        return Pattern.from_array(decode_codes(out.codes, R, C)[0])
    if out.status != _kernel.STATUS_COMPLETE:
        raise BudgetExhausted(f"no preimage found within {budget} nodes")
    return None


@dataclass
class MotifScan:
    """Counts over the preimage set without materialising it."""

    count: int
    motif_free: int
    complete: bool
    explored_nodes: int
    witness: Pattern | None


def scan_preimages(q: PreimageQuery, motifs: Sequence[Pattern] = (),
                   budget: int = DEFAULT_BUDGET, stop_at_motif_free: bool = False) -> MotifScan:
    """Count preimages and how many of them contain none of ``motifs``.

    Enumeration order is the same as :func:`preimages`, so a budgeted scan
    sees exactly the blocks a budgeted enumeration would return.
    """
    out = _run(q, budget, store=False, motifs=list(motifs), classify=bool(motifs),
               stop_free=stop_at_motif_free)
    return MotifScan(out.leaves, out.motif_free, out.status == _kernel.STATUS_COMPLETE,
                     out.nodes, out.witness)


def motif_free_preimage(q: PreimageQuery, motifs: Sequence[Pattern],
                        budget: int = DEFAULT_BUDGET) -> tuple[str, Pattern | None]:
    """Search for a preimage containing none of ``motifs``.

    Returns ``("none", None)`` when the space is exhausted (so every preimage
    contains a motif), ``("found", block)``, or ``("unknown", None)``.
    """
    out = _run(q, budget, max_leaves=1, motifs=list(motifs), avoid=True)
    if len(out.codes):
        R, C = q.block_shape
        return "found", Pattern.from_array(decode_codes(out.codes, R, C)[0])
    return ("none" if out.status == _kernel.STATUS_COMPLETE else "unknown"), None


def motif_containment(result: PreimageResult, motifs: Sequence[Pattern]) -> bool:
    """True iff every pattern in a complete result contains one of ``motifs``."""
    if not result.complete:
        raise ValueError("motif containment needs a complete result")
    for start in range(0, len(result), 1 << 20):
        stack = result.arrays(start, start + (1 << 20))
        hit = np.zeros(len(stack), dtype=bool)
        for mo in motifs:
            hit |= occurrences(stack, mo)
        if not hit.all():
            return False
    return True


def brute_force_preimages(q: PreimageQuery) -> PreimageResult:
    """Plain enumeration of all ``4**cells`` blocks, for cross-checking."""
    R, C = q.block_shape
    N = R * C
    if N > ORACLE_MAX_CELLS:
        raise TooLarge(f"{R}x{C} block has {N} cells; oracle ceiling is {ORACLE_MAX_CELLS}")
    target = q.target.array
    low = min(N, 8)
    high = N - low
    low_digits = ((np.arange(4**low)[:, None] >> (2 * np.arange(low - 1, -1, -1))) & 3).astype(np.uint8)
    blocks = np.empty((4**low, N), dtype=np.uint8)
    blocks[:, high:] = low_digits
    found = []
    for hi in range(4**high):
        blocks[:, :high] = (hi >> (2 * np.arange(high - 1, -1, -1))) & 3
        ok = (step_interior(blocks.reshape(-1, R, C), q.params) == target).all(axis=(1, 2))
        found.append(hi * 4**low + np.flatnonzero(ok))
    idx = np.concatenate(found)
    # base-4 index with cell 0 most significant -> packed single-word code
    codes = (idx.astype(np.uint64) << np.uint64(2 * (32 - N)))[:, None]
    return PreimageResult(q, codes, True, 4**N)
