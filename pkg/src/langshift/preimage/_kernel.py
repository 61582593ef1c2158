"""Compiled depth-first search over block assignments.

Cells of the ``R x C`` block are assigned in a fixed order.  Each target
cell is a constraint over its 3x3 window; the search keeps, per constraint,
the m/n-bit counts of assigned cells and the number of unassigned cells that
could still contribute each bit, and rejects a value as soon as some
constraint can no longer produce its target state.

Pruning levels: 0 checks every constraint only at full assignments, 1 checks
a constraint once its window is fully assigned, 2 adds static domains and
the count bounds above.
"""

import numpy as np
from numba import njit

STATUS_COMPLETE = 0
STATUS_BUDGET = 1
STATUS_STOPPED = 2


@njit(cache=True, nogil=True)
def _feasible(k, level, tm, tn, am, an, um, un, asg, center, cellval, canm, cann, pz, pe):
    if level == 1 and asg[k] < 9:
        return True
    c = center[k]
    cv = cellval[c]
    if tm[k] == 0:
        if am[k] >= pz:
            return False
        if cv >= 0 and (cv >> 1) == 1:
            return False
    else:
        if cv >= 0:
            if (cv >> 1) == 0 and am[k] + um[k] < pz:
                return False
        elif not canm[c] and am[k] + um[k] < pz:
            return False
    if tn[k] == 0:
        if an[k] >= pe:
            return False
        if cv >= 0 and (cv & 1) == 1:
            return False
    else:
        if cv >= 0:
            if (cv & 1) == 0 and an[k] + un[k] < pe:
                return False
        elif not cann[c] and an[k] + un[k] < pe:
            return False
    return True


@njit(cache=True, nogil=True)
def _update(x, v, sign, cell_cons, cell_ncons, am, an, um, un, asg, canm, cann):
    mb = v >> 1
    nb = v & 1
    for t in range(cell_ncons[x]):
        k = cell_cons[x, t]
        am[k] += sign * mb
        an[k] += sign * nb
        asg[k] += sign
        if canm[x]:
            um[k] -= sign
        if cann[x]:
            un[k] -= sign


@njit(cache=True, nogil=True)
def _placement_hit(q, pl_cells, pl_vals, pl_len, cellval):
    for t in range(pl_len[q]):
        if cellval[pl_cells[q, t]] != pl_vals[q, t]:
            return False
    return True


@njit(cache=True, nogil=True)
def search(
    order, dom, cell_cons, cell_ncons, center, tm, tn, pz, pe, level,
    pl_cells, pl_vals, pl_len, pl_ptr, pl_idx, avoid, classify, stop_free,
    root_value, budget, max_leaves, store, words,
):
    """Run the search.

    Returns ``(status, nodes, leaves, motif_free, codes, leaf_nodes, witness)``.
    ``codes`` holds the packed leaves (cell ``p`` in word ``p // 32`` at bit
    offset ``2 * (31 - p % 32)``) when ``store``; ``leaf_nodes[i]`` is the node
    counter at which leaf ``i`` was found.  ``witness`` is the first leaf
    without any motif placement when ``classify``; ``stop_free`` ends the
    search there.
    """
    N = order.shape[0]
    K = center.shape[0]
    cellval = np.full(N, -1, dtype=np.int64)
    canm = np.zeros(N, dtype=np.bool_)
    cann = np.zeros(N, dtype=np.bool_)
    for x in range(N):
        canm[x] = (dom[x] & 0b1100) != 0
        cann[x] = (dom[x] & 0b1010) != 0
    am = np.zeros(K, dtype=np.int64)
    an = np.zeros(K, dtype=np.int64)
    um = np.zeros(K, dtype=np.int64)
    un = np.zeros(K, dtype=np.int64)
    asg = np.zeros(K, dtype=np.int64)
    for x in range(N):
        for t in range(cell_ncons[x]):
            k = cell_cons[x, t]
            if canm[x]:
                um[k] += 1
            if cann[x]:
                un[k] += 1

    cap = 1024 if store else 1
    codes = np.zeros((cap, words), dtype=np.uint64)
    leaf_nodes = np.zeros(cap, dtype=np.int64)
    witness = np.full(N, -1, dtype=np.int64)
    nodes = 0
    leaves = 0
    motif_free = 0
    status = STATUS_COMPLETE
    val = np.full(N, -1, dtype=np.int64)
    depth = 0
    while True:
        x = order[depth]
        v = val[depth]
        if v >= 0:
            _update(x, v, -1, cell_cons, cell_ncons, am, an, um, un, asg, canm, cann)
            cellval[x] = -1
        v += 1
        placed = False
        while v < 4:
            if ((dom[x] >> v) & 1) and (depth > 0 or root_value < 0 or v == root_value):
                _update(x, v, 1, cell_cons, cell_ncons, am, an, um, un, asg, canm, cann)
                cellval[x] = v
                ok = True
                if level > 0:
                    for t in range(cell_ncons[x]):
                        if not _feasible(cell_cons[x, t], level, tm, tn, am, an, um, un,
                                         asg, center, cellval, canm, cann, pz, pe):
                            ok = False
                            break
                elif depth == N - 1:
                    for k in range(K):
                        if not _feasible(k, 0, tm, tn, am, an, um, un,
                                         asg, center, cellval, canm, cann, pz, pe):
                            ok = False
                            break
                if ok and avoid:
                    for j in range(pl_ptr[x], pl_ptr[x + 1]):
                        if _placement_hit(pl_idx[j], pl_cells, pl_vals, pl_len, cellval):
                            ok = False
                            break
                if ok:
                    placed = True
                    break
                _update(x, v, -1, cell_cons, cell_ncons, am, an, um, un, asg, canm, cann)
                cellval[x] = -1
            v += 1
        if not placed:
            val[depth] = -1
            if depth == 0:
                break
            depth -= 1
            continue
        if nodes == budget:
            status = STATUS_BUDGET
            break
        nodes += 1
        val[depth] = v
        if depth < N - 1:
            depth += 1
            val[depth] = -1
            continue
        # full assignment
        if classify:
            free = True
            for q in range(pl_len.shape[0]):
                if _placement_hit(q, pl_cells, pl_vals, pl_len, cellval):
                    free = False
                    break
            if free:
                if motif_free == 0:
                    for p in range(N):
                        witness[p] = cellval[p]
                motif_free += 1
                if stop_free:
                    leaves += 1
                    status = STATUS_STOPPED
                    break
        if store:
            if leaves == cap:
                cap *= 2
                grown = np.zeros((cap, words), dtype=np.uint64)
                grown[:leaves] = codes[:leaves]
                codes = grown
                grown_n = np.zeros(cap, dtype=np.int64)
                grown_n[:leaves] = leaf_nodes[:leaves]
                leaf_nodes = grown_n
            for p in range(N):
                w = p // 32
                codes[leaves, w] |= np.uint64(cellval[p]) << np.uint64(2 * (31 - p % 32))
            leaf_nodes[leaves] = nodes
        leaves += 1
        if leaves == max_leaves:
            status = STATUS_STOPPED
            break
    if store:
        return status, nodes, leaves, motif_free, codes[:leaves].copy(), leaf_nodes[:leaves].copy(), witness
    return status, nodes, leaves, motif_free, codes[:0], leaf_nodes[:0], witness
