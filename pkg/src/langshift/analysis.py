"""Checkers for the dynamical claims about the automaton, and the basin walk.

Each checker returns a :class:`PropositionReport`.  A ``refuted`` verdict
always carries a witness that can be replayed through :mod:`langshift.lattice`
or :mod:`langshift.preimage`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import BudgetExhausted, InvalidParams
from .lattice import (
    EmbeddedConfig,
    arrival_steps,
    require_quiescent,
    step,
    step_interior,
    step_torus_array,
)
from .patterns import Pattern, occurrences
from .preimage import PreimageQuery, decode_codes, has_preimage, preimages
from .preimage.search import _run
from .rule import N_NEIGHBOURHOODS, Params, neighbourhoods_array, rule_on_rows

RowRule = Callable[[np.ndarray, Params], np.ndarray]

VERIFIED = "verified"
REFUTED = "refuted"
INCONCLUSIVE = "inconclusive"

# Point y: a 0 ringed by 3s, everything else 0.  Its 5x5 window is the
# finite Garden-of-Eden candidate.
Y_WINDOW = Pattern.literal("00000/03330/03030/03330/00000")


@dataclass
class PropositionReport:
    prop: str
    verdict: str
    params: Params
    seed: int | None = None
    evidence: list[str] = field(default_factory=list)
    witnesses: list[tuple[str, Pattern]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.verdict == VERIFIED

    def to_text(self) -> str:
        seed = "none" if self.seed is None else str(self.seed)
        lines = [f"PROP {self.prop} {self.verdict} params=({self.params.pz},{self.params.pe}) seed={seed}"]
        lines += [f"  {e}" for e in self.evidence]
        for label, w in self.witnesses:
            lines.append(f"  witness {label}")
            lines += ["    " + ln for ln in w.to_text().splitlines()]
        return "\n".join(lines) + "\n"


def _torus_step_with(a: np.ndarray, rule: RowRule, p: Params) -> np.ndarray:
    """Torus update through an arbitrary row rule (used to exercise checkers)."""
    cols = [np.roll(a, (-dr, -dc), axis=(-2, -1)) for dr in (-1, 0, 1) for dc in (-1, 0, 1)]
    stacked = np.stack(cols, axis=-1)
    out = rule(stacked.reshape(-1, 9), p)
    return out.reshape(a.shape).astype(np.uint8)


def _nb_pattern(row: np.ndarray) -> Pattern:
    return Pattern.from_array(np.asarray(row, dtype=np.uint8).reshape(3, 3))


def check_all_fixed_at_99(sample_count: int = 1000, grid_size: int = 16, rng_seed: int = 0,
                          params=(9, 9), rule: RowRule = rule_on_rows) -> PropositionReport:
    """Every configuration is fixed: exhaustive over neighbourhoods, sampled over tori."""
    p = Params.coerce(params)
    if grid_size < 3:
        raise ValueError("grid_size must be >= 3")
    rep = PropositionReport("P1", VERIFIED, p, rng_seed)
    nbs = neighbourhoods_array()
    bad = np.flatnonzero(rule(nbs, p) != nbs[:, 4])
    rep.evidence.append(f"exhaustive neighbourhoods={N_NEIGHBOURHOODS} mismatches={bad.size}")
    if bad.size:
        rep.verdict = REFUTED
        rep.witnesses.append(("neighbourhood", _nb_pattern(nbs[bad[0]])))
    rng = np.random.default_rng(rng_seed)
    tori = rng.integers(0, 4, size=(sample_count, grid_size, grid_size), dtype=np.uint8)
    moved = np.flatnonzero((_torus_step_with(tori, rule, p) != tori).any(axis=(1, 2)))
    rep.evidence.append(f"random tori={sample_count} size={grid_size} moved={moved.size}")
    if moved.size:
        rep.verdict = REFUTED
        rep.witnesses.append(("torus", Pattern.from_array(tori[moved[0]])))
    return rep


def check_non_surjectivity(params, budget: int = 10**9) -> PropositionReport:
    """Exhibit a finite Garden-of-Eden pattern."""
    p = Params.coerce(params)
    if (p.pz, p.pe) == (9, 9):
        raise InvalidParams("at (9,9) the map is the identity, hence surjective")
    rep = PropositionReport("P2", VERIFIED, p)
    if p.pz == 0 or p.pe == 0:
        target = Pattern.literal("0")
        res = preimages(PreimageQuery(target, p), budget=budget)
        rep.evidence.append(f"target=0 {res.summary()}")
        if not res.complete:
            rep.verdict = INCONCLUSIVE
        elif len(res):
            rep.verdict = REFUTED
            rep.witnesses.append(("preimage-of-0", res[0]))
        else:
            rep.witnesses.append(("garden-of-eden", target))
        return rep
    q = PreimageQuery(Y_WINDOW, p)
    out = _run(q, budget, max_leaves=1)
    answer = "yes" if out.leaves else ("no" if out.status == 0 else "unknown")
    rep.evidence.append(f"target=y-window has_preimage={answer} nodes={out.nodes}")
    if answer == "yes":
        rep.verdict = REFUTED
        rep.witnesses.append(("preimage-of-y", Pattern.from_array(decode_codes(out.codes, 7, 7)[0])))
    elif answer == "unknown":
        rep.verdict = INCONCLUSIVE
    else:
        rep.witnesses.append(("garden-of-eden", Y_WINDOW))
    return rep


def check_no_strict_periodicity(params, sample_count: int = 500, grid_size: int = 12,
                                rng_seed: int = 0) -> PropositionReport:
    """Every sampled torus orbit ends in a fixed point, never cycling first."""
    p = Params.coerce(params)
    if grid_size < 3:
        raise ValueError("grid_size must be >= 3")
    bound = 2 * grid_size * grid_size
    rep = PropositionReport("P3", VERIFIED, p, rng_seed)
    rng = np.random.default_rng(rng_seed)
    start = rng.integers(0, 4, size=(sample_count, grid_size, grid_size), dtype=np.uint8)
    cur = start.copy()
    fixed_at = np.full(sample_count, -1)
    seen = [{cur[i].tobytes()} for i in range(sample_count)]
    active = np.arange(sample_count)
    for t in range(bound + 1):
        nxt = step_torus_array(cur[active], p)
        if ((nxt & cur[active]) != cur[active]).any():
            # a bit was cleared: monotonicity broken
            i = active[np.flatnonzero(((nxt & cur[active]) != cur[active]).any(axis=(1, 2)))[0]]
            rep.verdict = REFUTED
            rep.evidence.append(f"bit cleared at step {t}")
            rep.witnesses.append(("torus", Pattern.from_array(start[i])))
            return rep
        same = (nxt == cur[active]).all(axis=(1, 2))
        fixed_at[active[same]] = t
        moving = ~same
        for j in np.flatnonzero(moving):
            i = active[j]
            key = nxt[j].tobytes()
            if key in seen[i]:
                rep.verdict = REFUTED
                rep.evidence.append(f"non-fixed configuration revisited at step {t + 1}")
                rep.witnesses.append(("torus", Pattern.from_array(start[i])))
                return rep
            seen[i].add(key)
        cur[active[moving]] = nxt[moving]
        active = active[moving]
        if active.size == 0:
            break
    if active.size:
        rep.verdict = REFUTED
        rep.evidence.append(f"{active.size} orbits not fixed within {bound} steps")
        rep.witnesses.append(("torus", Pattern.from_array(start[active[0]])))
        return rep
    rep.evidence.append(
        f"tori={sample_count} size={grid_size} max_fixed_step={int(fixed_at.max())} bound={bound}"
    )
    return rep


def check_blocking_word(params, sample_count: int = 100, steps: int = 100, rng_seed: int = 0,
                        grid_size: int = 16, rule: RowRule = rule_on_rows) -> PropositionReport:
    """State 3 never changes: exhaustive over surroundings, then along sampled orbits."""
    p = Params.coerce(params)
    rep = PropositionReport("P4", VERIFIED, p, rng_seed)
    nbs = neighbourhoods_array()
    nbs = nbs[nbs[:, 4] == 3]
    bad = np.flatnonzero(rule(nbs, p) != 3)
    rep.evidence.append(f"exhaustive surroundings={len(nbs)} mismatches={bad.size}")
    if bad.size:
        rep.verdict = REFUTED
        rep.witnesses.append(("neighbourhood", _nb_pattern(nbs[bad[0]])))
        return rep
    rng = np.random.default_rng(rng_seed)
    start = rng.integers(0, 4, size=(sample_count, grid_size, grid_size), dtype=np.uint8)
    marked = start == 3
    cur = start
    for t in range(1, steps + 1):
        cur = _torus_step_with(cur, rule, p)
        lost = marked & (cur != 3)
        if lost.any():
            i = int(np.flatnonzero(lost.any(axis=(1, 2)))[0])
            rep.verdict = REFUTED
            rep.evidence.append(f"marked 3 lost at step {t}")
            rep.witnesses.append(("torus", Pattern.from_array(start[i])))
            return rep
    rep.evidence.append(f"random tori={sample_count} size={grid_size} steps={steps} marked_cells={int(marked.sum())}")
    return rep


def check_basin_growth(seed: Pattern, params, window_radius: int = 10, max_steps: int | None = None,
                       prop: str = "P5") -> PropositionReport:
    """Centre ``seed`` in a 0 background and time the all-3 window at each radius."""
    p = Params.coerce(params)
    require_quiescent(0, p)
    if max_steps is None:
        max_steps = 10 * (window_radius + 2)
    x = EmbeddedConfig.centered(seed, 0, p)
    arrivals = arrival_steps(x, p, window_radius, max_steps)
    rep = PropositionReport(prop, VERIFIED, p)
    rep.evidence.append(f"seed={seed.to_literal()} origin={x.origin}")
    rep.evidence.append("arrivals " + " ".join(
        f"r{k}={'-' if t is None else t}" for k, t in enumerate(arrivals)))
    reached = [t for t in arrivals if t is not None]
    if len(reached) < len(arrivals):
        rep.verdict = INCONCLUSIVE
        rep.evidence.append(f"radius {len(reached)} not reached within {max_steps} steps")
    elif any(b < a for a, b in zip(reached, reached[1:])):
        rep.verdict = REFUTED
        rep.evidence.append("arrival steps decrease with radius")
        rep.witnesses.append(("seed", seed))
    if len(reached) >= 3:
        half = len(reached) // 2
        rate = (reached[-1] - reached[half]) / (len(reached) - 1 - half)
        rep.evidence.append(f"steps_per_radius={rate:g}")
    return rep


def outside_box_counts(rows: int, cols: int) -> int:
    """Largest number of box cells inside the 3x3 window of a cell outside the box."""
    box = np.zeros((rows + 4, cols + 4), dtype=np.int64)
    box[2:-2, 2:-2] = 1
    s = np.zeros((rows + 2, cols + 2), dtype=np.int64)
    for i in range(3):
        for j in range(3):
            s += box[i:i + rows + 2, j:j + cols + 2]
    s[1:-1, 1:-1] = 0
    return int(s.max())


def check_no_cylinder_in_basin(u: Pattern, params, steps: int = 100) -> PropositionReport:
    """Bit barrier around ``u`` in a 0 background, asserted at every step."""
    p = Params.coerce(params)
    if p.pz < 4 and p.pe < 4:
        raise InvalidParams(f"needs pz >= 4 or pe >= 4, got {p}")
    require_quiescent(0, p)
    mask = (2 if p.pz >= 4 else 0) | (1 if p.pe >= 4 else 0)
    rep = PropositionReport("P6", VERIFIED, p)
    seen = outside_box_counts(u.rows, u.cols)
    barred = "+".join(b for b, bit in (("m", 2), ("n", 1)) if mask & bit)
    rep.evidence.append(f"u={u.to_literal()} barred={barred} max_box_cells_seen_outside={seen}")
    if seen > 3:
        rep.verdict = REFUTED
        rep.witnesses.append(("u", u))
        return rep
    x = EmbeddedConfig.embed(u, 0, (0, 0), p)
    r0, r1, c0, c1 = 0, u.rows - 1, 0, u.cols - 1
    for t in range(1, steps + 1):
        x = step(x, p)
        sr0, sr1, sc0, sc1 = x.box
        wr0, wr1, wc0, wc1 = min(sr0, r0), max(sr1, r1), min(sc0, c0), max(sc1, c1)
        w = x.window(wr0, wr1, wc0, wc1)
        outside = np.ones(w.shape, dtype=bool)
        outside[r0 - wr0:r1 - wr0 + 1, c0 - wc0:c1 - wc0 + 1] = False
        hit = outside & ((w & mask) != 0)
        if hit.any():
            rr, cc = np.argwhere(hit)[0]
            rep.verdict = REFUTED
            rep.evidence.append(f"barred bit set outside box at step {t}, cell ({rr + wr0},{cc + wc0})")
            rep.witnesses.append(("u", u))
            return rep
    rep.evidence.append(f"steps={steps} barrier held at every step")
    return rep


def check_uniform_fixed_point_basin(b: int, u: Pattern, params, steps: int = 50) -> PropositionReport:
    """The basin of the uniform fixed point ``b`` (b != 3) misses the cylinder ``[u]``.

    Witness: ``u`` at the origin in a ``b`` background plus a single 3 just
    right of ``u``.  The 3 is permanent, so the orbit cannot approach uniform ``b``.
    """
    p = Params.coerce(params)
    if b == 3:
        raise InvalidParams("state 3 is handled by the basin-growth checks")
    require_quiescent(b, p)
    rep = PropositionReport("FP", VERIFIED, p)
    a = np.full((u.rows, u.cols + 1), b, dtype=np.uint8)
    a[:, :u.cols] = u.array
    a[0, u.cols] = 3
    x = EmbeddedConfig.embed(Pattern.from_array(a), b, (0, 0), p)
    for _ in range(steps):
        x = step(x, p)
        if x.cell(0, u.cols) != 3:
            rep.verdict = REFUTED
            break
    rep.evidence.append(f"fixed_point={b} u={u.to_literal()} marker=(0,{u.cols}) steps={steps}")
    rep.witnesses.append(("x", Pattern.from_array(a)))
    return rep


# --------------------------------------------------------------------------
# basin walk

UNEXPLORED = "unexplored"
EMPTY = "empty-list"
EXPANDED = "expanded"


def motif_groups(literals: Sequence[str]) -> dict[str, list[Pattern]]:
    """Each literal with its images under the symmetries of the square."""
    return {lit: Pattern.literal(lit).symmetries() for lit in literals}


@dataclass
class WalkNode:
    id: int
    pattern: Pattern
    depth: int
    parent: "WalkNode | None" = field(default=None, repr=False)
    status: str = UNEXPLORED
    truncated: bool = False
    preimage_count: int | None = None
    motifs: dict[str, bool] = field(default_factory=dict)
    children: list["WalkNode"] = field(default_factory=list, repr=False)
    _codes: np.ndarray | None = field(default=None, repr=False)
    _tried: set = field(default_factory=set, repr=False)

    def header(self) -> str:
        parent = "-" if self.parent is None else str(self.parent.id)
        count = "-" if self.preimage_count is None else str(self.preimage_count)
        if self.truncated:
            count += "+"
        flags = " ".join(f"motif-{k}={'yes' if v else 'no'}" for k, v in self.motifs.items())
        return (f"node {self.id} depth={self.depth} parent={parent} status={self.status} "
                f"preimages={count} {flags}").rstrip()


@dataclass
class WalkTree:
    root: WalkNode
    params: Params
    seed: int
    max_depth: int
    search_nodes: int = 0
    reached: bool = False

    def nodes(self):
        """Depth-first, children in creation order."""
        stack = [self.root]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(reversed(n.children))

    def to_text(self) -> str:
        out = []
        for n in self.nodes():
            out.append(n.header())
            out += ["    " + ln for ln in n.pattern.to_text().splitlines()]
        deepest = max(n.depth for n in self.nodes())
        out.append(f"walk reached={str(self.reached).lower()} depth={deepest} "
                   f"tree_nodes={sum(1 for _ in self.nodes())} search_nodes={self.search_nodes}")
        return "\n".join(out) + "\n"


def basin_walk(start: Pattern, params, max_depth: int, rng_seed: int, budget: int = 10**8,
               expand_budget: int = 10**6, motifs: Sequence[str] = ("33", "333"),
               threads: int = 1) -> WalkTree:
    """Randomised descent through iterated preimages with backtracking.

    At each node the preimage list is computed (at most ``expand_budget``
    search nodes; a cut-off list is flagged ``truncated``) and an untried
    member is picked uniformly at random.  An empty list sends the walk back
    to the parent.  Stops at ``max_depth`` or when the root runs out of
    alternatives.  Raises :class:`BudgetExhausted` carrying the partial tree
    once ``budget`` search nodes have been spent.
    """
    p = Params.coerce(params)
    rng = np.random.default_rng(rng_seed)
    groups = motif_groups(motifs)
    counter = iter(range(1 << 62))

    def make(pattern: Pattern, depth: int, parent):
        stack = pattern.array[None]
        flags = {k: bool(any(occurrences(stack, m)[0] for m in ms)) for k, ms in groups.items()}
        return WalkNode(next(counter), pattern, depth, parent, motifs=flags)

    tree = WalkTree(make(start, 0, None), p, rng_seed, max_depth)
    cur = tree.root
    while True:
        if cur.depth == max_depth:
            tree.reached = True
            return tree
        if cur.status == UNEXPLORED:
            remaining = budget - tree.search_nodes
            call_budget = min(expand_budget, remaining)
            if call_budget <= 0:
                raise BudgetExhausted(f"walk spent its {budget} search nodes", partial=tree)
            res = preimages(PreimageQuery(cur.pattern, p), budget=call_budget, threads=threads)
            tree.search_nodes += res.explored_nodes
            cur._codes = res.codes
            cur.preimage_count = len(res)
            cur.truncated = not res.complete
            cur.status = EXPANDED if len(res) else EMPTY
            if cur.truncated and call_budget == remaining:
                raise BudgetExhausted(f"walk spent its {budget} search nodes", partial=tree)
        untried = (cur.preimage_count or 0) - len(cur._tried)
        if untried == 0:
            cur._codes = None
            if cur.parent is None:
                return tree
            cur = cur.parent
            continue
        if untried > cur.preimage_count // 2:
            while True:
                idx = int(rng.integers(cur.preimage_count))
                if idx not in cur._tried:
                    break
        else:
            pool = np.setdiff1d(np.arange(cur.preimage_count), np.fromiter(cur._tried, dtype=np.int64))
            idx = int(pool[rng.integers(len(pool))])
        cur._tried.add(idx)
        R, C = cur.pattern.rows + 2, cur.pattern.cols + 2
        child = make(Pattern.from_array(decode_codes(cur._codes[idx:idx + 1], R, C)[0]), cur.depth + 1, cur)
        cur.children.append(child)
        cur = child


def forward_image(pattern: Pattern, params, times: int) -> Pattern:
    """Apply the interior image ``times`` times (shrinks by 2 per application)."""
    a = pattern.array
    for _ in range(times):
        a = step_interior(a, params)
    return Pattern.from_array(a)
