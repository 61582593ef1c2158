"""Configurations, the global map, and orbits.

Two boundary models share one rule:

* :class:`TorusGrid` -- a finite grid with wraparound, used for random sampling.
* :class:`EmbeddedConfig` -- a finite support rectangle inside a uniform
  background, standing for a point of the full plane.  Coordinates are
  ``(row, col)``; ``origin`` is the plane coordinate of the support's top-left.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import NonQuiescentBackground
from .patterns import Pattern
from .rule import Params, apply_rule


def _sums_wrap(a: np.ndarray):
    """Moore-neighbourhood bit counts on the last two axes, periodic."""
    m = (a >> 1).astype(np.int16)
    n = (a & 1).astype(np.int16)
    s0 = np.zeros_like(m)
    s1 = np.zeros_like(n)
    for dr in (-1, 0, 1):
        rm = np.roll(m, dr, axis=-2)
        rn = np.roll(n, dr, axis=-2)
        for dc in (-1, 0, 1):
            s0 += np.roll(rm, dc, axis=-1)
            s1 += np.roll(rn, dc, axis=-1)
    return s0, s1


def step_torus_array(a: np.ndarray, p) -> np.ndarray:
    """One synchronous update of a ``(..., rows, cols)`` stack of tori."""
    s0, s1 = _sums_wrap(a)
    return apply_rule(a, s0, s1, p)


def step_interior(a: np.ndarray, p) -> np.ndarray:
    """Image of a bare ``(R, C)`` block on its interior ``(R-2, C-2)``.

    Also accepts a ``(k, R, C)`` stack.
    """
    R, C = a.shape[-2:]
    a = np.asarray(a, dtype=np.uint8)
    m = a >> 1
    n = a & 1
    s0 = np.zeros(a.shape[:-2] + (R - 2, C - 2), dtype=np.uint8)
    s1 = np.zeros_like(s0)
    for i in range(3):
        for j in range(3):
            s0 += m[..., i:i + R - 2, j:j + C - 2]
            s1 += n[..., i:i + R - 2, j:j + C - 2]
    return apply_rule(a[..., 1:R - 1, 1:C - 1], s0, s1, p)


def quiescent_background(b: int, p) -> bool:
    """True iff a uniform-``b`` neighbourhood maps its centre to ``b``."""
    p = Params.coerce(p)
    m, n = b >> 1, b & 1
    return bool((m or p.pz > 0) and (n or p.pe > 0))


@dataclass(frozen=True)
class TorusGrid:
    cells: np.ndarray

    def __post_init__(self):
        a = np.array(self.cells, dtype=np.uint8)
        if a.ndim != 2 or a.shape[0] < 3 or a.shape[1] < 3:
            raise ValueError(f"torus must be at least 3x3, got shape {a.shape}")
        if a.max(initial=0) > 3:
            raise ValueError("cells must be states 0..3")
        a.setflags(write=False)
        object.__setattr__(self, "cells", a)

    @classmethod
    def random(cls, rows: int, cols: int, rng: np.random.Generator) -> "TorusGrid":
        return cls(rng.integers(0, 4, size=(rows, cols), dtype=np.uint8))

    @property
    def shape(self) -> tuple[int, int]:
        return self.cells.shape

    def __eq__(self, other):
        if not isinstance(other, TorusGrid):
            return NotImplemented
        return self.cells.shape == other.cells.shape and bool((self.cells == other.cells).all())

    def __hash__(self):
        return hash((self.cells.shape, self.cells.tobytes()))

    def roll(self, dr: int, dc: int) -> "TorusGrid":
        return TorusGrid(np.roll(self.cells, (dr, dc), axis=(0, 1)))

    def digest(self) -> str:
        return hashlib.blake2b(self.cells.tobytes(), digest_size=16).hexdigest()


@dataclass(frozen=True)
class EmbeddedConfig:
    """Finite support in a uniform background.

    The support is kept trimmed: no border row or column of it is entirely
    background.  An all-background configuration is the 1x1 background cell
    at the origin, so dataclass equality is equality of plane configurations.
    """

    background: int
    support: Pattern
    origin: tuple[int, int] = (0, 0)

    def __post_init__(self):
        if self.background not in (0, 1, 2, 3):
            raise ValueError(f"background must be a state, got {self.background!r}")
        a = self.support.array
        keep_r = np.flatnonzero((a != self.background).any(axis=1))
        keep_c = np.flatnonzero((a != self.background).any(axis=0))
        if keep_r.size == 0:
            object.__setattr__(self, "support", Pattern.uniform(1, 1, self.background))
            object.__setattr__(self, "origin", (0, 0))
            return
        r0, r1, c0, c1 = keep_r[0], keep_r[-1], keep_c[0], keep_c[-1]
        if (r0, c0) != (0, 0) or r1 != a.shape[0] - 1 or c1 != a.shape[1] - 1:
            object.__setattr__(self, "support", Pattern.from_array(a[r0:r1 + 1, c0:c1 + 1]))
        object.__setattr__(
            self, "origin", (int(self.origin[0] + r0), int(self.origin[1] + c0))
        )

    @classmethod
    def embed(cls, pattern: Pattern, background: int = 0, origin=(0, 0), params=None):
        """Build a configuration, optionally checking quiescence under ``params``."""
        if params is not None:
            require_quiescent(background, params)
        return cls(background, pattern, (int(origin[0]), int(origin[1])))

    @classmethod
    def centered(cls, pattern: Pattern, background: int = 0, params=None):
        """Place ``pattern`` so cell ``(rows//2, cols//2)`` sits at the origin."""
        return cls.embed(pattern, background, (-(pattern.rows // 2), -(pattern.cols // 2)), params)

    @property
    def box(self) -> tuple[int, int, int, int]:
        """Inclusive ``(r0, r1, c0, c1)`` of the support in plane coordinates."""
        r0, c0 = self.origin
        return r0, r0 + self.support.rows - 1, c0, c0 + self.support.cols - 1

    def window(self, r0: int, r1: int, c0: int, c1: int) -> np.ndarray:
        """Dense copy of the inclusive plane window ``[r0, r1] x [c0, c1]``."""
        out = np.full((r1 - r0 + 1, c1 - c0 + 1), self.background, dtype=np.uint8)
        sr0, sr1, sc0, sc1 = self.box
        ir0, ir1 = max(r0, sr0), min(r1, sr1)
        ic0, ic1 = max(c0, sc0), min(c1, sc1)
        if ir0 <= ir1 and ic0 <= ic1:
            out[ir0 - r0:ir1 - r0 + 1, ic0 - c0:ic1 - c0 + 1] = self.support.array[
                ir0 - sr0:ir1 - sr0 + 1, ic0 - sc0:ic1 - sc0 + 1
            ]
        return out

    def cell(self, r: int, c: int) -> int:
        return int(self.window(r, r, c, c)[0, 0])

    def shift(self, v: tuple[int, int]) -> "EmbeddedConfig":
        """The shift map: the result at ``j`` is this configuration at ``j + v``."""
        return EmbeddedConfig(
            self.background, self.support, (self.origin[0] - v[0], self.origin[1] - v[1])
        )

    def digest(self) -> str:
        h = hashlib.blake2b(digest_size=16)
        h.update(repr((self.background, self.origin, self.support.shape)).encode())
        h.update(self.support.cells)
        return h.hexdigest()


Config = Union[TorusGrid, EmbeddedConfig]


def require_quiescent(background: int, p) -> None:
    if not quiescent_background(background, p):
        raise NonQuiescentBackground(
            f"background {background} is not quiescent under params {Params.coerce(p)}"
        )


def step(c: Config, p) -> Config:
    p = Params.coerce(p)
    if isinstance(c, TorusGrid):
        return TorusGrid(step_torus_array(c.cells, p))
    require_quiescent(c.background, p)
    a = np.pad(c.support.array, 2, constant_values=c.background)
    new = step_interior(a, p)
    return EmbeddedConfig(c.background, Pattern.from_array(new), (c.origin[0] - 1, c.origin[1] - 1))


@dataclass
class OrbitTrace:
    """Orbit of a configuration under the global map.

    ``configs[t]`` is the configuration at step ``t`` when it was kept, else
    ``None``; ``digests`` covers every step.  ``fixed_at`` is the first step
    whose configuration is a fixed point, or ``None`` if the budget ran out.
    """

    configs: list
    digests: list[str]
    fixed_at: int | None
    final: Config = field(repr=False)

    @property
    def status(self) -> str:
        return "fixed" if self.fixed_at is not None else "exhausted"

    @property
    def steps(self) -> int:
        return len(self.digests) - 1


def evolve(c: Config, p, max_steps: int, snapshot_every: int = 1) -> OrbitTrace:
    """Iterate until a fixed point or ``max_steps`` applications.

    Full snapshots are kept every ``snapshot_every`` steps (and always for
    the final one); digests are kept for all steps.
    """
    p = Params.coerce(p)
    configs = [c]
    digests = [c.digest()]
    for t in range(max_steps + 1):
        nxt = step(c, p)
        if nxt == c:
            return OrbitTrace(configs, digests, t, c)
        if t == max_steps:
            break
        c = nxt
        configs.append(c if (t + 1) % snapshot_every == 0 else None)
        digests.append(c.digest())
    configs[-1] = c
    return OrbitTrace(configs, digests, None, c)


def distance(x: EmbeddedConfig, y: EmbeddedConfig) -> float:
    """Cantor-style metric: ``2**-k`` with ``k`` the least sup-norm of a disagreement."""
    xr0, xr1, xc0, xc1 = x.box
    yr0, yr1, yc0, yc1 = y.box
    r0, r1 = min(xr0, yr0, 0) - 1, max(xr1, yr1, 0) + 1
    c0, c1 = min(xc0, yc0, 0) - 1, max(xc1, yc1, 0) + 1
    diff = x.window(r0, r1, c0, c1) != y.window(r0, r1, c0, c1)
    if not diff.any():
        # the ring past both supports agrees, so the backgrounds agree too
        return 0.0
    rr, cc = np.nonzero(diff)
    k = int(np.maximum(np.abs(rr + r0), np.abs(cc + c0)).min())
    return 2.0 ** -k


def all3_window(c: EmbeddedConfig, k: int) -> bool:
    if c.background == 3:
        sr0, sr1, sc0, sc1 = c.box
        if sr1 < -k or sr0 > k or sc1 < -k or sc0 > k:
            return True
    return bool((c.window(-k, k, -k, k) == 3).all())


def converges_to_uniform3(c: EmbeddedConfig, p, k: int, max_steps: int) -> int | None:
    """First step at which the window ``[-k, k]^2`` is all 3, or ``None``."""
    p = Params.coerce(p)
    require_quiescent(c.background, p)
    for t in range(max_steps + 1):
        if all3_window(c, k):
            return t
        if t < max_steps:
            c = step(c, p)
    return None


def arrival_steps(c: EmbeddedConfig, p, max_radius: int, max_steps: int) -> list[int | None]:
    """``converges_to_uniform3`` for every radius 0..max_radius in one orbit."""
    p = Params.coerce(p)
    require_quiescent(c.background, p)
    out: list[int | None] = [None] * (max_radius + 1)
    for t in range(max_steps + 1):
        for k in range(max_radius + 1):
            if out[k] is None and all3_window(c, k):
                out[k] = t
        if all(v is not None for v in out) or t == max_steps:
            break
        c = step(c, p)
    return out
