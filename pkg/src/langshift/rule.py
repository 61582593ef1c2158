"""State encoding and the local rule of the language-shift automaton.

A state ``s`` in {0, 1, 2, 3} packs two bits: ``m = s // 2`` (primary
language, Amazigh -> Arabic) and ``n = s % 2`` (second language,
French -> English).  Each bit is switched on when the count of that bit
over the 3x3 Moore neighbourhood (centre included) reaches its threshold.
Bits never switch off, so 3 is absorbing.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidParams

STATES = (0, 1, 2, 3)
N_NEIGHBOURHOODS = 4**9

# the eight symmetries of the square, as maps on 3x3 arrays
SQUARE_SYMMETRIES = (
    lambda a: a,
    lambda a: np.rot90(a, 1),
    lambda a: np.rot90(a, 2),
    lambda a: np.rot90(a, 3),
    lambda a: np.flipud(a),
    lambda a: np.fliplr(a),
    lambda a: np.transpose(a),
    lambda a: np.rot90(np.transpose(a), 2),
)


@dataclass(frozen=True, order=True)
class Params:
    """Thresholds ``(pz, pe)`` on the m-bit and n-bit counts, each in 0..9."""

    pz: int
    pe: int

    def __post_init__(self):
        for name in ("pz", "pe"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or not 0 <= v <= 9:
                raise InvalidParams(f"{name} must be an integer in 0..9, got {v!r}")

    @classmethod
    def coerce(cls, p) -> "Params":
        if isinstance(p, Params):
            return p
        pz, pe = p
        return cls(int(pz), int(pe))

    @classmethod
    def parse(cls, text: str) -> "Params":
        try:
            pz, pe = (int(t) for t in text.replace("(", "").replace(")", "").split(","))
        except ValueError as exc:
            raise InvalidParams(f"expected 'pz,pe', got {text!r}") from exc
        return cls(pz, pe)

    def __iter__(self):
        return iter((self.pz, self.pe))

    def __str__(self) -> str:
        return f"({self.pz},{self.pe})"


def all_params():
    return [Params(pz, pe) for pz in range(10) for pe in range(10)]


def decode(s: int) -> tuple[int, int]:
    """Return the bit pair ``(m, n)`` of a state."""
    if s not in STATES:
        raise ValueError(f"not a state: {s!r}")
    return s >> 1, s & 1


def encode(m: int, n: int) -> int:
    return (m << 1) | n


def _as_nb(nb) -> np.ndarray:
    a = np.asarray(nb, dtype=np.int64)
    if a.shape != (3, 3):
        raise ValueError(f"neighbourhood must be 3x3, got shape {a.shape}")
    if a.min() < 0 or a.max() > 3:
        raise ValueError("neighbourhood cells must be states 0..3")
    return a


def sigma0(nb) -> int:
    """Number of cells in the 3x3 block with the m-bit set."""
    return int((_as_nb(nb) >> 1).sum())


def sigma1(nb) -> int:
    """Number of cells in the 3x3 block with the n-bit set."""
    return int((_as_nb(nb) & 1).sum())


def local_rule(nb, p) -> int:
    a = _as_nb(nb)
    p = Params.coerce(p)
    m, n = decode(int(a[1, 1]))
    m2 = 1 if m or (a >> 1).sum() >= p.pz else 0
    n2 = 1 if n or (a & 1).sum() >= p.pe else 0
    return encode(m2, n2)


def apply_rule(center, s0, s1, p) -> np.ndarray:
    """Vectorised rule from the centre state and the two neighbourhood counts."""
    p = Params.coerce(p)
    center = np.asarray(center)
    m = (center >> 1) | (np.asarray(s0) >= p.pz)
    n = (center & 1) | (np.asarray(s1) >= p.pe)
    return ((m << 1) | n).astype(np.uint8)


def neighbourhoods_array(index: np.ndarray | None = None) -> np.ndarray:
    """Decode neighbourhood indices into an ``(k, 9)`` uint8 array.

    Index ``i`` stores cell ``j`` (row-major in the 3x3 block) in base-4
    digit ``8 - j``, so ascending index order is lexicographic order.
    """
    if index is None:
        index = np.arange(N_NEIGHBOURHOODS, dtype=np.int64)
    shifts = 2 * np.arange(8, -1, -1, dtype=np.int64)
    return ((index[:, None] >> shifts) & 3).astype(np.uint8)


def rule_on_rows(cells: np.ndarray, p) -> np.ndarray:
    """Apply the rule to each row of a ``(k, 9)`` array of flattened 3x3 blocks."""
    s0 = (cells >> 1).sum(axis=1)
    s1 = (cells & 1).sum(axis=1)
    return apply_rule(cells[:, 4], s0, s1, p)


@lru_cache(maxsize=128)
def rule_table(p: Params) -> np.ndarray:
    """Output state for every one of the 4**9 neighbourhoods, read-only."""
    table = rule_on_rows(neighbourhoods_array(), p)
    table.setflags(write=False)
    return table
