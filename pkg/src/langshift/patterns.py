"""Finite rectangular patterns, cylinders, and the plain-text pattern format.

Text format::

    [background b]
    rows cols
    <rows lines of cols characters from 0123>

The ``background`` header is only meaningful for embedded configurations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import PatternFormatError

_GLYPHS = "0123"


@dataclass(frozen=True)
class Pattern:
    rows: int
    cols: int
    cells: bytes  # row-major, one byte per cell

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"pattern dimensions must be >= 1, got {self.rows}x{self.cols}")
        if len(self.cells) != self.rows * self.cols:
            raise ValueError("cell count does not match rows*cols")
        if any(c > 3 for c in self.cells):
            raise ValueError("cells must be states 0..3")

    @classmethod
    def from_array(cls, a) -> "Pattern":
        a = np.asarray(a, dtype=np.uint8)
        if a.ndim == 1:
            a = a[None, :]
        if a.ndim != 2:
            raise ValueError(f"expected a 2-d array, got shape {a.shape}")
        return cls(a.shape[0], a.shape[1], a.tobytes())

    @classmethod
    def uniform(cls, rows: int, cols: int, state: int) -> "Pattern":
        return cls(rows, cols, bytes([state]) * (rows * cols))

    @classmethod
    def literal(cls, text: str) -> "Pattern":
        """Compact literal: rows separated by ``/``, e.g. ``"33"`` or ``"3/3"``."""
        lines = [ln.strip() for ln in text.strip().split("/")]
        return cls.from_array(_rows_to_array(lines, first_line=1))

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def array(self) -> np.ndarray:
        a = np.frombuffer(self.cells, dtype=np.uint8).reshape(self.rows, self.cols)
        return a

    def __getitem__(self, rc: tuple[int, int]) -> int:
        r, c = rc
        return self.cells[r * self.cols + c]

    def to_text(self) -> str:
        body = "\n".join(
            "".join(_GLYPHS[v] for v in self.cells[r * self.cols:(r + 1) * self.cols])
            for r in range(self.rows)
        )
        return f"{self.rows} {self.cols}\n{body}\n"

    def to_literal(self) -> str:
        return "/".join(
            "".join(_GLYPHS[v] for v in self.cells[r * self.cols:(r + 1) * self.cols])
            for r in range(self.rows)
        )

    def transpose(self) -> "Pattern":
        return Pattern.from_array(self.array.T)

    def symmetries(self) -> list["Pattern"]:
        """Distinct images under the eight symmetries of the square."""
        a = self.array
        out: list[Pattern] = []
        for k in range(4):
            for b in (np.rot90(a, k), np.rot90(a, k).T):
                p = Pattern.from_array(b)
                if p not in out:
                    out.append(p)
        return out

    def contains(self, motif: "Pattern") -> bool:
        """True if ``motif`` occurs as a contiguous sub-block (no wraparound)."""
        return bool(occurrences(self.array[None], motif).any())

    def __str__(self) -> str:
        return self.to_literal()


def occurrences(stack: np.ndarray, motif: Pattern) -> np.ndarray:
    """For a ``(k, R, C)`` stack, flag the layers that contain ``motif``."""
    k, R, C = stack.shape
    mr, mc = motif.shape
    hit = np.zeros(k, dtype=bool)
    if mr > R or mc > C:
        return hit
    m = motif.array
    for i in range(R - mr + 1):
        for j in range(C - mc + 1):
            hit |= (stack[:, i:i + mr, j:j + mc] == m).all(axis=(1, 2))
    return hit


@dataclass(frozen=True)
class Cylinder:
    """The set of configurations showing ``pattern`` with top-left at ``anchor``."""

    pattern: Pattern
    anchor: tuple[int, int] = (0, 0)

    def shift(self, v: tuple[int, int]) -> "Cylinder":
        return Cylinder(self.pattern, (self.anchor[0] + v[0], self.anchor[1] + v[1]))


def shift(w: Pattern | Cylinder, v: tuple[int, int]) -> Cylinder:
    """Relocate a pattern placement by ``v`` (a bare pattern sits at the origin)."""
    if isinstance(w, Pattern):
        w = Cylinder(w)
    return w.shift(v)


def _rows_to_array(lines: list[str], first_line: int) -> np.ndarray:
    if not lines or not lines[0]:
        raise PatternFormatError("empty pattern", first_line)
    width = len(lines[0])
    out = np.empty((len(lines), width), dtype=np.uint8)
    for i, ln in enumerate(lines):
        if len(ln) != width:
            raise PatternFormatError(f"expected {width} cells, got {len(ln)}", first_line + i)
        for j, ch in enumerate(ln):
            if ch not in _GLYPHS:
                raise PatternFormatError(f"invalid cell character {ch!r}", first_line + i)
            out[i, j] = ord(ch) - 48
    return out


def parse_pattern_text(text: str) -> tuple[Pattern, int | None]:
    """Parse the text format; returns ``(pattern, background or None)``."""
    lines = text.splitlines()
    # drop trailing blank lines only
    while lines and not lines[-1].strip():
        lines.pop()
    pos = 0
    background = None
    if lines and lines[0].strip().startswith("background"):
        parts = lines[0].split()
        if len(parts) != 2 or parts[1] not in _GLYPHS:
            raise PatternFormatError("expected 'background <0..3>'", 1)
        background = int(parts[1])
        pos = 1
    if pos >= len(lines):
        raise PatternFormatError("missing 'rows cols' header", pos + 1)
    header = lines[pos].split()
    try:
        rows, cols = (int(t) for t in header)
    except ValueError:
        raise PatternFormatError(f"expected 'rows cols', got {lines[pos]!r}", pos + 1) from None
    if rows < 1 or cols < 1:
        raise PatternFormatError("rows and cols must be >= 1", pos + 1)
    body = [ln.strip() for ln in lines[pos + 1:]]
    if len(body) != rows:
        raise PatternFormatError(
            f"expected {rows} rows, got {len(body)}", pos + 2 + min(len(body), rows)
        )
    a = _rows_to_array(body, first_line=pos + 2)
    if a.shape[1] != cols:
        raise PatternFormatError(f"expected {cols} cells, got {a.shape[1]}", pos + 2)
    return Pattern.from_array(a), background


def read_pattern(path) -> tuple[Pattern, int | None]:
    with open(path) as fh:
        return parse_pattern_text(fh.read())


def format_patterns(patterns: Iterable[Pattern]) -> Iterable[str]:
    """Records separated by blank lines."""
    first = True
    for p in patterns:
        if not first:
            yield "\n"
        first = False
        yield p.to_text()
