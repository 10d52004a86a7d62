"""Multiline diagrams, the bully-path projection and the multiline processes.

A diagram is stored as one bitmask per row, row 0 being the bottom row;
bit c of a row is set when column c holds a particle.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from math import comb, prod
from typing import Iterator, Sequence

from .dynamics import DistributionTable, GeneratorMatrix, build_chain
from .states import DEFAULT_CAP, Configuration, Content, EnumerationCapError, check_beta
from .symmetric import elementary


@dataclass(frozen=True, slots=True)
class MultilineDiagram:
    L: int
    rows: tuple[int, ...]

    @property
    def s(self) -> int:
        return len(self.rows)

    def occupied(self, row: int, col: int) -> bool:
        return bool(self.rows[row] >> col & 1)

    def row_counts(self) -> tuple[int, ...]:
        return tuple(r.bit_count() for r in self.rows)

    def column_counts(self) -> tuple[int, ...]:
        return tuple(sum(r >> c & 1 for r in self.rows) for c in range(self.L))

    @classmethod
    def from_cells(cls, rows: Sequence[Sequence[int]]) -> "MultilineDiagram":
        """Build from 0/1 rows listed bottom row first."""
        L = len(rows[0])
        masks = []
        for row in rows:
            if len(row) != L:
                raise ValueError("rows of a diagram must have equal length")
            masks.append(sum(1 << c for c, v in enumerate(row) if v))
        return cls(L, tuple(masks))

    def __str__(self) -> str:
        return format_diagram(self)


def format_diagram(d: MultilineDiagram) -> str:
    """Rows top to bottom, '*' for a particle and '.' for a vacancy."""
    return "\n".join(
        "".join("*" if row >> c & 1 else "." for c in range(d.L)) for row in reversed(d.rows)
    )


def parse_diagram(text: str) -> MultilineDiagram:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    cells = [[1 if ch == "*" else 0 for ch in ln] for ln in reversed(lines)]
    for ln in lines:
        if set(ln) - {"*", "."}:
            raise ValueError(f"bad diagram row {ln!r}")
    return MultilineDiagram.from_cells(cells)


def _masks(L: int, k: int) -> list[int]:
    return [sum(1 << c for c in cols) for cols in combinations(range(L), k)]


def diagram_count(content: Content) -> int:
    return prod(comb(content.L, n) for n in content.row_counts())


def iter_diagrams(content: Content) -> Iterator[MultilineDiagram]:
    L = content.L
    per_row = [_masks(L, n) for n in content.row_counts()]
    for rows in product(*per_row):
        yield MultilineDiagram(L, rows)


def enumerate_diagrams(content: Content, cap: int = DEFAULT_CAP) -> list[MultilineDiagram]:
    count = diagram_count(content)
    if count > cap:
        raise EnumerationCapError(count, cap, "diagrams")
    return list(iter_diagrams(content))


def weight(d: MultilineDiagram, beta: Sequence):
    """prod_i beta_i ** (number of particles in column i)."""
    out = Fraction(1) if not any(isinstance(b, float) for b in beta) else 1.0
    for c, v in enumerate(d.column_counts()):
        if v:
            out = out * beta[c] ** v
    return out


def _label_row(above: Sequence[int], mask: int, L: int, label: int, ltr: bool = True) -> tuple[int, ...]:
    """Labels of row ``mask`` given the labelled row above it.

    Row-above particles are served strongest first; equal labels are taken
    left to right (or right to left when ``ltr`` is false).  Each claims the
    first unclaimed particle at or cyclically right of its column.
    Unclaimed particles get ``label``.
    """
    out = [0] * L
    free = [bool(mask >> c & 1) for c in range(L)]
    order = sorted(
        (c for c in range(L) if above[c]),
        key=(lambda c: (-above[c], c)) if ltr else (lambda c: (-above[c], -c)),
    )
    for c in order:
        k = c
        while not free[k]:
            k += 1
            if k == L:
                k = 0
        free[k] = False
        out[k] = above[c]
    for c in range(L):
        if free[c]:
            out[c] = label
    return tuple(out)


def labelled_rows(d: MultilineDiagram, ltr: bool = True) -> list[tuple[int, ...]]:
    """Species labels row by row, bottom row first; 0 marks a vacancy."""
    s, L = d.s, d.L
    top = tuple(s if d.rows[-1] >> c & 1 else 0 for c in range(L))
    rows = [top]
    for r in range(s - 2, -1, -1):
        rows.append(_label_row(rows[-1], d.rows[r], L, r + 1, ltr))
    rows.reverse()
    return rows


def project(d: MultilineDiagram, ltr: bool = True) -> Configuration:
    """The bully-path projection: the labelled bottom row."""
    return labelled_rows(d, ltr)[0]


def _jump_right(row: int, col: int, L: int) -> tuple[int, int]:
    k = col
    while True:
        k += 1
        if k == L:
            k = 0
        if not row >> k & 1:
            return (row & ~(1 << col)) | (1 << k), k


def _jump_left(row: int, col: int, L: int) -> tuple[int, int]:
    k = col
    while True:
        k -= 1
        if k < 0:
            k = L - 1
        if not row >> k & 1:
            return (row & ~(1 << col)) | (1 << k), k


def multiline_transition(d: MultilineDiagram, site: int) -> tuple[MultilineDiagram, int]:
    """Forward move for a bell at bottom-row column ``site``.

    Returns the new diagram and the end column (where the bell leaves the
    top row).
    """
    rows = list(d.rows)
    col = site
    for r, row in enumerate(rows):
        if row >> col & 1:
            rows[r], col = _jump_right(row, col, d.L)
    return MultilineDiagram(d.L, tuple(rows)), col


def reverse_transition(d: MultilineDiagram, site: int) -> tuple[MultilineDiagram, int]:
    """Reverse-process move for a bell at top-row column ``site``;
    particles jump left and the bell travels downwards."""
    rows = list(d.rows)
    col = site
    for r in range(len(rows) - 1, -1, -1):
        row = rows[r]
        if row >> col & 1:
            rows[r], col = _jump_left(row, col, d.L)
    return MultilineDiagram(d.L, tuple(rows)), col


def multiline_step(d: MultilineDiagram, site: int) -> MultilineDiagram:
    return multiline_transition(d, site)[0]


def reverse_step(d: MultilineDiagram, site: int) -> MultilineDiagram:
    return reverse_transition(d, site)[0]


def forward_generator(content: Content, beta: Sequence, cap: int = DEFAULT_CAP) -> GeneratorMatrix:
    beta = check_beta(beta, content.L)
    return build_chain(enumerate_diagrams(content, cap), multiline_step, beta)


def reverse_generator(content: Content, beta: Sequence, cap: int = DEFAULT_CAP) -> GeneratorMatrix:
    beta = check_beta(beta, content.L)
    return build_chain(enumerate_diagrams(content, cap), reverse_step, beta)


def partition_function(content: Content, beta: Sequence):
    """Z = prod over rows r of e_{N_r}(beta)."""
    out = Fraction(1) if not any(isinstance(b, float) for b in beta) else 1.0
    for n in content.row_counts():
        out = out * elementary(n, beta)
    return out


def multiline_stationary(content: Content, beta: Sequence, cap: int = DEFAULT_CAP) -> DistributionTable:
    beta = check_beta(beta, content.L)
    diagrams = enumerate_diagrams(content, cap)
    weights = [weight(d, beta) for d in diagrams]
    z = sum(weights)
    return DistributionTable(diagrams, [w / z for w in weights])


@lru_cache(maxsize=64)
def _column_classes(counts: tuple[int, ...]) -> tuple[int, tuple[tuple[int, int], ...]]:
    """Every diagram packed to its column-count vector, with multiplicities."""
    content = Content(counts)
    L = content.L
    width = max(content.s, 1).bit_length() + 1
    codes = [[sum(1 << (width * c) for c in cols) for cols in combinations(range(L), n)]
             for n in content.row_counts()]
    return width, tuple(Counter(map(sum, product(*codes))).items())


def diagram_weight_sum(content: Content, beta: Sequence):
    """Sum of weights over every diagram, by direct enumeration.

    Diagrams are grouped by their column-count vector first, packed into
    one integer per diagram, so each distinct weight is evaluated once.
    """
    beta = check_beta(beta, content.L)
    L = content.L
    width, groups = _column_classes(content.counts)
    mask = (1 << width) - 1
    total = 0
    for code, mult in groups:
        w = 1
        for c in range(L):
            v = code >> (width * c) & mask
            if v:
                w = w * beta[c] ** v
        total += mult * w
    return total


def asep_values_bruteforce(content: Content, beta: Sequence, cap: int = DEFAULT_CAP) -> dict[Configuration, object]:
    """Diagram-weight sums per bottom row, by projecting every diagram."""
    beta = check_beta(beta, content.L)
    out: dict[Configuration, object] = {}
    count = diagram_count(content)
    if count > cap:
        raise EnumerationCapError(count, cap, "diagrams")
    for d in iter_diagrams(content):
        eta = project(d)
        out[eta] = out.get(eta, 0) + weight(d, beta)
    return out


@lru_cache(maxsize=256)
def _asep_structure(counts: tuple[int, ...]):
    """Transition tables of the row-by-row labelling.

    The labels of row r depend only on the labelled row r+1 and the particle
    set of row r, so the diagram sum factors through labelled rows.
    """
    content = Content(counts)
    L, s = content.L, content.s
    ns = content.row_counts()
    top_masks = _masks(L, ns[-1])
    keys = [tuple(s if m >> c & 1 else 0 for c in range(L)) for m in top_masks]
    levels = [(top_masks, None, keys)]
    for r in range(s - 2, -1, -1):
        masks = _masks(L, ns[r])
        index: dict[tuple[int, ...], int] = {}
        trans = []
        for i, w in enumerate(keys):
            for mi, m in enumerate(masks):
                lab = _label_row(w, m, L, r + 1)
                k = index.setdefault(lab, len(index))
                trans.append((i, mi, k))
        keys = list(index)
        levels.append((masks, trans, keys))
    return levels


def asep_values(content: Content, beta: Sequence) -> dict[Configuration, object]:
    """ASEP polynomial values at q=1, t=0: for each configuration, the total
    weight of diagrams projecting to it.
    """
    beta = check_beta(beta, content.L)
    L = content.L

    def mask_weight(m):
        w = Fraction(1) if not isinstance(beta[0], float) else 1.0
        for c in range(L):
            if m >> c & 1:
                w = w * beta[c]
        return w

    levels = _asep_structure(content.counts)
    masks, _, keys = levels[0]
    vals = [mask_weight(m) for m in masks]
    for masks, trans, keys in levels[1:]:
        mw = [mask_weight(m) for m in masks]
        nxt = [0] * len(keys)
        for i, mi, k in trans:
            nxt[k] += vals[i] * mw[mi]
        vals = nxt
    return dict(zip(keys, vals))


def asep_value(config: Sequence[int], beta: Sequence):
    config = tuple(config)
    return asep_values(Content.from_config(config), beta).get(config, 0)


def stationary_from_diagrams(content: Content, beta: Sequence) -> dict[Configuration, object]:
    """pi(eta) = asep(eta) / Z."""
    z = partition_function(content, beta)
    return {eta: v / z for eta, v in asep_values(content, beta).items()}
