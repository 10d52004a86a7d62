"""Particle contents, configurations, rate vectors and colour maps.

Configurations are plain tuples of species labels, 0 meaning a vacancy.
Sites are 0-based inside the package; text forms and the CLI are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, prod
from numbers import Real
from typing import Iterator, Sequence

Configuration = tuple[int, ...]

DEFAULT_CAP = 10**6


class EnumerationCapError(ValueError):
    """Raised when a state space is larger than the configured cap."""

    def __init__(self, count: int, cap: int, what: str = "configurations"):
        super().__init__(f"{count} {what} exceed the enumeration cap of {cap}")
        self.count = count
        self.cap = cap


@dataclass(frozen=True)
class Content:
    """Species multiplicities ``counts[r] = n_r``, with ``counts[0]`` vacancies.

    Trailing zero counts are dropped (keeping at least one particle species),
    so ``Content((2, 1, 0))`` is the same content as ``Content((2, 1))``.
    """

    counts: tuple[int, ...]

    def __init__(self, counts: Sequence[int]):
        c = [int(v) for v in counts]
        if len(c) < 2:
            raise ValueError("a content needs a vacancy count and at least one species")
        if any(v < 0 for v in c):
            raise ValueError(f"negative species count in {tuple(c)}")
        if c[0] < 1:
            raise ValueError("at least one vacancy is required (n_0 >= 1)")
        while len(c) > 2 and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "counts", tuple(c))

    @classmethod
    def from_config(cls, config: Sequence[int]) -> "Content":
        s = max(max(config), 1)
        counts = [0] * (s + 1)
        for v in config:
            counts[v] += 1
        return cls(counts)

    @property
    def L(self) -> int:
        return sum(self.counts)

    @property
    def s(self) -> int:
        return len(self.counts) - 1

    def n(self, r: int) -> int:
        return self.counts[r] if 0 <= r <= self.s else 0

    def N(self, r: int) -> int:
        """Number of particles of species r or stronger (0 for r > s)."""
        return sum(self.counts[r:]) if r >= 1 else self.L

    def row_counts(self) -> tuple[int, ...]:
        return tuple(self.N(r) for r in range(1, self.s + 1))

    def word(self) -> Configuration:
        """The weakly increasing configuration with this content."""
        return tuple(sp for sp, k in enumerate(self.counts) for _ in range(k))

    def size(self) -> int:
        return factorial(self.L) // prod(factorial(k) for k in self.counts)

    def __str__(self) -> str:
        return "<" + ", ".join(f"{r}^{k}" for r, k in enumerate(self.counts)) + ">"


def check_config(content: Content, config: Sequence[int]) -> Configuration:
    config = tuple(int(v) for v in config)
    if len(config) != content.L or sorted(config) != list(content.word()):
        raise ValueError(f"configuration {config} does not have content {content}")
    return config


def check_beta(beta: Sequence, L: int | None = None) -> tuple:
    """Validate a rate vector: positive, finite, of length L if given."""
    beta = tuple(beta)
    if L is not None and len(beta) != L:
        raise ValueError(f"rate vector has length {len(beta)}, expected {L}")
    for b in beta:
        if not isinstance(b, (Real, Fraction)) or not (0 < b < float("inf")):
            raise ValueError(f"rate parameter {b!r} must be positive and finite")
    return beta


def parse_scalar(value) -> Fraction | float:
    """``"p/q"`` strings and ints become Fractions; JSON floats stay floats."""
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, (float, Fraction)):
        return value
    raise TypeError(f"cannot interpret {value!r} as a scalar")


def multiset_permutations(word: Sequence[int]) -> Iterator[Configuration]:
    """Distinct permutations of ``word`` in lexicographic order."""
    a = sorted(word)
    n = len(a)
    while True:
        yield tuple(a)
        i = n - 2
        while i >= 0 and a[i] >= a[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while a[j] <= a[i]:
            j -= 1
        a[i], a[j] = a[j], a[i]
        a[i + 1:] = reversed(a[i + 1:])


def enumerate_configurations(content: Content, cap: int = DEFAULT_CAP) -> list[Configuration]:
    count = content.size()
    if count > cap:
        raise EnumerationCapError(count, cap)
    return list(multiset_permutations(content.word()))


class ColorMap:
    """A weakly order-preserving recolouring with ``phi(0) == 0``."""

    def __init__(self, values: Sequence[int]):
        values = tuple(int(v) for v in values)
        if not values or values[0] != 0:
            raise ValueError("a colour map must send 0 to 0")
        if any(b < a for a, b in zip(values, values[1:])):
            raise ValueError(f"colour map {values} is not weakly order-preserving")
        self.values = values

    @classmethod
    def identity(cls, s: int) -> "ColorMap":
        return cls(range(s + 1))

    @classmethod
    def threshold(cls, r: int, s: int) -> "ColorMap":
        return cls([1 if i >= r else 0 for i in range(s + 1)])

    def __call__(self, species: int) -> int:
        return self.values[species]

    def compose(self, inner: "ColorMap") -> "ColorMap":
        """``self ∘ inner``."""
        return ColorMap([self.values[v] for v in inner.values])

    def image(self, content: Content) -> Content:
        counts = [0] * (max(self.values) + 1 if max(self.values) >= 1 else 2)
        for sp, k in enumerate(content.counts):
            counts[self.values[sp]] += k
        return Content(counts)

    def __repr__(self) -> str:
        return f"ColorMap({self.values})"


def recolor(phi: ColorMap, config: Sequence[int]) -> Configuration:
    return tuple(phi(v) for v in config)


def single_species_projection(r: int, config: Sequence[int]) -> Configuration:
    if r < 1:
        raise ValueError("threshold species must be at least 1")
    return tuple(1 if v >= r else 0 for v in config)


def format_config(config: Sequence[int]) -> str:
    if max(config, default=0) <= 9:
        return "".join(str(v) for v in config)
    return ",".join(str(v) for v in config)


def parse_config(text: str) -> Configuration:
    text = text.strip()
    if "," in text:
        return tuple(int(v) for v in text.split(","))
    return tuple(int(ch) for ch in text)
