"""Elementary symmetric and Schur polynomial evaluation.

All functions work on exact rationals and on floats alike; the arithmetic
type of the inputs is the arithmetic type of the result.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


def elementary(m: int, xs: Sequence):
    """e_m(xs), by the one-variable recurrence e_m(x, y) = e_m(x) + y e_{m-1}(x)."""
    if m < 0:
        return 0
    if m == 0:
        return _one(xs)
    if m > len(xs):
        return _zero(xs)
    e = [_one(xs)] + [_zero(xs)] * m
    for k, x in enumerate(xs, start=1):
        for j in range(min(k, m), 0, -1):
            e[j] = e[j] + x * e[j - 1]
    return e[m]


def elementary_all(xs: Sequence) -> list:
    """[e_0(xs), ..., e_n(xs)]."""
    e = [_one(xs)] + [_zero(xs)] * len(xs)
    for k, x in enumerate(xs, start=1):
        for j in range(k, 0, -1):
            e[j] = e[j] + x * e[j - 1]
    return e


def elementary_mu(mu: Sequence[int], xs: Sequence):
    out = _one(xs)
    for m in mu:
        out = out * elementary(m, xs)
    return out


def complete(m: int, xs: Sequence):
    """Complete homogeneous symmetric polynomial h_m(xs)."""
    if m < 0:
        return 0
    h = [_one(xs)] + [_zero(xs)] * m
    for x in xs:
        for j in range(1, m + 1):
            h[j] = h[j] + x * h[j - 1]
    return h[m]


def _floating(xs) -> bool:
    return any(isinstance(x, float) for x in xs)


def _one(xs):
    return 1.0 if any(isinstance(x, float) for x in xs) else Fraction(1)


def _zero(xs):
    return 0.0 if any(isinstance(x, float) for x in xs) else Fraction(0)


def determinant(rows: Sequence[Sequence]):
    """Determinant by Gaussian elimination.

    Exact for rationals; floats use partial pivoting.
    """
    m = [list(r) for r in rows]
    n = len(m)
    if n == 0:
        return 1
    floating = any(isinstance(v, float) for r in m for v in r)
    if not floating:
        m = [[Fraction(v) for v in r] for r in m]
    det = 1
    for k in range(n):
        if floating:
            piv = max(range(k, n), key=lambda r: abs(m[r][k]))
            if m[piv][k] == 0:
                return 0.0
        else:
            piv = next((r for r in range(k, n) if m[r][k] != 0), None)
            if piv is None:
                return Fraction(0)
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            det = -det
        pk = m[k][k]
        det = det * pk
        for r in range(k + 1, n):
            f = m[r][k] / pk
            if f:
                row_r, row_k = m[r], m[k]
                for c in range(k + 1, n):
                    row_r[c] = row_r[c] - f * row_k[c]
    return det


def _normalize(lam: Sequence[int]) -> list[int]:
    lam = [int(v) for v in lam]
    if any(b > a for a, b in zip(lam, lam[1:])) or any(v < 0 for v in lam):
        raise ValueError(f"{tuple(lam)} is not a partition")
    while lam and lam[-1] == 0:
        lam.pop()
    return lam


def schur_bialternant(lam: Sequence[int], xs: Sequence):
    """s_lambda(xs) as det(x_i^(lambda_j + n - j)) / det(x_i^(n - j)).

    When two arguments coincide both determinants vanish; the value is then
    taken from the Jacobi-Trudi determinant in complete symmetric functions.
    Float inputs are evaluated exactly and rounded once, since the ratio of
    near-singular Vandermonde-type determinants cancels badly in floats.
    """
    lam = _normalize(lam)
    if _floating(xs):
        return float(schur_bialternant(lam, [Fraction(x) for x in xs]))
    n = len(xs)
    if len(lam) > n:
        return _zero(xs)
    if not lam:
        return _one(xs)
    if len(set(xs)) < n:
        return schur_jacobi_trudi(lam, xs)
    lam = lam + [0] * (n - len(lam))
    num = determinant([[x ** (lam[j] + n - 1 - j) for j in range(n)] for x in xs])
    den = determinant([[x ** (n - 1 - j) for j in range(n)] for x in xs])
    return num / den


def schur_jacobi_trudi(lam: Sequence[int], xs: Sequence):
    """s_lambda = det(h_(lambda_i - i + j)); float inputs are evaluated exactly."""
    lam = _normalize(lam)
    if _floating(xs):
        return float(schur_jacobi_trudi(lam, [Fraction(x) for x in xs]))
    if len(lam) > len(xs):
        return _zero(xs)
    if not lam:
        return _one(xs)
    k = len(lam)
    top = lam[0] + k
    h = [complete(m, xs) for m in range(top + 1)]

    def hh(m):
        return h[m] if 0 <= m <= top else _zero(xs)

    return determinant([[hh(lam[i] - i + j) for j in range(k)] for i in range(k)])


@dataclass(frozen=True)
class TwoColumnShape:
    """The shape <1^b, 2^a>: ``a`` rows of length two over ``b`` rows of length one.

    A negative ``a`` denotes the zero polynomial.
    """

    a: int
    b: int

    def partition(self) -> tuple[int, ...]:
        return (2,) * max(self.a, 0) + (1,) * self.b

    def conjugate(self) -> tuple[int, ...]:
        """Column lengths (a + b, a)."""
        return (self.a + self.b, self.a)


def schur_two_column(shape: TwoColumnShape, xs: Sequence):
    """Dual Jacobi-Trudi: s_<1^b, 2^a> = e_(a+b) e_a - e_(a+b+1) e_(a-1)."""
    a, b = shape.a, shape.b
    if a < 0:
        return _zero(xs)
    if b < 0:
        raise ValueError("row-of-one count must be nonnegative")
    return elementary(a + b, xs) * elementary(a, xs) - elementary(a + b + 1, xs) * elementary(a - 1, xs)


def s2(a: int, b: int, xs: Sequence):
    """Shorthand for the two-column Schur value s_<1^b, 2^a>(xs)."""
    return schur_two_column(TwoColumnShape(a, b), xs)


def schur_hook_content(lam: Sequence[int], n: int) -> Fraction:
    """s_lambda(1, ..., 1) with n ones, by the hook-content formula."""
    lam = _normalize(lam)
    conj = [sum(1 for v in lam if v > j) for j in range(lam[0])] if lam else []
    num = Fraction(1)
    for i, row in enumerate(lam):
        for j in range(row):
            hook = row - j + conj[j] - i - 1
            num *= Fraction(n + j - i, hook)
    return num
