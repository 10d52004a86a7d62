"""Exact rational solves for the stationary equations of finite chains.

Two independent solvers are provided.  ``solve_bareiss`` is a fraction-free
Gaussian elimination over the integers and is used for small systems;
``solve_dixon`` factors the matrix once modulo a word-sized prime and lifts
the solution p-adically, recovering rationals by reconstruction.  Every
result of ``solve_dixon`` is checked exactly before it is returned, so a
wrong reconstruction can never escape.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt, lcm
from typing import Sequence

import numpy as np

# Products of two residues and row sums of length <= 2**11 stay below 2**63.
_PRIMES = (67108859, 67108837, 67108819, 67108777, 67108763)


class SingularMatrixError(ArithmeticError):
    pass


def integerize(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[int]], int]:
    """Scale a rational matrix to an integer one; return (matrix, scale)."""
    den = 1
    for row in rows:
        for v in row:
            if v:
                den = lcm(den, Fraction(v).denominator)
    out = [[int(Fraction(v) * den) for v in row] for row in rows]
    return out, den


def solve_bareiss(a: Sequence[Sequence[int]], b: Sequence[int]) -> list[Fraction]:
    """Solve ``a x = b`` exactly by fraction-free elimination.

    Pivots are the first nonzero entry at or below the diagonal, so the
    elimination order is deterministic.
    """
    n = len(a)
    m = [list(map(int, row)) + [int(bi)] for row, bi in zip(a, b)]
    prev = 1
    for k in range(n):
        piv = next((r for r in range(k, n) if m[r][k] != 0), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
        mk = m[k]
        akk = mk[k]
        for r in range(k + 1, n):
            mr = m[r]
            ark = mr[k]
            if ark == 0:
                if akk != prev:
                    for c in range(k + 1, n + 1):
                        mr[c] = mr[c] * akk // prev
                mr[k] = 0
                continue
            for c in range(k + 1, n + 1):
                mr[c] = (mr[c] * akk - ark * mk[c]) // prev
            mr[k] = 0
        prev = akk
    x = [Fraction(0)] * n
    for k in range(n - 1, -1, -1):
        s = Fraction(m[k][n])
        for c in range(k + 1, n):
            if m[k][c]:
                s -= m[k][c] * x[c]
        x[k] = s / m[k][k]
    return x


def _lu_mod(a: np.ndarray, p: int):
    """LU factorization with row pivoting modulo p.  Returns (lu, perm)."""
    n = a.shape[0]
    lu = a % p
    perm = np.arange(n)
    for k in range(n):
        nz = np.flatnonzero(lu[k:, k])
        if nz.size == 0:
            raise SingularMatrixError(f"singular modulo {p}")
        piv = k + int(nz[0])
        if piv != k:
            lu[[k, piv]] = lu[[piv, k]]
            perm[[k, piv]] = perm[[piv, k]]
        inv = pow(int(lu[k, k]), -1, p)
        if k + 1 < n:
            col = (lu[k + 1:, k] * inv) % p
            lu[k + 1:, k] = col
            nzr = np.flatnonzero(col)
            if nzr.size:
                rows = k + 1 + nzr
                lu[rows, k + 1:] = (lu[rows, k + 1:] - np.outer(col[nzr], lu[k, k + 1:]) % p) % p
    return lu, perm


def _lu_solve_mod(lu: np.ndarray, perm: np.ndarray, diag_inv: np.ndarray, r: np.ndarray, p: int) -> np.ndarray:
    n = lu.shape[0]
    y = r[perm] % p
    for k in range(1, n):
        y[k] = (y[k] - int(lu[k, :k] @ y[:k]) % p) % p
    x = np.zeros(n, dtype=np.int64)
    for k in range(n - 1, -1, -1):
        s = (y[k] - int(lu[k, k + 1:] @ x[k + 1:]) % p) % p
        x[k] = (s * diag_inv[k]) % p
    return x


def rational_reconstruct(x: int, mod: int) -> Fraction | None:
    """Return a/b with a = b x (mod ``mod``) and |a|, b <= sqrt(mod/2), if any."""
    bound = isqrt(mod // 2)
    r0, r1 = mod, x % mod
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    if gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


def _reconstruct_vector(xs: list[int], mod: int) -> list[Fraction] | None:
    out = []
    den = 1
    for x in xs:
        f = rational_reconstruct(x * den % mod, mod)
        if f is None:
            return None
        out.append(f / den)
        den *= f.denominator
    return out


def _check(a: Sequence[Sequence[int]], b: Sequence[int], x: Sequence[Fraction]) -> bool:
    den = 1
    for v in x:
        den = lcm(den, v.denominator)
    xi = [int(v * den) for v in x]
    for row, bi in zip(a, b):
        if sum(c * v for c, v in zip(row, xi) if c) != bi * den:
            return False
    return True


def solve_dixon(a: Sequence[Sequence[int]], b: Sequence[int], max_steps: int = 4096) -> list[Fraction]:
    """Solve ``a x = b`` exactly for a nonsingular integer matrix.

    The matrix is factored modulo one prime; the solution is lifted
    p-adically and rebuilt with rational reconstruction whenever the
    modulus has doubled in size.  The returned vector always satisfies
    ``a x = b`` exactly.
    """
    n = len(a)
    if n > 2048:
        raise OverflowError("system too large for int64 residue arithmetic")
    am = np.array(a, dtype=object)
    amax = max((abs(int(v)) for row in a for v in row), default=0)
    if amax * n >= 2 ** 36:
        raise OverflowError("matrix entries too large for word-sized lifting")
    a64 = am.astype(np.int64)
    for p in _PRIMES:
        try:
            lu, perm = _lu_mod(a64.copy(), p)
            break
        except SingularMatrixError:
            continue
    else:
        raise SingularMatrixError("matrix singular modulo every trial prime")
    diag_inv = np.array([pow(int(v), -1, p) for v in np.diag(lu)], dtype=np.int64)

    r = [int(v) for v in b]
    digits: list[np.ndarray] = []
    next_check = 8
    step = 0
    while step < max_steps:
        # r may hold big integers; residues first, then lift.
        rm = np.array([v % p for v in r], dtype=np.int64)
        d = _lu_solve_mod(lu, perm, diag_inv, rm, p)
        digits.append(d)
        ad = a64 @ d
        r = [(ri - int(v)) // p for ri, v in zip(r, ad)]
        step += 1
        if step == next_check or all(v == 0 for v in r):
            mod = p ** step
            xs = [0] * n
            for dig in reversed(digits):
                xs = [x * p + int(v) for x, v in zip(xs, dig)]
            if all(v == 0 for v in r):
                sol = [Fraction(v) for v in xs]
                if _check(a, b, sol):
                    return sol
            sol = _reconstruct_vector(xs, mod)
            if sol is not None and _check(a, b, sol):
                return sol
            next_check *= 2
    raise ArithmeticError("p-adic lifting did not converge")


def solve_integer(a: Sequence[Sequence[int]], b: Sequence[int], method: str = "auto") -> list[Fraction]:
    """Solve an integer system exactly.

    ``method`` is ``"bareiss"``, ``"dixon"`` or ``"auto"`` (Bareiss for
    small systems, Dixon otherwise).
    """
    if method == "auto":
        method = "bareiss" if len(a) <= 48 else "dixon"
    if method == "bareiss":
        return solve_bareiss(a, b)
    if method == "dixon":
        return solve_dixon(a, b)
    raise ValueError(f"unknown method {method!r}")


def solve_exact(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction], method: str = "auto") -> list[Fraction]:
    """Solve a rational linear system exactly."""
    rows = [list(row) + [bi] for row, bi in zip(a, b)]
    ints, _ = integerize(rows)
    return solve_integer([row[:-1] for row in ints], [row[-1] for row in ints], method)
