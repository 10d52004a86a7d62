"""Closed-form stationary observables and their exact counterparts.

Formulas are evaluated at site 1 (and 2); other sites follow by rotating
the rate vector.  Each closed form has an ``exact_*`` counterpart computed
from a stationary distribution so the two can be compared.

Schur shapes are written ``s2(a, b, xs)`` for s_<1^b, 2^a>(xs), i.e. ``a``
rows of length two above ``b`` rows of length one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .dynamics import DistributionTable, cascade_moves, stationary_distribution
from .states import Content, check_beta
from .symmetric import determinant, elementary, elementary_mu, s2


@dataclass
class CorrelationReport:
    formula_value: object
    exact_value: object
    mc_value: float | None = None
    mc_stderr: float | None = None

    @property
    def agrees(self) -> bool:
        return self.formula_value == self.exact_value


def _without(beta: Sequence, j: int) -> list:
    return [b for i, b in enumerate(beta) if i != j]


# -- single species ---------------------------------------------------------

def single_species_weight(config: Sequence[int], beta: Sequence):
    """Stationary probability of a 0/1 configuration: prod of beta over
    occupied sites divided by e_{n_1}(beta)."""
    num = Fraction(1)
    for v, b in zip(config, beta):
        if v:
            num *= b
    return num / elementary(sum(1 for v in config if v), beta)


def density_single(n1: int, beta: Sequence, site: int = 0):
    """Density at 0-based ``site`` with n1 particles."""
    beta = check_beta(beta)
    return beta[site] * elementary(n1 - 1, _without(beta, site)) / elementary(n1, beta)


def current_single(n1: int, beta: Sequence):
    beta = check_beta(beta)
    return elementary(n1 - 1, beta) / elementary(n1, beta)


def current_defining_sum(n1: int, beta: Sequence, dist: DistributionTable):
    """J = sum_{j > n_0} (1/beta_j) <eta_j ... eta_L>: a bell at j with the
    whole stretch j..L occupied pushes a particle across bond (L, 1)."""
    L = len(beta)
    n0 = L - n1
    total = Fraction(0)
    for j in range(n0, L):
        p = dist.event(lambda c, j=j: all(c[k] for k in range(j, L)))
        total += p / beta[j]
    return total


# -- multispecies density and current ---------------------------------------

def density_multi(content: Content, beta: Sequence, species: int):
    """Probability that site 1 holds ``species`` (0 for a vacancy)."""
    beta = check_beta(beta, content.L)
    if species == 0:
        return 1 - sum(density_multi(content, beta, i) for i in range(1, content.s + 1))
    n_i = content.n(species)
    if n_i == 0:
        return Fraction(0)
    big, small = content.N(species), content.N(species + 1)
    return beta[0] * s2(small, n_i - 1, beta[1:]) / elementary_mu((big, small), beta)


def density_by_colouring(content: Content, beta: Sequence, species: int):
    """Difference of single-species densities at thresholds i and i+1."""
    big, small = content.N(species), content.N(species + 1)
    out = density_single(big, beta, 0)
    if small:
        out -= density_single(small, beta, 0)
    return out


def current_multi(content: Content, beta: Sequence, species: int):
    """Stationary rate at which species-``species`` particles cross a bond."""
    beta = check_beta(beta, content.L)
    n_i = content.n(species)
    if n_i == 0:
        return Fraction(0)
    big, small = content.N(species), content.N(species + 1)
    return s2(small, n_i - 1, beta) / elementary_mu((big, small), beta)


def current_by_colouring(content: Content, beta: Sequence, species: int):
    big, small = content.N(species), content.N(species + 1)
    out = current_single(big, beta)
    if small:
        out -= current_single(small, beta)
    return out


def exact_density(dist: DistributionTable, species: int, site: int = 0):
    return dist.event(lambda c: c[site] == species)


def exact_current(dist: DistributionTable, beta: Sequence, species: int, bond: int | None = None):
    """Expected species-``species`` crossings per unit time of bond
    (bond, bond+1) (0-based; default is the bond (L, 1))."""
    L = len(beta)
    if bond is None:
        bond = L - 1
    total = Fraction(0)
    for c, p in zip(dist.states, dist.probabilities):
        if not p:
            continue
        for j in range(L):
            for o, d, sp in cascade_moves(c, j):
                if sp == species and (bond - o) % L < (d - o) % L:
                    total += p / beta[j]
    return total


# -- three-species building blocks -------------------------------------------

def three_species_content(s_count: int, t_count: int, L: int) -> Content:
    """``s_count`` particles of species 2, ``t_count`` of species 1, rest vacant."""
    return Content((L - s_count - t_count, t_count, s_count))


def three_species_T(s_count: int, t_count: int, beta: Sequence, which: int):
    """Nearest-neighbour probabilities for ``t_count`` species-1 and
    ``s_count`` species-2 particles on L sites.

    ``which=1``: vacancy at site 1 and a 1 at site 2.
    ``which=2``: a 1 at site 1 and a vacancy at site 2.
    """
    beta = check_beta(beta)
    L = len(beta)
    s, t = s_count, t_count
    if not (s > 0 and t > 0 and s + t < L):
        raise ValueError("need s, t > 0 and s + t < L")
    rest = beta[2:]
    den = elementary_mu((s + t, s), beta)
    first = s2(s, t - 1, rest)
    if which == 1:
        return beta[1] * first / den
    if which == 2:
        return (beta[0] * first + beta[0] * beta[1] * s2(s - 1, t, rest)) / den
    raise ValueError("which must be 1 or 2")


# -- two-point function for one particle of each species ---------------------

def _tail(m: int, a: int, xs: Sequence):
    """s_(2^m, a)(xs) for a in {0, 1, 2}; m may be -1."""
    if a == 2:
        return s2(m + 1, 0, xs)
    if a == 1:
        return s2(m, 1, xs)
    return s2(m, 0, xs)


def f_poly(j: int, i: int, beta: Sequence):
    L = len(beta)
    b1, b2 = beta[0], beta[1]
    r = beta[2:]
    return determinant([
        [Fraction(1), s2(L - j - 2, 0, r), s2(L - i - 2, 0, r)],
        [-b1 - b2, s2(L - j - 2, 1, r), s2(L - i - 2, 1, r)],
        [b1 * b2, s2(L - j - 1, 0, r), s2(L - i - 1, 0, r)],
    ])


def g_poly(j: int, i: int, beta: Sequence):
    L = len(beta)
    b1, b2 = beta[0], beta[1]
    r = beta[2:]
    ti = [_tail(L - i - 2, a, r) for a in range(3)]
    tj = [_tail(L - j - 2, b, r) for b in range(3)]
    total = 0
    for a in range(3):
        for b in range(3):
            if ti[a] and tj[b]:
                total += b1 ** (3 - a) * b2 ** (3 - b) * ti[a] * tj[b]
    return total


def two_point(j: int, i: int, beta: Sequence):
    """P(species j at site 1, species i at site 2) for content (L-1, ..., 1, 0)."""
    beta = check_beta(beta)
    L = len(beta)
    if not (0 <= i < L and 0 <= j < L):
        raise ValueError("species labels run from 0 to L-1")
    if j == i:
        return Fraction(0)
    if j < i:
        return beta[0] * beta[1] ** 2 * f_poly(j, i, beta) / elementary_mu(
            (L - j, L - j - 1, L - i, L - i - 1), beta)
    r = beta[2:]
    g = g_poly(j, i, beta) / elementary_mu((L - i, L - i - 1, L - j, L - j - 1), beta)
    if j == i + 1:
        g += beta[0] * beta[1] * s2(L - j - 1, 0, r) / elementary_mu((L - j, L - j), beta)
    return g


def two_point_matrix(beta: Sequence) -> list[list]:
    L = len(beta)
    return [[two_point(j, i, beta) for i in range(L)] for j in range(L)]


def exact_pair(dist: DistributionTable, first: int, second: int, sites=(0, 1)):
    a, b = sites
    return dist.event(lambda c: c[a] == first and c[b] == second)


def exact_pair_matrix(dist: DistributionTable, L: int) -> list[list]:
    acc: dict[tuple[int, int], Fraction] = {}
    for c, p in zip(dist.states, dist.probabilities):
        key = (c[0], c[1])
        acc[key] = acc.get(key, 0) + p
    return [[acc.get((j, i), Fraction(0)) for i in range(L)] for j in range(L)]


def full_content(L: int) -> Content:
    """One particle of each species 1..L-1 and one vacancy."""
    return Content((1,) * L)


def correlation_reports(beta: Sequence, dist: DistributionTable | None = None) -> list[list[CorrelationReport]]:
    L = len(beta)
    if dist is None:
        dist = stationary_distribution(full_content(L), beta)
    exact = exact_pair_matrix(dist, L)
    return [[CorrelationReport(two_point(j, i, beta), exact[j][i]) for i in range(L)] for j in range(L)]


def rotate(beta: Sequence, k: int) -> list:
    """Rates seen from site k+1: (beta_{k+1}, ..., beta_L, beta_1, ..., beta_k)."""
    beta = list(beta)
    return beta[k:] + beta[:k]


def site_density(content: Content, beta: Sequence, species: int, site: int):
    return density_multi(content, rotate(beta, site), species)


def densities_table(content: Content, beta: Sequence) -> Mapping[tuple[int, int], object]:
    """{(site, species): density} from the closed form, 0-based sites."""
    return {(j, i): site_density(content, beta, i, j)
            for j in range(content.L) for i in range(content.s + 1)}
