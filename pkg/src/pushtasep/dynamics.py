"""Multispecies PushTASEP on a ring: transitions, generator, exact solve."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Callable, Hashable, Iterable, Sequence

from .linalg import solve_integer
from .states import (
    DEFAULT_CAP,
    ColorMap,
    Configuration,
    Content,
    check_beta,
    enumerate_configurations,
    recolor,
)


class ReducibleChainError(RuntimeError):
    pass


def cascade_moves(config: Sequence[int], site: int) -> list[tuple[int, int, int]]:
    """Moves ``(origin, destination, species)`` triggered by a bell at ``site``.

    The carried particle travels clockwise to the first strictly weaker
    occupant, which is displaced in turn, until a vacancy absorbs it.
    Every particle in the cascade moves at once; the list is in cascade
    order.  A bell at a vacancy gives no moves.
    """
    L = len(config)
    carried = config[site]
    if carried == 0:
        return []
    moves = []
    origin = pos = site
    while True:
        pos += 1
        if pos == L:
            pos = 0
        occupant = config[pos]
        if pos == site:
            # The bell site has been vacated by the first mover.
            occupant = 0
        if occupant < carried:
            moves.append((origin, pos, carried))
            if occupant == 0:
                return moves
            carried = occupant
            origin = pos


def apply_bell(config: Sequence[int], site: int) -> Configuration:
    """State after a bell rings at 0-based ``site``."""
    c = list(config)
    carried = c[site]
    if carried == 0:
        return tuple(c)
    L = len(c)
    c[site] = 0
    pos = site
    while True:
        pos += 1
        if pos == L:
            pos = 0
        if c[pos] < carried:
            c[pos], carried = carried, c[pos]
            if carried == 0:
                return tuple(c)


@dataclass
class GeneratorMatrix:
    """Sparse continuous-time generator.

    ``rates[u]`` maps target index to the total rate u -> v (off-diagonal
    only); the diagonal is minus the row sum.
    """

    states: list
    rates: list[dict[int, object]]
    index: dict = field(repr=False, default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {s: i for i, s in enumerate(self.states)}

    def __len__(self) -> int:
        return len(self.states)

    def exit_rate(self, u: int):
        return sum(self.rates[u].values(), Fraction(0))

    def rate(self, u: int, v: int):
        return self.rates[u].get(v, 0)

    def row_sums(self) -> list:
        """Row sums including the diagonal; zero for a valid generator."""
        return [sum(r.values(), Fraction(0)) - self.exit_rate(u) for u, r in enumerate(self.rates)]

    def is_irreducible(self) -> bool:
        """Strong connectivity via forward and backward reachability from state 0."""
        n = len(self.states)
        if n <= 1:
            return True
        fwd = [[] for _ in range(n)]
        bwd = [[] for _ in range(n)]
        for u, r in enumerate(self.rates):
            for v in r:
                fwd[u].append(v)
                bwd[v].append(u)

        def reach(adj):
            seen = [False] * n
            seen[0] = True
            stack = [0]
            while stack:
                u = stack.pop()
                for v in adj[u]:
                    if not seen[v]:
                        seen[v] = True
                        stack.append(v)
            return all(seen)

        return reach(fwd) and reach(bwd)

    def to_dense(self):
        import numpy as np

        n = len(self.states)
        q = np.zeros((n, n))
        for u, r in enumerate(self.rates):
            for v, x in r.items():
                q[u, v] += float(x)
            q[u, u] -= float(self.exit_rate(u))
        return q

    def left_multiply(self, pi: Sequence) -> list:
        """Row vector ``pi Q``."""
        out = [Fraction(0)] * len(self.states)
        for u, r in enumerate(self.rates):
            pu = pi[u]
            if not pu:
                continue
            total = 0
            for v, x in r.items():
                out[v] += pu * x
                total += x
            out[u] -= pu * total
        return out


@dataclass
class DistributionTable:
    states: list
    probabilities: list

    def as_dict(self) -> dict:
        return dict(zip(self.states, self.probabilities))

    def __getitem__(self, state):
        return self.as_dict()[state]

    def total(self):
        return sum(self.probabilities, Fraction(0))

    def event(self, pred: Callable[[Hashable], bool]):
        """Probability of the set of states satisfying ``pred``."""
        return sum((p for s, p in zip(self.states, self.probabilities) if pred(s)), Fraction(0))

    def pushforward(self, fn: Callable[[Hashable], Hashable]) -> "DistributionTable":
        acc: dict = {}
        for s, p in zip(self.states, self.probabilities):
            k = fn(s)
            acc[k] = acc.get(k, 0) + p
        keys = sorted(acc)
        return DistributionTable(keys, [acc[k] for k in keys])


def total_variation(p: DistributionTable, q: DistributionTable) -> float:
    pd, qd = p.as_dict(), q.as_dict()
    keys = set(pd) | set(qd)
    return 0.5 * sum(abs(float(pd.get(k, 0)) - float(qd.get(k, 0))) for k in keys)


def build_chain(
    states: Sequence,
    step: Callable[[Hashable, int], Hashable],
    beta: Sequence,
) -> GeneratorMatrix:
    """Generator of a bell-driven chain: bell j rings at rate 1/beta_j and
    maps state u to ``step(u, j)``.  Bells leaving u fixed contribute nothing;
    distinct bells with a common target are summed.
    """
    states = list(states)
    index = {s: i for i, s in enumerate(states)}
    bell_rates = [_inverse(b) for b in beta]
    rates: list[dict[int, object]] = []
    for u in states:
        row: dict[int, object] = {}
        for j, r in enumerate(bell_rates):
            v = step(u, j)
            if v == u:
                continue
            k = index[v]
            row[k] = row.get(k, 0) + r
        rates.append(row)
    return GeneratorMatrix(states, rates, index)


def _inverse(b):
    return 1 / b if isinstance(b, float) else 1 / Fraction(b)


def build_generator(content: Content, beta: Sequence, cap: int = DEFAULT_CAP) -> GeneratorMatrix:
    beta = check_beta(beta, content.L)
    return build_chain(enumerate_configurations(content, cap), apply_bell, beta)


def exact_stationary(gen: GeneratorMatrix, method: str = "auto") -> DistributionTable:
    """Unique probability vector with ``pi Q = 0``, in exact rationals.

    Solves ``Q^T pi = 0`` with the last equation replaced by the
    normalization ``sum(pi) = 1``.
    """
    if not gen.is_irreducible():
        raise ReducibleChainError("generator is not irreducible; stationary law is not unique")
    n = len(gen)
    if n == 1:
        return DistributionTable(list(gen.states), [Fraction(1)])
    scale = 1
    for r in gen.rates:
        for x in r.values():
            scale = lcm(scale, Fraction(x).denominator)
    rows = [[0] * n for _ in range(n)]
    for u, r in enumerate(gen.rates):
        for v, x in r.items():
            k = int(Fraction(x) * scale)
            rows[v][u] += k
            rows[u][u] -= k
    rows[-1] = [1] * n
    rhs = [0] * (n - 1) + [1]
    pi = solve_integer(rows, rhs, method=method)
    return DistributionTable(list(gen.states), pi)


def stationary_distribution(content: Content, beta: Sequence, method: str = "auto") -> DistributionTable:
    return exact_stationary(build_generator(content, beta), method=method)


def check_lumping(content: Content, phi: ColorMap, beta: Sequence, stationary: bool = True) -> bool:
    """Recolouring commutes with every bell, and the pushforward of the
    stationary law is the stationary law of the recoloured chain.
    """
    states = enumerate_configurations(content)
    L = content.L
    for u in states:
        pu = recolor(phi, u)
        for j in range(L):
            if recolor(phi, apply_bell(u, j)) != apply_bell(pu, j):
                return False
    if not stationary:
        return True
    beta = check_beta(beta, L)
    pi = exact_stationary(build_chain(states, apply_bell, beta))
    image = phi.image(content)
    pushed = pi.pushforward(lambda s: recolor(phi, s))
    coarse = exact_stationary(build_generator(image, beta))
    return pushed.as_dict() == coarse.as_dict()


def time_reversal(gen: GeneratorMatrix, pi: Sequence) -> GeneratorMatrix:
    """Rates ``r*(s, s') = pi(s') r(s', s) / pi(s)``."""
    rates: list[dict[int, object]] = [dict() for _ in gen.states]
    for u, r in enumerate(gen.rates):
        for v, x in r.items():
            rates[v][u] = rates[v].get(u, 0) + pi[u] * x / pi[v]
    return GeneratorMatrix(list(gen.states), rates, dict(gen.index))


def check_reversal_conditions(gen: GeneratorMatrix, candidate_pi: Sequence, reverse_gen: GeneratorMatrix) -> bool:
    """Pairwise balance ``pi(s) r*(s,s') = pi(s') r(s',s)`` for all pairs and
    equal total exit rates per state.  Together these make ``candidate_pi``
    stationary for ``gen``.
    """
    if list(gen.states) != list(reverse_gen.states):
        raise ValueError("generators are over different state spaces")
    pi = list(candidate_pi)
    for u in range(len(gen)):
        if gen.exit_rate(u) != reverse_gen.exit_rate(u):
            return False
    pairs = set()
    for u, r in enumerate(gen.rates):
        pairs.update((v, u) for v in r)
    for u, r in enumerate(reverse_gen.rates):
        pairs.update((u, v) for v in r)
    for s, t in pairs:
        if pi[s] * reverse_gen.rate(s, t) != pi[t] * gen.rate(t, s):
            return False
    return True


def marginal(dist: DistributionTable, sites: Iterable[int]) -> dict:
    sites = tuple(sites)
    return dist.pushforward(lambda c: tuple(c[i] for i in sites)).as_dict()


def numeric_stationary(gen: GeneratorMatrix) -> DistributionTable:
    """Floating-point stationary law by least squares on ``[Q^T; 1] pi = e``."""
    import numpy as np

    if not gen.is_irreducible():
        raise ReducibleChainError("generator is not irreducible; stationary law is not unique")
    n = len(gen)
    a = np.vstack([gen.to_dense().T, np.ones((1, n))])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(a, b, rcond=None)
    return DistributionTable(list(gen.states), pi.tolist())
