"""Event-driven simulation of the PushTASEP and the interchange coupling.

Random numbers come from numpy's counter-based Philox generator.  Replica
``i`` of a run seeded with ``seed`` uses the i-th child of
``SeedSequence(seed)``; runs are bitwise reproducible for a fixed seed and
numpy version.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from typing import IO, Iterable, NamedTuple, Sequence

import numpy as np

from .dynamics import DistributionTable, cascade_moves
from .states import Configuration, Content, check_beta, check_config

_CHUNK = 8192


class Event(NamedTuple):
    time: float
    site: int  # 0-based
    config: Configuration


@dataclass
class Trajectory:
    initial: Configuration
    events: list[Event]
    horizon: float

    def configs(self) -> Iterable[tuple[float, float, Configuration]]:
        """Yield (start, end, config) holding intervals over [0, horizon]."""
        t, c = 0.0, self.initial
        for ev in self.events:
            yield t, ev.time, c
            t, c = ev.time, ev.config
        yield t, self.horizon, c

    def final(self) -> Configuration:
        return self.events[-1].config if self.events else self.initial

    def write_jsonl(self, fh: IO[str]) -> None:
        """One JSON object per event: time, 1-based site, configuration."""
        for ev in self.events:
            fh.write(json.dumps({"t": ev.time, "site": ev.site + 1, "config": list(ev.config)}) + "\n")


@dataclass
class FluxProcess:
    bond: tuple[int, int]  # 1-based (j, j+1)
    times: list[float] = field(default_factory=list)


@dataclass
class MarkedPointProcess:
    times: list[float]
    marks: list[str]

    def __post_init__(self):
        if len(self.times) != len(self.marks):
            raise ValueError("times and marks differ in length")
        if any(m not in ("a", "b") for m in self.marks):
            raise ValueError("marks must be 'a' or 'b'")

    @classmethod
    def superpose(cls, a_times: Sequence[float], b_times: Sequence[float]) -> "MarkedPointProcess":
        pts = sorted([(t, "a") for t in a_times] + [(t, "b") for t in b_times])
        return cls([t for t, _ in pts], [m for _, m in pts])

    def split(self) -> tuple[list[float], list[float]]:
        a = [t for t, m in zip(self.times, self.marks) if m == "a"]
        b = [t for t, m in zip(self.times, self.marks) if m == "b"]
        return a, b


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.Philox(seed))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def replica_streams(seed: int, count: int, offset: int = 0) -> list[np.random.SeedSequence]:
    """Child seed sequences ``offset .. offset+count-1`` of ``seed``."""
    children = np.random.SeedSequence(int(seed)).spawn(offset + count)
    return children[offset:]


def simulate(
    content: Content,
    beta: Sequence,
    initial: Sequence[int],
    horizon: float,
    seed,
    keep_vacancy_bells: bool = False,
) -> Trajectory:
    """Exact continuous-time run on [0, horizon].

    Bells are drawn from the superposed clock of total rate sum(1/beta_j);
    waiting times by inverse CDF and the bell site by binary search in the
    cumulative rates.  Bells at vacancies are consumed from the stream either
    way and only recorded when ``keep_vacancy_bells`` is set.
    """
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    beta = check_beta(beta, content.L)
    initial = check_config(content, initial)
    rates = np.array([1.0 / float(b) for b in beta])
    cum = np.cumsum(rates)
    total = float(cum[-1])
    L = len(initial)
    rng = make_rng(seed)

    c = list(initial)
    events: list[Event] = []
    append = events.append
    t = 0.0
    while True:
        u = rng.random(_CHUNK)
        v = rng.random(_CHUNK)
        waits = (-np.log1p(-u) / total).tolist()
        sites = np.minimum(np.searchsorted(cum, v * total, side="right"), L - 1).tolist()
        for w, j in zip(waits, sites):
            t += w
            if t > horizon:
                return Trajectory(initial, events, float(horizon))
            carried = c[j]
            if carried == 0:
                if keep_vacancy_bells:
                    append(Event(t, j, tuple(c)))
                continue
            c[j] = 0
            pos = j
            while True:
                pos += 1
                if pos == L:
                    pos = 0
                if c[pos] < carried:
                    c[pos], carried = carried, c[pos]
                    if carried == 0:
                        break
            append(Event(t, j, tuple(c)))


def empirical_distribution(traj: Trajectory, burn_in: float = 0.0) -> DistributionTable:
    """Time-weighted occupation fractions over [burn_in, horizon]."""
    if not burn_in < traj.horizon:
        raise ValueError("burn-in must be shorter than the horizon")
    acc: dict[Configuration, float] = {}
    for a, b, c in traj.configs():
        lo = max(a, burn_in)
        if b > lo:
            acc[c] = acc.get(c, 0.0) + (b - lo)
    span = traj.horizon - burn_in
    keys = sorted(acc)
    return DistributionTable(keys, [acc[k] / span for k in keys])


def occupation_times(traj: Trajectory, sites: Sequence[int], s: int) -> np.ndarray:
    """Array [site, species] of time spent; 0-based sites."""
    out = np.zeros((len(sites), s + 1))
    for a, b, c in traj.configs():
        for k, j in enumerate(sites):
            out[k, c[j]] += b - a
    return out


def _crosses(o: int, d: int, bond: int, L: int) -> bool:
    return (bond - o) % L < (d - o) % L


def extract_flux(traj: Trajectory, bond: int, min_species: int = 1) -> FluxProcess:
    """Times at which a particle of species >= ``min_species`` crosses the
    0-based bond (bond, bond+1) clockwise.  Each time is listed once even
    when several moves of the cascade cross.
    """
    L = len(traj.initial)
    if not 0 <= bond < L:
        raise ValueError(f"bond index {bond} out of range")
    times = []
    prev = traj.initial
    for ev in traj.events:
        for o, d, sp in cascade_moves(prev, ev.site):
            if sp >= min_species and _crosses(o, d, bond, L):
                times.append(ev.time)
                break
        prev = ev.config
    return FluxProcess((bond + 1, (bond + 1) % L + 1), times)


def interchange_marks(mpp: MarkedPointProcess) -> MarkedPointProcess:
    """Keep every ``ab`` motif; rewrite each word b^x a^y between motifs as
    b^y a^x.  Times are unchanged.
    """
    m = mpp.marks
    n = len(m)
    out: list[str] = []
    nb = na = 0

    def flush():
        out.extend("b" * na)
        out.extend("a" * nb)

    i = 0
    while i < n:
        if m[i] == "a" and i + 1 < n and m[i + 1] == "b":
            flush()
            nb = na = 0
            out.extend(("a", "b"))
            i += 2
            continue
        if m[i] == "b":
            # Inside a motif-free word every b precedes every a.
            assert na == 0
            nb += 1
        else:
            na += 1
        i += 1
    flush()
    return MarkedPointProcess(list(mpp.times), out)


def motif_positions(marks: Sequence[str]) -> list[int]:
    return [i for i in range(len(marks) - 1) if marks[i] == "a" and marks[i + 1] == "b"]


class ExcludedStartError(ValueError):
    pass


EXCLUDED_START_REASON = (
    "start (0, 1) is excluded: rewriting an idle mark at the empty site j into a "
    "mark at j+1 ejects the particle there, so the coupled outputs can differ"
)


@dataclass
class TwoStationRun:
    outputs: list[float]
    trace: list[tuple[float, str, int]]  # (time, kind, particles in {j, j+1} after)


def two_station_run(
    inputs: Sequence[float],
    a_times: Sequence[float],
    b_times: Sequence[float],
    eta01: tuple[int, int],
    allow_excluded: bool = False,
) -> TwoStationRun:
    """Sites j, j+1 in isolation, fed by input flux ``inputs``.

    A transfer that would land right of j+1 leaves the pair immediately and
    is an output point.  Simultaneous points are processed inputs first,
    then bells at j, then bells at j+1.
    """
    eta01 = tuple(int(v) for v in eta01)
    if eta01 not in ((0, 0), (1, 0), (1, 1), (0, 1)):
        raise ValueError(f"occupancies must be 0/1, got {eta01}")
    if eta01 == (0, 1) and not allow_excluded:
        raise ExcludedStartError(EXCLUDED_START_REASON)
    pts = sorted([(t, 0) for t in inputs] + [(t, 1) for t in a_times] + [(t, 2) for t in b_times])
    x, y = eta01
    out: list[float] = []
    trace = []
    for t, kind in pts:
        if kind == 0:
            if not x:
                x = 1
            elif not y:
                y = 1
            else:
                out.append(t)
        elif kind == 1:
            if x:
                x = 0
                if not y:
                    y = 1
                else:
                    out.append(t)
        else:
            if y:
                y = 0
                out.append(t)
        trace.append((t, "LAB"[kind], x + y))
    return TwoStationRun(out, trace)


def two_station_output(inputs, a_times, b_times, eta01) -> list[float]:
    return two_station_run(inputs, a_times, b_times, eta01).outputs


def poisson_times(rng: np.random.Generator, rate: float, horizon: float) -> list[float]:
    if rate <= 0:
        return []
    n = rng.poisson(rate * horizon)
    return sorted(rng.uniform(0.0, horizon, n).tolist())


@dataclass
class InterchangeInstance:
    inputs: list[float]
    a_times: list[float]
    b_times: list[float]
    eta01: tuple[int, int]
    alpha: float
    alpha_prime: float


def random_instance(rng: np.random.Generator, horizon: float = 10.0) -> InterchangeInstance:
    """Random rates, a random input process (Poisson, periodic or bursty) and
    a random admissible start."""
    alpha, alpha_p = rng.uniform(0.2, 3.0, 2).tolist()
    kind = int(rng.integers(3))
    if kind == 0:
        inputs = poisson_times(rng, float(rng.uniform(0.1, 3.0)), horizon)
    elif kind == 1:
        gap = float(rng.uniform(0.2, 2.0))
        inputs = np.arange(float(rng.uniform(0, gap)), horizon, gap).tolist()
    else:
        centres = poisson_times(rng, 0.5, horizon)
        inputs = sorted(c + float(rng.uniform(0, 0.3)) for c in centres for _ in range(int(rng.integers(1, 4))))
    starts = ((0, 0), (1, 0), (1, 1))
    eta = starts[int(rng.integers(3))]
    return InterchangeInstance(
        inputs, poisson_times(rng, alpha, horizon), poisson_times(rng, alpha_p, horizon), eta, alpha, alpha_p
    )


def coupled_outputs(inst: InterchangeInstance, allow_excluded: bool = False) -> tuple[list[float], list[float]]:
    """Output of the original pair and of the mark-rewritten pair."""
    mpp = MarkedPointProcess.superpose(inst.a_times, inst.b_times)
    a2, b2 = interchange_marks(mpp).split()
    r1 = two_station_run(inst.inputs, inst.a_times, inst.b_times, inst.eta01, allow_excluded).outputs
    r2 = two_station_run(inst.inputs, a2, b2, inst.eta01, allow_excluded).outputs
    return r1, r2


def interchange_harness(instances: int, seed: int, horizon: float = 10.0) -> dict:
    """Exact output equality under the mark coupling on random instances."""
    rng = make_rng(seed)
    failures = 0
    by_start = {"00": 0, "10": 0, "11": 0}
    swapped_order = 0
    for _ in range(instances):
        inst = random_instance(rng, horizon)
        r1, r2 = coupled_outputs(inst)
        if r1 != r2:
            failures += 1
        by_start["".join(map(str, inst.eta01))] += 1
        swapped_order += inst.alpha > inst.alpha_prime
    return {
        "instances": instances,
        "failures": failures,
        "by_start": by_start,
        "alpha_greater": int(swapped_order),
        "passed": failures == 0,
    }


# -- path statistics under permuted rates --------------------------------------

def permuted_beta(beta: Sequence, k: int, perm: Sequence[int]) -> list:
    """Apply ``perm`` (a permutation of the 1-based sites k+1..L) to beta."""
    beta = list(beta)
    L = len(beta)
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(k + 1, L + 1)):
        raise ValueError(f"{perm} is not a permutation of sites {k + 1}..{L}")
    out = beta[:k] + [beta[p - 1] for p in perm]
    return out


def check_ordered_tail(initial: Sequence[int], k: int) -> None:
    tail = list(initial[k:])
    if any(b > a for a, b in zip(tail, tail[1:])):
        raise ValueError(f"initial configuration must satisfy eta_(k+1) >= ... >= eta_L; tail is {tail}")


def path_statistics(traj: Trajectory, k: int, s: int) -> dict[str, float]:
    """Observables of the path restricted to sites 1..k."""
    sites = list(range(k))
    occ = occupation_times(traj, sites, s)
    stats = {f"occupation[site={j + 1},species={sp}]": float(occ[j, sp])
             for j in sites for sp in range(s + 1)}
    changes = 0
    prev = traj.initial[:k]
    for ev in traj.events:
        cur = ev.config[:k]
        if cur != prev:
            changes += 1
        prev = cur
    stats["window_changes"] = float(changes)
    if k >= 2:
        bond = k - 2
        for r in range(1, s + 1):
            stats[f"flux[bond=({k - 1},{k}),species>={r}]"] = float(len(extract_flux(traj, bond, r).times))
    return stats


def _replica(args) -> dict[str, float]:
    content, beta, initial, horizon, stream, k, control_site = args
    traj = simulate(content, beta, initial, horizon, stream)
    stats = path_statistics(traj, k, content.s)
    occ = occupation_times(traj, [control_site], content.s)
    stats["control"] = float(occ[0, 0])
    return stats


def _summarize(rows: list[dict[str, float]]) -> dict[str, tuple[float, float]]:
    keys = rows[0].keys()
    out = {}
    n = len(rows)
    for key in keys:
        x = np.array([r[key] for r in rows])
        se = float(x.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
        out[key] = (float(x.mean()), se)
    return out


def run_replicas(arglist: list, threads: int = 1) -> list[dict[str, float]]:
    if threads > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(_replica, arglist, chunksize=max(1, len(arglist) // (4 * threads))))
    return [_replica(a) for a in arglist]


def coupled_path_statistics(
    content: Content,
    beta: Sequence,
    initial: Sequence[int],
    k: int,
    perm: Sequence[int],
    horizon: float,
    seed: int,
    replicas: int,
    threads: int = 1,
    common_seed: bool = False,
    exact_check: bool = True,
) -> dict:
    """Compare path statistics on sites 1..k under beta and permuted beta.

    Each gated statistic passes when the two means agree within three
    combined standard errors.  ``control`` (vacancy occupation at the last
    site) is reported but not gated; it generally does depend on the
    permutation.
    """
    initial = check_config(content, initial)
    check_ordered_tail(initial, k)
    beta = check_beta(beta, content.L)
    beta2 = permuted_beta(beta, k, perm)
    control_site = content.L - 1
    s1 = replica_streams(seed, replicas)
    s2 = s1 if common_seed else replica_streams(seed, replicas, offset=replicas)
    rows1 = run_replicas([(content, beta, initial, horizon, st, k, control_site) for st in s1], threads)
    rows2 = run_replicas([(content, beta2, initial, horizon, st, k, control_site) for st in s2], threads)
    sum1, sum2 = _summarize(rows1), _summarize(rows2)
    checks = {}
    for key in sum1:
        (m1, e1), (m2, e2) = sum1[key], sum2[key]
        se = math.hypot(e1, e2)
        z = 0.0 if se == 0 else (m1 - m2) / se
        if se == 0 and m1 != m2:
            z = math.inf
        checks[key] = {"mean": m1, "se": e1, "mean_permuted": m2, "se_permuted": e2, "z": z,
                       "gated": key != "control", "passed": abs(z) <= 3.0}
    report = {
        "replicas": replicas,
        "horizon": horizon,
        "k": k,
        "beta": [str(b) for b in beta],
        "beta_permuted": [str(b) for b in beta2],
        "statistics": checks,
        "passed": all(c["passed"] for c in checks.values() if c["gated"]),
    }
    if exact_check:
        report["exact_marginal_equal"] = exact_marginal_invariance(content, beta, beta2, k)
        report["passed"] = report["passed"] and report["exact_marginal_equal"] is not False
    return report


def exact_marginal_invariance(content: Content, beta: Sequence, beta2: Sequence, k: int, cap: int = 5000):
    """Stationary law of sites 1..k under beta vs beta2 (None when too large)."""
    from fractions import Fraction

    from .dynamics import marginal, stationary_distribution

    if content.size() > cap:
        return None
    b1 = [Fraction(b) for b in beta]
    b2 = [Fraction(b) for b in beta2]
    m1 = marginal(stationary_distribution(content, b1), range(k))
    m2 = marginal(stationary_distribution(content, b2), range(k))
    return m1 == m2


def tv_to(table: DistributionTable, exact: DistributionTable) -> float:
    from .dynamics import total_variation

    return total_variation(table, exact)
