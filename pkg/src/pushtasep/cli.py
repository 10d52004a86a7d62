"""Command-line experiments: exact, simulate, observables, interchange.

Each command reads one JSON config, writes summary.json plus CSV tables to
the output directory and exits 0 only when every check passed.  Rates and
other numbers given as "p/q" strings or JSON integers are exact; any JSON
float switches the run to floating point.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import dynamics, montecarlo, multiline, observables
from .states import Content, EnumerationCapError, check_beta, format_config, parse_scalar

FLOAT_TOL = 1e-9


class UsageError(Exception):
    pass


# -- config handling -----------------------------------------------------------

def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    return cfg


def read_content(cfg: dict) -> Content:
    if "content" not in cfg:
        raise UsageError("config needs 'content' (species counts, vacancies first)")
    try:
        return Content(cfg["content"])
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def read_beta(cfg: dict, L: int) -> tuple[tuple, str]:
    raw = cfg.get("beta")
    if raw is None:
        raise UsageError("config needs 'beta'")
    try:
        beta = tuple(parse_scalar(b) for b in raw)
        check_beta(beta, L)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad beta: {exc}") from exc
    if any(isinstance(b, float) for b in beta):
        return tuple(float(b) for b in beta), "float"
    return beta, "exact"


def read_real(cfg: dict, key: str, default=None) -> float:
    if key not in cfg:
        if default is None:
            raise UsageError(f"config needs '{key}'")
        return default
    try:
        return float(parse_scalar(cfg[key]))
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad {key}: {exc}") from exc


def read_int(cfg: dict, key: str, default: int) -> int:
    v = cfg.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int):
        raise UsageError(f"'{key}' must be an integer")
    return v


def show(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return repr(float(x))


def close(a, b) -> bool:
    if isinstance(a, float) or isinstance(b, float):
        return math.isclose(float(a), float(b), rel_tol=FLOAT_TOL, abs_tol=FLOAT_TOL)
    return a == b


def check(passed: bool, **detail) -> dict:
    return {"passed": bool(passed), **detail}


def write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        w.writerows(rows)


def stationary(content: Content, beta, mode: str) -> dynamics.DistributionTable:
    gen = dynamics.build_generator(content, beta)
    return dynamics.exact_stationary(gen) if mode == "exact" else dynamics.numeric_stationary(gen)


# -- commands ------------------------------------------------------------------

def cmd_exact(cfg: dict, out: Path, seed: int, threads: int) -> dict:
    content = read_content(cfg)
    beta, mode = read_beta(cfg, content.L)
    dist = stationary(content, beta, mode)
    z = multiline.partition_function(content, beta)
    asep = multiline.asep_values(content, beta)
    rows, worst_ok = [], True
    for c, p in zip(dist.states, dist.probabilities):
        a = asep.get(c, 0)
        ok = close(p, a / z)
        worst_ok &= ok
        rows.append([format_config(c), show(a), show(p), repr(float(p)), "PASS" if ok else "FAIL"])
    write_csv(out / "stationary.csv", ["config", "asep_value", "stationary", "stationary_float", "status"], rows)
    checks = {"stationary_equals_diagram_sum": check(worst_ok, states=len(rows))}
    if multiline.diagram_count(content) <= read_int(cfg, "diagram_cap", 10**6):
        total = multiline.diagram_weight_sum(content, beta)
        checks["partition_function_factorization"] = check(close(total, z), diagram_sum=show(total))
    if content.s == 1:
        ok = all(close(p, observables.single_species_weight(c, beta)) for c, p in zip(dist.states, dist.probabilities))
        checks["single_species_closed_form"] = check(ok)
    return {"partition_function": show(z), "states": len(rows), "checks": checks}


def cmd_simulate(cfg: dict, out: Path, seed: int, threads: int) -> dict:
    content = read_content(cfg)
    beta, mode = read_beta(cfg, content.L)
    horizon = read_real(cfg, "horizon")
    burn_in = read_real(cfg, "burn_in", 0.0)
    replicas = read_int(cfg, "replicas", 1)
    tv_limit = read_real(cfg, "tv_threshold", 0.02)
    initial = tuple(cfg.get("initial", content.word()))
    exact_cap = read_int(cfg, "exact_cap", 5000)
    try:
        exact = stationary(content, beta, mode).as_dict() if content.size() <= exact_cap else None
    except EnumerationCapError:
        exact = None
    pooled: dict = {}
    per_replica = []
    for i, stream in enumerate(montecarlo.replica_streams(seed, replicas)):
        traj = montecarlo.simulate(content, beta, initial, horizon, stream)
        if cfg.get("trajectory", False):
            with open(out / f"trajectory_{i}.jsonl", "w", encoding="utf-8") as fh:
                traj.write_jsonl(fh)
        emp = montecarlo.empirical_distribution(traj, burn_in)
        for c, p in zip(emp.states, emp.probabilities):
            pooled[c] = pooled.get(c, 0.0) + p / replicas
        tv = dynamics.total_variation(emp, dynamics.DistributionTable(list(exact), list(exact.values()))) \
            if exact is not None else None
        per_replica.append([i, len(traj.events), "" if tv is None else repr(tv)])
    write_csv(out / "replicas.csv", ["replica", "events", "tv_to_exact"], per_replica)
    keys = sorted(set(pooled) | set(exact or {}))
    write_csv(out / "empirical.csv", ["config", "empirical", "exact_float"],
              [[format_config(c), repr(pooled.get(c, 0.0)), "" if exact is None else repr(float(exact.get(c, 0)))]
               for c in keys])
    checks = {"probabilities_sum_to_one": check(abs(sum(pooled.values()) - 1) < 1e-12)}
    summary: dict[str, Any] = {"replicas": replicas, "horizon": horizon, "burn_in": burn_in}
    if exact is not None:
        tv = 0.5 * sum(abs(pooled.get(c, 0.0) - float(exact.get(c, 0))) for c in keys)
        summary["tv_pooled"] = tv
        checks["tv_below_threshold"] = check(tv < tv_limit, tv=tv, threshold=tv_limit)
    summary["checks"] = checks
    return summary


def cmd_observables(cfg: dict, out: Path, seed: int, threads: int) -> dict:
    content = read_content(cfg)
    beta, mode = read_beta(cfg, content.L)
    L, s = content.L, content.s
    dist = stationary(content, beta, mode)
    checks = {}
    dens_rows, ok_d = [], True
    for site in range(L):
        for sp in range(s + 1):
            f = observables.site_density(content, beta, sp, site)
            e = observables.exact_density(dist, sp, site)
            ok = close(f, e)
            ok_d &= ok
            dens_rows.append([site + 1, sp, show(f), show(e), "PASS" if ok else "FAIL"])
    write_csv(out / "density.csv", ["site", "species", "formula", "exact", "status"], dens_rows)
    checks["density"] = check(ok_d)
    cur_rows, ok_c = [], True
    for sp in range(1, s + 1):
        f = observables.current_multi(content, beta, sp)
        e = observables.exact_current(dist, beta, sp)
        g = observables.current_by_colouring(content, beta, sp)
        ok = close(f, e) and close(f, g)
        ok_c &= ok
        cur_rows.append([sp, show(f), show(e), show(g), "PASS" if ok else "FAIL"])
    write_csv(out / "current.csv", ["species", "formula", "exact", "by_colouring", "status"], cur_rows)
    checks["current"] = check(ok_c)
    if content.counts == (1,) * L and L >= 3:
        mat = observables.two_point_matrix(beta)
        exact = observables.exact_pair_matrix(dist, L)
        rows, ok_m = [], True
        for j in range(L):
            for i in range(L):
                ok = close(mat[j][i], exact[j][i])
                ok_m &= ok
                rows.append([j, i, show(mat[j][i]), repr(float(mat[j][i])), show(exact[j][i]),
                             "PASS" if ok else "FAIL"])
        write_csv(out / "two_point.csv",
                  ["species_site1", "species_site2", "formula", "formula_float", "exact", "status"], rows)
        checks["two_point"] = check(ok_m, cells=L * L)
        rs = all(close(sum(mat[j]), observables.density_multi(content, beta, j)) for j in range(L))
        checks["two_point_row_sums"] = check(rs)
    return {"checks": checks}


def cmd_interchange(cfg: dict, out: Path, seed: int, threads: int) -> dict:
    eta = cfg.get("eta01")
    if eta is not None and tuple(eta) == (0, 1):
        raise UsageError(montecarlo.EXCLUDED_START_REASON)
    instances = read_int(cfg, "instances", 10**4)
    horizon = read_real(cfg, "instance_horizon", 10.0)
    harness = montecarlo.interchange_harness(instances, seed, horizon)
    checks = {"two_station_outputs_equal": check(harness["passed"], failures=harness["failures"],
                                                 instances=instances)}
    try:
        montecarlo.two_station_output([], [], [], (0, 1))
        rejected = False
    except montecarlo.ExcludedStartError:
        rejected = True
    checks["excluded_start_rejected"] = check(rejected)
    summary: dict[str, Any] = {"harness": harness}
    if "content" in cfg:
        content = read_content(cfg)
        beta, _ = read_beta(cfg, content.L)
        k = read_int(cfg, "k", 2)
        perm = cfg.get("permutation", list(range(content.L, k, -1)))
        initial = tuple(cfg.get("initial", tuple(reversed(content.word()))))
        try:
            rep = montecarlo.coupled_path_statistics(
                content, beta, initial, k, perm,
                read_real(cfg, "path_horizon", 5.0), seed, read_int(cfg, "replicas", 1000),
                threads=threads, common_seed=bool(cfg.get("common_seed", False)))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        write_csv(out / "path_statistics.csv",
                  ["statistic", "mean", "se", "mean_permuted", "se_permuted", "z", "gated", "status"],
                  [[key, repr(v["mean"]), repr(v["se"]), repr(v["mean_permuted"]), repr(v["se_permuted"]),
                    repr(v["z"]), v["gated"], "PASS" if v["passed"] else "FAIL"]
                   for key, v in rep["statistics"].items()])
        checks["path_statistics_within_3se"] = check(
            all(v["passed"] for v in rep["statistics"].values() if v["gated"]))
        if rep.get("exact_marginal_equal") is not None:
            checks["exact_marginal_invariant"] = check(rep["exact_marginal_equal"])
        summary["path"] = {key: rep[key] for key in ("replicas", "horizon", "k", "beta", "beta_permuted")}
    summary["checks"] = checks
    return summary


COMMANDS = {
    "exact": cmd_exact,
    "simulate": cmd_simulate,
    "observables": cmd_observables,
    "interchange": cmd_interchange,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pushtasep", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", required=True, metavar="PATH")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--seed", type=int, default=None, metavar="N")
    p.add_argument("--threads", type=int, default=1, metavar="N")
    p.add_argument("--force", action="store_true", help="overwrite a non-empty output directory")
    return p


def prepare_out(path: str, force: bool) -> Path:
    out = Path(path)
    if out.exists() and not out.is_dir():
        raise UsageError(f"{out} exists and is not a directory")
    if out.exists() and any(out.iterdir()) and not force:
        raise UsageError(f"{out} is not empty; pass --force to overwrite")
    out.mkdir(parents=True, exist_ok=True)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        seed = args.seed if args.seed is not None else read_int(cfg, "seed", 0)
        if args.threads < 1:
            raise UsageError("--threads must be at least 1")
        out = prepare_out(args.out, args.force)
        try:
            result = COMMANDS[args.command](cfg, out, seed, args.threads)
        except (EnumerationCapError, ValueError, TypeError) as exc:
            raise UsageError(str(exc)) from exc
    except UsageError as exc:
        print(f"pushtasep {args.command}: {exc}", file=sys.stderr)
        return 2
    mode = "float" if any(isinstance(parse_scalar(b), float) for b in cfg.get("beta", [])) else "exact"
    passed = all(c["passed"] for c in result["checks"].values())
    summary = {"command": args.command, "mode": mode, "seed": seed, "passed": passed, **result}
    with open(out / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for name, c in result["checks"].items():
        print(f"{'PASS' if c['passed'] else 'FAIL'} {name}")
    return 0 if passed else 1


if __name__ == "__main__":
    sys.exit(main())
