"""Batch checks tying the modules to exact oracles, bounded statistics, and reproducibility.

Each ``check_*`` function returns a :class:`CheckResult`; :func:`run_suite`
runs them in order.  The ``quick`` level shrinks sample counts and skips the
clique-number experiments so that it finishes in well under two minutes.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import sumsets
from .cayley import build_cayley_sum_graph, count_cliques_of_size, is_clique
from .census import census, expected_cliques, scalar_checks, tail_sum_bound
from .freiman import (
    OrderedSet,
    check_freiman_inequality,
    classify,
    freiman_dimension,
    plunnecke_ruzsa_violations,
    unfold,
)
from .groups import GroupKind, GroupSet, GroupSpec
from .sampler import (
    SeedSpec,
    WitnessFailure,
    clique_number_distribution,
    popular_sum_refinement,
    random_subset,
    small_doubling_witness,
)
from .subspaces import (
    SubspaceTable,
    count_subspaces,
    enumerate_subspaces,
    intersection_pair_count,
    moment_report,
)


@dataclass
class CheckResult:
    id: int
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.id:2d} {self.name} ({self.seconds:.1f}s) {json.dumps(self.detail, default=str)}"


def _timed(cid: int, name: str):
    def wrap(fn):
        def run(*args, **kwargs) -> CheckResult:
            t0 = time.perf_counter()
            passed, detail = fn(*args, **kwargs)
            return CheckResult(cid, name, bool(passed), detail, time.perf_counter() - t0)

        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run

    return wrap


def _z_score(samples, exact) -> float:
    x = np.asarray(samples, dtype=float)
    se = x.std(ddof=1) / math.sqrt(len(x))
    return abs(x.mean() - float(exact)) / se if se > 0 else (0.0 if x.mean() == float(exact) else math.inf)


@_timed(1, "census integrity")
def check_census(max_cyclic: int = 16, max_dim: int = 4, max_k: int = 5):
    """Rows sum to C(N, k); 3-sets always have 3 sums; orbit mode equals direct mode."""
    groups = [GroupSpec.cyclic(N) for N in range(1, max_cyclic + 1)]
    groups += [GroupSpec.boolean(n) for n in range(0, max_dim + 1)]
    bad = []
    for g in groups:
        for k in range(0, max_k + 1):
            direct = census(g, k)
            if direct.total != math.comb(g.order, k):
                bad.append((str(g), k, "total"))
            if k == 3 and g.order >= 3 and direct.counts != {3: math.comb(g.order, 3)}:
                bad.append((str(g), k, "k=3 row"))
            if census(g, k, symmetry_reduction=True).counts != direct.counts:
                bad.append((str(g), k, "symmetry"))
    return not bad, {"tables": len(groups) * (max_k + 1), "failures": bad[:10]}


@_timed(2, "clique-sumset duality")
def check_duality(pairs: int = 1000, seed: int = 11):
    """``X`` is a clique of ``G_A`` exactly when the restricted sumset of ``X`` lies in ``A``."""
    rng = SeedSpec(seed).rng()
    mismatches = 0
    cliques = 0
    for _ in range(pairs):
        if rng.random() < 0.5:
            g = GroupSpec.cyclic(int(rng.integers(1, 65)))
        else:
            g = GroupSpec.boolean(int(rng.integers(0, 7)))
        A = GroupSet.from_mask(g, rng.random(g.order) < rng.uniform(0.3, 0.9))
        size = int(rng.integers(0, min(g.order, 7) + 1))
        X = GroupSet.from_elements(g, rng.choice(g.order, size, replace=False).tolist())
        graph = build_cayley_sum_graph(g, A)
        direct = is_clique(graph, X)
        via_sums = sumsets.restricted_sumset(g, X).issubset(A)
        cliques += direct
        mismatches += direct != via_sums
    return mismatches == 0, {"pairs": pairs, "cliques": cliques, "mismatches": mismatches}


@_timed(3, "expected clique count")
def check_expectation(samples: int = 2000, seed: int = 13):
    """Monte Carlo mean of the k-clique count of ``G_A`` against the census expectation."""
    detail = {}
    ok = True
    for g, k in ((GroupSpec.cyclic(32), 3), (GroupSpec.boolean(5), 4)):
        exact = expected_cliques(census(g, k)).expectation
        counts = []
        for i in range(samples):
            A = random_subset(g, Fraction(1, 2), SeedSpec(seed, i))
            counts.append(count_cliques_of_size(build_cayley_sum_graph(g, A), k))
        z = _z_score(counts, exact)
        ok &= z <= 3
        detail[f"{g},k={k}"] = {"exact": str(exact), "mean": float(np.mean(counts)), "z": round(z, 3)}
    return ok, detail


@_timed(4, "isomorphism classification")
def check_classification(universe: int = 10, k: int = 4, s: int = 2):
    """Relation-span classes of all k-subsets agree with the definition oracle."""
    sets = [OrderedSet.integers(c) for c in combinations(range(universe), k)]

    def partition(method):
        return {frozenset(A.elements for A in c["members"]) for c in classify(sets, s, method)}

    span = partition("relation_span")
    oracle = partition("definition_oracle")
    bound = k ** (2 * s * k)
    return span == oracle and len(span) <= bound, {"sets": len(sets), "classes": len(span),
                                                   "oracle_classes": len(oracle), "bound": bound}


@_timed(5, "Freiman inequality")
def check_freiman_inequality_grid(universe: int = 13, k_lo: int = 3, k_hi: int = 6):
    """``|S + S| >= r (k - (r+1)/2)`` (restricted) for every integer set in the grid."""
    checked = 0
    bad = []
    for k in range(k_lo, k_hi + 1):
        for S in combinations(range(universe), k):
            rep = check_freiman_inequality(S)
            checked += 1
            if not rep.holds:
                bad.append(S)
    return not bad, {"sets": checked, "violations": bad[:10]}


@_timed(6, "unfolded dimension bound")
def check_unfold_dimension(max_N: int = 13, k_lo: int = 3, k_hi: int = 6):
    """Rational Freiman dimension of the unfolded set is at most ``4m/k``."""
    checked = 0
    bad = []
    for N in range(k_lo, max_N + 1):
        g = GroupSpec.cyclic(N)
        for k in range(k_lo, min(k_hi, N) + 1):
            for c in combinations(range(N), k):
                A = GroupSet.from_elements(g, c)
                m = len(sumsets.restricted_sumset(g, A))
                r = freiman_dimension(unfold(A))
                checked += 1
                if r * k > 4 * m:
                    bad.append((N, c))
    return not bad, {"sets": checked, "violations": bad[:10]}


@_timed(7, "Plunnecke-Ruzsa")
def check_plunnecke(samples: int = 10_000, N: int = 100, max_size: int = 10, seed: int = 17):
    """``|kA - lA| <= C^(k+l) |A|`` with ``C = |A + A| / |A|`` for random small sets."""
    rng = SeedSpec(seed).rng()
    g = GroupSpec.cyclic(N)
    bad = []
    for _ in range(samples):
        size = int(rng.integers(1, max_size + 1))
        A = GroupSet.from_elements(g, rng.choice(N, size, replace=False).tolist())
        v = plunnecke_ruzsa_violations(g, A, 4)
        if v:
            bad.append((A.elements(), v))
    return not bad, {"sets": samples, "violations": bad[:10]}


@_timed(8, "subspace counting formulas")
def check_subspace_formulas(max_n: int = 5, max_k: int = 3):
    """Pair-count formula against brute force; pair counts sum to M^2; enumeration length is M."""
    bad = []
    for n in range(0, max_n + 1):
        for k in range(0, min(n, max_k) + 1):
            M = count_subspaces(n, k)
            if sum(1 for _ in enumerate_subspaces(n, k)) != M:
                bad.append((n, k, "enumeration"))
            total = 0
            for l in range(0, k + 1):
                f = intersection_pair_count(n, k, l, "formula")
                if f != intersection_pair_count(n, k, l, "brute_force"):
                    bad.append((n, k, l))
                total += f
            if total != M * M:
                bad.append((n, k, "sum"))
    return not bad, {"failures": bad}


@_timed(9, "subspace clique moments")
def check_subspace_moments(samples: int = 2000, n: int = 8, k: int = 2, seed: int = 19):
    """Monte Carlo mean of the subspace count against the exact mean and its lower bound."""
    rep = moment_report(n, k)
    table = SubspaceTable(n, k)
    g = GroupSpec.boolean(n)
    xs = [table.count(random_subset(g, Fraction(1, 2), SeedSpec(seed, i))) for i in range(samples)]
    z = _z_score(xs, rep.E_X_exact)
    ok = z <= 3 and rep.E_X_exact >= rep.E_X_lower_bound
    return ok, {"exact": str(rep.E_X_exact), "mean": float(np.mean(xs)), "z": round(z, 3),
                "lower_bound": str(rep.E_X_lower_bound)}


@_timed(10, "small-doubling witness")
def check_witness(runs: int = 100, length: int = 40_000, N: int = 200_003, retry_cap: int = 50, seed: int = 23):
    """Witness found within the retry cap in at least 95% of runs; both bounds hold exactly."""
    g = GroupSpec.cyclic(N)
    A = GroupSet.from_elements(g, range(length))
    eps = Fraction(1, 9)
    successes = 0
    bound_failures = 0
    retries = []
    for i in range(runs):
        try:
            w = small_doubling_witness(A, eps, SeedSpec(seed, i), retry_cap)
        except WitnessFailure:
            continue
        successes += 1
        retries.append(w.retries)
        m = len(sumsets.restricted_sumset(g, w.B))
        if not (len(w.B) <= w.size_bound and m == w.achieved_m and m >= (1 - eps) * length and w.B.issubset(A)):
            bound_failures += 1
    need = math.ceil(0.95 * runs)
    return successes >= need and bound_failures == 0, {
        "runs": runs, "successes": successes, "bound_failures": bound_failures,
        "max_retries": max(retries, default=None)}


@_timed(11, "popular-sum refinement")
def check_refinement(runs: int = 100, k: int = 10_000, N: int = 10**6, retry_cap: int = 100, seed: int = 29):
    """Containment in every run; size target (with factor-2 slack) met in at least 95%."""
    g = GroupSpec.cyclic(N)
    A = GroupSet.from_elements(g, range(k))
    contained = met = 0
    for i in range(runs):
        r = popular_sum_refinement(g, A, SeedSpec(seed, i), retry_cap)
        shifted = GroupSet.from_elements(g, g.add_arrays(r.A1.to_array(), r.a_star).tolist())
        if shifted.issubset(sumsets.restricted_sumset(g, r.A0)) and r.A0.issubset(A) and r.A1.issubset(A):
            contained += 1
        met += r.met_target
    return contained == runs and met >= math.ceil(0.95 * runs), {
        "runs": runs, "contained": contained, "target_met": met}


@_timed(12, "scalar and tail inequalities")
def check_scalar_and_tail(exponents=range(20, 31)):
    """Grid maxima of the two scalar functions; tail sums at most ``N^-2``."""
    sc = scalar_checks()
    ok = sc["max_log2_2eC_over_C_minus_1"] <= -0.2499 and sc["max_log2_eC_over_C_minus_1"] <= -0.39
    tails = {}
    for kind in (GroupKind.CYCLIC, GroupKind.BOOLEAN):
        for e in exponents:
            rep = tail_sum_bound(kind, 2**e)
            ok &= rep.passes
            tails[f"{kind.value}:2^{e}"] = round(rep.log2_tail + 2 * e, 2)
    return ok, {**{k: round(v, 5) for k, v in sc.items()}, "log2_tail_plus_2logN": tails}


def clique_gap_experiment(trials: int = 30, dim: int = 9, seed: int = 31, budget: int = 10**8,
                          threads: int | None = None, binomial_sizes=(128, 256, 512)) -> dict:
    """Clique-number distributions for Z_2^dim, Z_(2^dim) and binomial graphs, as one report."""
    runs = {
        "boolean": clique_number_distribution(GroupSpec.boolean(dim), trials, seed, budget, "cayley", threads),
        "cyclic": clique_number_distribution(GroupSpec.cyclic(1 << dim), trials, seed, budget, "cayley", threads),
    }
    for N in binomial_sizes:
        runs[f"binomial_{N}"] = clique_number_distribution(GroupSpec.cyclic(N), trials, seed, budget,
                                                          "binomial", threads)
    return {
        "command": "gap",
        "params": {"trials": trials, "dim": dim, "budget_nodes": budget},
        "master_seed": seed,
        "runs": {name: {**d.to_json(timings=False), "median": d.median()} for name, d in runs.items()},
    }


def deterministic_dump(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=1)


@_timed(13, "Cayley vs cyclic clique gap")
def check_clique_gap(report: dict | None = None, **kwargs):
    """Boolean median beats the cyclic median and reaches 15; binomial medians in ``[1.2, 3] log2 N``."""
    if report is None:
        report = clique_gap_experiment(**kwargs)
    runs = report["runs"]
    inexact = {name: r["inexact_trials"] for name, r in runs.items() if r["inexact_trials"]}
    mb, mc = runs["boolean"]["median"], runs["cyclic"]["median"]
    ok = mb > mc and mb >= 15 and not inexact
    band = {}
    for name, r in runs.items():
        if name.startswith("binomial_"):
            N = int(name.split("_")[1])
            lo, hi = 1.2 * math.log2(N), 3 * math.log2(N)
            band[name] = [r["median"], round(lo, 2), round(hi, 2)]
            ok &= lo <= r["median"] <= hi
    return ok, {"median_boolean": mb, "median_cyclic": mc, "binomial": band, "inexact": inexact}


@_timed(14, "reproducibility")
def check_determinism(first: dict | None = None, threads=(1, 2), **kwargs):
    """Two runs with the same seed and different worker counts give identical reports."""
    a = first if first is not None else clique_gap_experiment(threads=threads[0], **kwargs)
    b = clique_gap_experiment(threads=threads[1], **kwargs)
    same = deterministic_dump(a) == deterministic_dump(b)
    return same, {"identical": same, "threads": list(threads)}


QUICK_ARGS = {
    3: {"samples": 300},
    5: {"universe": 10},
    6: {"max_N": 10},
    7: {"samples": 1000},
    9: {"samples": 300},
    10: {"runs": 10},
    11: {"runs": 5},
}


def run_suite(level: str = "full", log=print) -> list[CheckResult]:
    """Run every check (``full``) or a reduced set (``quick``); ``log`` receives one line per check."""
    if level not in ("quick", "full"):
        raise ValueError(f"unknown level {level!r}")
    quick = level == "quick"
    checks = [check_census, check_duality, check_expectation, check_classification,
              check_freiman_inequality_grid, check_unfold_dimension, check_plunnecke,
              check_subspace_formulas, check_subspace_moments, check_witness, check_refinement,
              check_scalar_and_tail]
    results = []
    for i, fn in enumerate(checks, start=1):
        res = fn(**(QUICK_ARGS.get(i, {}) if quick else {}))
        results.append(res)
        log(res.line())
    if not quick:
        gap = clique_gap_experiment()
        for res in (check_clique_gap(gap), check_determinism(gap)):
            results.append(res)
            log(res.line())
    return results
