"""Seeded random subsets, Monte Carlo clique numbers, and two randomized set refinements."""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cayley import DEFAULT_NODE_BUDGET, binomial_graph, build_cayley_sum_graph, max_clique
from .groups import GroupSet, GroupSpec, PreconditionError
from .sumsets import pair_sum_counts, restricted_sumset

MASK64 = (1 << 64) - 1
DEFAULT_K_MIN = 1 << 20


@dataclass(frozen=True)
class SeedSpec:
    """A master seed plus a trial counter; each pair gives an independent stream."""

    master_seed: int
    trial_index: int = 0

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([self.master_seed & MASK64, self.trial_index]))

    def child(self, trial_index: int) -> SeedSpec:
        return SeedSpec(self.master_seed, trial_index)


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, SeedSpec):
        return seed.rng()
    return SeedSpec(int(seed)).rng()


def thread_count() -> int:
    raw = os.environ.get("SUMCLIQUE_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise PreconditionError(f"SUMCLIQUE_THREADS must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


def random_subset(g: GroupSpec, density=Fraction(1, 2), seed=0) -> GroupSet:
    """Each element independently with probability ``density``."""
    density = Fraction(density)
    if not 0 <= density <= 1:
        raise PreconditionError("density must lie in [0, 1]")
    rng = _as_rng(seed)
    return GroupSet.from_mask(g, rng.random(g.order) < float(density))


# -- clique number distributions ------------------------------------------------


@dataclass(frozen=True)
class TrialOutcome:
    trial: int
    omega: int
    exact: bool
    nodes: int
    elapsed_ms: float = field(compare=False)

    def to_json(self) -> dict:
        return {"trial": self.trial, "omega": self.omega, "exact": self.exact, "nodes": self.nodes}


@dataclass(frozen=True)
class CliqueDistribution:
    group: GroupSpec
    baseline: str
    master_seed: int
    budget: int
    trials: tuple[TrialOutcome, ...]

    @property
    def histogram(self) -> dict[int, int]:
        """Clique numbers of trials that finished within budget."""
        h: dict[int, int] = {}
        for t in self.trials:
            if t.exact:
                h[t.omega] = h.get(t.omega, 0) + 1
        return dict(sorted(h.items()))

    @property
    def inexact_trials(self) -> list[int]:
        return [t.trial for t in self.trials if not t.exact]

    def exact_omegas(self) -> list[int]:
        return [t.omega for t in self.trials if t.exact]

    def median(self) -> float:
        vals = self.exact_omegas()
        if not vals:
            raise PreconditionError("no trial finished within budget")
        return float(np.median(vals))

    def to_json(self, command: str = "simulate", params: dict | None = None, timings: bool = True) -> dict:
        body = {
            "command": command,
            "group": self.group.to_json(),
            "params": {"baseline": self.baseline, "trials": len(self.trials), "budget_nodes": self.budget,
                       **(params or {})},
            "master_seed": self.master_seed,
            "per_trial": [t.to_json() for t in self.trials],
            "histogram": {str(k): v for k, v in self.histogram.items()},
            "inexact_trials": self.inexact_trials,
        }
        if timings:
            body["timings_ms"] = {str(t.trial): round(t.elapsed_ms, 3) for t in self.trials}
        return body

    def histogram_csv(self) -> str:
        lines = ["omega,count"] + [f"{k},{v}" for k, v in self.histogram.items()]
        return "\n".join(lines) + "\n"


def _run_trial(g: GroupSpec, baseline: str, seed: SeedSpec, budget: int) -> TrialOutcome:
    t0 = time.perf_counter()
    rng = seed.rng()
    if baseline == "cayley":
        graph = build_cayley_sum_graph(g, random_subset(g, Fraction(1, 2), rng))
    else:
        graph = binomial_graph(g.order, rng)
    res = max_clique(graph, budget=budget)
    return TrialOutcome(seed.trial_index, res.omega, res.exact, res.nodes_explored,
                        (time.perf_counter() - t0) * 1000)


def clique_number_distribution(
    g: GroupSpec,
    trials: int,
    seed: int = 0,
    budget: int = DEFAULT_NODE_BUDGET,
    baseline: str = "cayley",
    threads: int | None = None,
) -> CliqueDistribution:
    """Exact clique numbers of ``trials`` random graphs on ``|g|`` vertices.

    ``baseline="cayley"`` samples ``A`` at density 1/2 and uses ``G_A``;
    ``baseline="binomial"`` samples ``G(N, 1/2)`` directly.  Trial ``i`` is
    driven by ``SeedSpec(seed, i)`` alone, so results do not depend on the
    number of worker threads.
    """
    if trials < 1:
        raise PreconditionError("trials must be at least 1")
    if baseline not in ("cayley", "binomial"):
        raise PreconditionError(f"unknown baseline {baseline!r}")
    workers = min(threads or thread_count(), trials)
    specs = [SeedSpec(seed, i) for i in range(trials)]
    if workers == 1:
        outcomes = [_run_trial(g, baseline, s, budget) for s in specs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda s: _run_trial(g, baseline, s, budget), specs))
    return CliqueDistribution(g, baseline, seed, budget, tuple(outcomes))


# -- popular-sum refinement -----------------------------------------------------


@dataclass(frozen=True)
class RefinementResult:
    """``a_star + A1`` lies inside ``A0 + A0`` (restricted), with ``A0, A1`` subsets of ``A``."""

    a_star: int
    A0: GroupSet
    A1: GroupSet
    retries: int
    met_target: bool
    degenerate: bool
    objective: float
    target: float
    Q: int
    q: float

    def to_json(self) -> dict:
        return {
            "a_star": self.a_star,
            "A0_size": len(self.A0),
            "A1_size": len(self.A1),
            "retries": self.retries,
            "met_target": self.met_target,
            "degenerate": self.degenerate,
            "objective": self.objective,
            "target": self.target,
            "Q": self.Q,
            "q": self.q,
        }


def unpopular_degrees(g: GroupSpec, A: GroupSet, Q: int) -> tuple[np.ndarray, np.ndarray]:
    """Elements of ``A`` and their degrees in the graph joining ``x != y`` when ``x + y`` is ``Q``-unpopular.

    A sum is ``Q``-unpopular when fewer than ``Q`` ordered pairs of distinct
    elements of ``A`` produce it.
    """
    elems = A.to_array()
    s = pair_sum_counts(g, A)
    unpopular = np.flatnonzero((s > 0) & (s < Q))
    mask = A.to_mask()
    deg = np.zeros(len(elems), dtype=np.int64)
    k = len(elems)
    if len(unpopular) <= k:
        for z in unpopular:
            ys = g.add_arrays(g.negate_array(elems), int(z))
            deg += mask[ys] & (ys != elems)
    else:
        bad = np.zeros(g.order, dtype=bool)
        bad[unpopular] = True
        for i, x in enumerate(elems):
            row = bad[g.add_arrays(elems, int(x))]
            row[i] = False
            deg[i] = int(row.sum())
    return elems, deg


def popular_sum_refinement(g: GroupSpec, A: GroupSet, seed=0, retry_cap: int = 100) -> RefinementResult:
    """Find ``a*`` and ``A0, A1`` in ``A`` with ``a* + A1`` covered by ``A0 + A0`` (restricted).

    ``a*`` has minimum degree in the unpopular-sum graph for ``Q = floor(k^(1/5))``
    (ties go to the smallest element).  ``X`` is drawn at density
    ``q = k^(-1/15)``, ``Z`` collects the ``a`` with ``a* + a`` outside
    ``X + X``, and the draw is accepted once
    ``|X| + k^(11/15)|Z| <= 8 k^(-1/15) m``.  After ``retry_cap`` draws the
    best one seen is returned with ``met_target=False``.  Since ``A1 = A \\ Z``,
    the containment holds for every draw.

    For ``k < 32`` every occurring sum is popular (``Q = 1``); the result is
    then ``A0 = A`` and ``A1`` empty.
    """
    k = len(A)
    if k < 2:
        raise PreconditionError("need |A| >= 2")
    if retry_cap < 1:
        raise PreconditionError("retry_cap must be at least 1")
    Q = math.floor(k ** (1 / 5))
    q = k ** (-1 / 15)
    m = len(restricted_sumset(g, A))
    target = 8 * k ** (-1 / 15) * m
    if Q < 2:
        a0 = A.elements()[0]
        return RefinementResult(a0, A, GroupSet.empty(g), 0, True, True, float(k), target, Q, q)

    elems, deg = unpopular_degrees(g, A, Q)
    a_star = int(elems[int(np.argmin(deg))])  # elems ascending, argmin takes the first
    shifted = g.add_arrays(elems, a_star)
    rng = _as_rng(seed)
    weight = k ** (11 / 15)
    best = None
    for attempt in range(1, retry_cap + 1):
        X = GroupSet.from_elements(g, elems[rng.random(k) < q].tolist())
        covered = restricted_sumset(g, X).to_mask()
        in_Z = ~covered[shifted]
        objective = len(X) + weight * int(in_Z.sum())
        if best is None or objective < best[0]:
            best = (objective, X, in_Z, attempt)
        if objective <= target:
            break
    objective, X, in_Z, attempt = best
    A1 = GroupSet.from_elements(g, elems[~in_Z].tolist())
    result = RefinementResult(a_star, X, A1, attempt, objective <= target, False, float(objective), target, Q, q)
    if not verify_refinement(g, A, result):
        raise AssertionError("containment a* + A1 in A0 + A0 failed")
    return result


def verify_refinement(g: GroupSpec, A: GroupSet, r: RefinementResult) -> bool:
    if not (r.A0.issubset(A) and r.A1.issubset(A)):
        return False
    if len(r.A1) == 0:
        return True
    shifted = GroupSet.from_elements(g, g.add_arrays(r.A1.to_array(), r.a_star).tolist())
    return shifted.issubset(restricted_sumset(g, r.A0))


# -- small-doubling witness -----------------------------------------------------


@dataclass(frozen=True)
class WitnessResult:
    B: GroupSet
    retries: int
    achieved_m: int
    k: int
    epsilon: Fraction
    p: float
    size_bound: float
    size_bound_log2: float

    def to_json(self) -> dict:
        return {
            "B_size": len(self.B),
            "retries": self.retries,
            "achieved_m": self.achieved_m,
            "k": self.k,
            "epsilon": str(self.epsilon),
            "p": self.p,
            "size_bound_ln": self.size_bound,
            "size_bound_log2": self.size_bound_log2,
        }


class WitnessFailure(RuntimeError):
    """No acceptable sample within the retry cap."""


def witness_probability(k: int, epsilon) -> float:
    """Sampling density ``3/eps * sqrt(ln(6/eps) / (2k))``."""
    eps = float(Fraction(epsilon))
    return 3 / eps * math.sqrt(math.log(6 / eps) / (2 * k))


def small_doubling_witness(A: GroupSet, epsilon=Fraction(1, 9), seed=0, retry_cap: int = 50) -> WitnessResult:
    """A subset ``B`` of ``A`` with ``|B| <= 3 ln(1/eps)/eps * sqrt(k)`` and ``|B + B| >= (1 - eps) k`` (restricted)."""
    g = A.group
    epsilon = Fraction(epsilon)
    if not 0 < epsilon <= Fraction(1, 4):
        raise PreconditionError("epsilon must lie in (0, 1/4]")
    k = len(A)
    if k < 1:
        raise PreconditionError("A must be nonempty")
    p = witness_probability(k, epsilon)
    if p > 1:
        raise PreconditionError(f"sampling density {p:.3f} exceeds 1; k = {k} is too small for epsilon = {epsilon}")
    eps = float(epsilon)
    bound = 3 * math.log(1 / eps) / eps * math.sqrt(k)
    bound2 = 3 * math.log2(1 / eps) / eps * math.sqrt(k)
    need = (1 - epsilon) * k
    elems = A.to_array()
    rng = _as_rng(seed)
    for attempt in range(1, retry_cap + 1):
        B = GroupSet.from_elements(g, elems[rng.random(k) < p].tolist())
        if len(B) > bound:
            continue
        m = len(restricted_sumset(g, B))
        if m >= need:
            return WitnessResult(B, attempt, m, k, epsilon, p, bound, bound2)
    raise WitnessFailure(f"no witness in {retry_cap} draws")


def seven_doubling_subset(A: GroupSet, seed=0, k_min: int = DEFAULT_K_MIN, retry_cap: int = 50) -> GroupSet:
    """A subset ``C`` of ``A`` with ``k/8 <= |C| <= 8k/63`` and ``|C + C| >= 7|C|`` (restricted).

    ``C`` is a small-doubling witness for ``eps = 1/9`` padded with the
    smallest unused elements of ``A``.  Because ``C`` contains ``B``, the
    bound follows from ``|B + B| >= 8k/9 >= 7 * 8k/63``; the sumset of ``C``
    itself is computed only when ``|C|`` is small.
    """
    g = A.group
    k = len(A)
    if k < k_min:
        raise PreconditionError(f"|A| = {k} is below k_min = {k_min}")
    w = small_doubling_witness(A, Fraction(1, 9), seed, retry_cap)
    lo = math.ceil(k / 8)
    hi = (8 * k) // 63
    if len(w.B) > hi:
        raise WitnessFailure("witness larger than 8k/63")
    bits = w.B.bits
    need = lo - len(w.B)
    if need > 0:
        rest = A.difference(w.B).to_array()[:need]
        for x in rest.tolist():
            bits |= 1 << x
    C = GroupSet(g, bits)
    if not lo <= len(C) <= hi:
        raise AssertionError("padding left |C| outside [k/8, 8k/63]")
    if len(C) <= 20000:
        if len(restricted_sumset(g, C)) < 7 * len(C):
            raise AssertionError("|C + C| < 7|C|")
    elif 9 * w.achieved_m < 8 * k or 63 * len(C) > 8 * k:
        raise AssertionError("|C + C| >= 7|C| not implied by the witness")
    return C
