"""Command-line front end: each subcommand runs one library operation and writes a report.

Exit status is 0 on success, 2 when an operation is called outside its
domain (or on bad arguments), and 3 when a search or enumeration budget
runs out.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from pathlib import Path

from . import cayley, freiman, sampler, subspaces
from .census import (
    DEFAULT_SUBSET_BUDGET,
    CensusTable,
    census,
    evaluate_count_bounds,
    expected_cliques,
    scalar_checks,
    tail_sum_bound,
)
from .groups import BudgetExceeded, GroupSet, GroupSpec, PreconditionError, read_set_file
from .sumsets import doubling_stats

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_BUDGET = 3


@dataclass
class RunConfig:
    command: str
    group: GroupSpec | None
    params: dict
    master_seed: int | None
    budgets: dict
    output: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "group": self.group.to_json() if self.group is not None else None,
            "params": self.params,
            "master_seed": self.master_seed,
            "budgets": self.budgets,
            "output": self.output,
        }


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _group(args) -> GroupSpec:
    if args.group == "zN":
        if args.size is None:
            raise PreconditionError("--group zN needs --size")
        return GroupSpec.cyclic(args.size)
    if args.dim is None:
        raise PreconditionError("--group z2n needs --dim")
    return GroupSpec.boolean(args.dim)


def _config(args, g: GroupSpec | None, **params) -> RunConfig:
    return RunConfig(
        command=args.command,
        group=g,
        params={k: (str(v) if isinstance(v, Fraction) else v) for k, v in params.items()},
        master_seed=getattr(args, "seed", None),
        budgets={"nodes": args.budget_nodes, "subsets": args.budget_subsets, "subspaces": args.budget_subspaces},
        output={"path": args.out, "format": args.format},
    )


def _input_set(args, g: GroupSpec) -> GroupSet:
    if getattr(args, "set_file", None):
        return read_set_file(g, args.set_file)
    if getattr(args, "ap_length", None) is not None:
        if args.ap_length > g.order:
            raise PreconditionError("progression longer than the group")
        return GroupSet.from_elements(g, range(args.ap_length))
    if getattr(args, "paley", False):
        if g.is_boolean:
            raise PreconditionError("Paley sets live in Z_N")
        return cayley.paley_set(g.order)
    raise PreconditionError("no input set: give --set-file (or --ap-length / --paley where supported)")


def _emit(args, cfg: RunConfig, body: dict, csv_text: str | None = None) -> None:
    if args.format == "csv":
        if csv_text is None:
            raise PreconditionError(f"{args.command} has no tabular output; use --format json")
        text = csv_text
    else:
        text = json.dumps({"config": cfg.to_json(), **body}, indent=2, default=str) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- subcommands ------------------------------------------------------------------


def cmd_census(args) -> None:
    g = _group(args)
    table = census(g, args.k, args.symmetry, args.budget_subsets)
    if args.m_max is not None:
        table = CensusTable(g, table.k, {m: c for m, c in table.counts.items() if m <= args.m_max})
    cfg = _config(args, g, k=args.k, m_max=args.m_max, symmetry=args.symmetry)
    _emit(args, cfg, table.to_json(), table.to_csv())


def cmd_expect(args) -> None:
    g = _group(args)
    table = census(g, args.k, args.symmetry, args.budget_subsets)
    rep = expected_cliques(table)
    cfg = _config(args, g, k=args.k)
    _emit(args, cfg, {"census": table.to_json(), "expectation": rep.to_json()},
          f"k,expectation_num,expectation_den\n{args.k},{rep.expectation.numerator},{rep.expectation.denominator}\n")


def cmd_clique(args) -> None:
    g = _group(args)
    if args.set_file or args.paley:
        A = _input_set(args, g)
    else:
        A = sampler.random_subset(g, args.density, sampler.SeedSpec(args.seed))
    graph = cayley.build_cayley_sum_graph(g, A)
    res = cayley.max_clique(graph, budget=args.budget_nodes, complement=args.complement)
    body = {"generator_size": len(A), "edges": len(graph.edges()), "clique": res.to_json()}
    if args.count_k is not None:
        body["count_k"] = args.count_k
        body["k_cliques"] = cayley.count_cliques_of_size(graph, args.count_k)
    if args.edges_out:
        cayley.write_edge_list(graph, args.edges_out)
    cfg = _config(args, g, complement=args.complement, count_k=args.count_k,
                  set_file=args.set_file, paley=args.paley, density=args.density)
    _emit(args, cfg, body)
    if not res.exact:
        raise BudgetExceeded(f"clique search stopped after {res.nodes_explored} nodes")


def cmd_simulate(args) -> None:
    g = _group(args)
    dist = sampler.clique_number_distribution(g, args.trials, args.seed, args.budget_nodes, args.baseline)
    cfg = _config(args, g, trials=args.trials, baseline=args.baseline)
    body = dist.to_json(params={})
    body.pop("command")
    body["median"] = dist.median() if dist.exact_omegas() else None
    _emit(args, cfg, body, dist.histogram_csv())


def _integer_set(path) -> freiman.OrderedSet:
    text = Path(path).read_text(encoding="utf-8")
    body = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    try:
        values = [int(t) for t in " ".join(body).replace(",", " ").split()]
    except ValueError as exc:
        raise PreconditionError(f"malformed set file: {exc}") from None
    return freiman.OrderedSet.integers(sorted(set(values)))


def cmd_freiman(args) -> None:
    if args.classify is not None:
        sets = [freiman.OrderedSet.integers(c) for c in combinations(range(args.classify), args.k)]
        classes = freiman.classify(sets, args.s, args.method)
        cfg = _config(args, None, classify=args.classify, k=args.k, s=args.s, method=args.method)
        rows = json.loads(freiman.classification_report(classes))
        _emit(args, cfg, {"sets": len(sets), "classes": len(classes), "table": rows},
              "class_key_hex,count,representative\n"
              + "".join(f"{r['class_key_hex']},{r['count']},{' '.join(map(str, r['representative']))}\n" for r in rows))
        return
    if args.integers:
        g = None
        A = _integer_set(args.set_file)
    else:
        g = _group(args)
        A = freiman.OrderedSet.from_groupset(_input_set(args, g))
    rb = freiman.relation_basis(A, args.s)
    hs = freiman.hom_space(A)
    span = freiman.spanning_subset(A, hs)
    body = {
        "elements": list(A.elements),
        "space": str(A.space),
        "s": args.s,
        "relation_basis": [list(r) for r in rb.basis],
        "class_key_hex": freiman.key_hex(freiman.canonical_class_key(rb)),
        "hom_dim": hs.dim,
        "freiman_dim": hs.freiman_dim,
        "spanning_indices": list(span.indices),
        "spanning_coefficients": [[str(c) for c in row] for row in span.coefficients],
    }
    if args.integers and len(A) >= 2:
        rep = freiman.check_freiman_inequality(A)
        body["freiman_inequality"] = {"m": rep.m, "lower_bound": str(rep.lower_bound), "holds": rep.holds}
    if g is not None and g.is_boolean and len(A) >= 3:
        rep = freiman.check_mod2_dimension_bound(_input_set(args, g))
        body["mod2_dimension_bound"] = {"bound_log2": rep.bound_log2, "bound_ln": rep.bound_ln,
                                        "holds_log2": rep.holds_log2, "holds_ln": rep.holds_ln}
    cfg = _config(args, g, s=args.s, integers=args.integers, set_file=args.set_file)
    _emit(args, cfg, body)


def cmd_witness(args) -> None:
    g = _group(args)
    A = _input_set(args, g)
    seed = sampler.SeedSpec(args.seed)
    cfg = _config(args, g, epsilon=args.epsilon, retries=args.retries, seven=args.seven,
                  ap_length=args.ap_length, set_file=args.set_file)
    if args.seven:
        C = sampler.seven_doubling_subset(A, seed, k_min=args.k_min, retry_cap=args.retries)
        _emit(args, cfg, {"k": len(A), "C_size": len(C), "C_elements": C.elements()})
        return
    w = sampler.small_doubling_witness(A, args.epsilon, seed, args.retries)
    _emit(args, cfg, {**w.to_json(), "B_elements": w.B.elements()})


def cmd_refine(args) -> None:
    g = _group(args)
    A = _input_set(args, g)
    r = sampler.popular_sum_refinement(g, A, sampler.SeedSpec(args.seed), args.retries)
    cfg = _config(args, g, retries=args.retries, ap_length=args.ap_length, set_file=args.set_file)
    _emit(args, cfg, {**r.to_json(), "k": len(A), "m": doubling_stats(g, A).m})


def cmd_subspace(args) -> None:
    n, k = args.dim, args.k
    if n is None or k is None:
        raise PreconditionError("subspace needs --dim and --k")
    g = GroupSpec.boolean(n)
    body = {"moments": subspaces.moment_report(n, k).to_json()}
    body["pair_counts"] = {str(l): subspaces.intersection_pair_count(n, k, l) for l in range(k + 1)}
    if args.set_file:
        A = read_set_file(g, args.set_file)
        body["statistic"] = subspaces.subspace_clique_statistic(A, k, args.budget_subspaces)
    cfg = _config(args, g, k=k, set_file=args.set_file)
    csv_text = "l,pairs\n" + "".join(f"{l},{c}\n" for l, c in body["pair_counts"].items())
    _emit(args, cfg, body, csv_text)


def cmd_bounds(args) -> None:
    g = _group(args)
    kind, N = g.kind, g.order
    body: dict = {"scalar": scalar_checks()}
    rows = []
    if args.k is not None:
        hi = args.m_max if args.m_max is not None else args.k * (args.k - 1) // 2
        for m in range(args.k - 1, hi + 1):
            rows.append({"m": m, **evaluate_count_bounds(kind, N, args.k, m)})
        body["count_bounds_log2"] = rows
    if N >= 2**10:
        body["tail"] = tail_sum_bound(kind, N).to_json()
    cfg = _config(args, g, k=args.k, m_max=args.m_max)
    keys = ["m"] + [key for key in (rows[0] if rows else {}) if key != "m"]
    csv_text = ",".join(keys) + "\n" + "".join(",".join("" if r[c] is None else str(r[c]) for c in keys) + "\n"
                                               for r in rows)
    _emit(args, cfg, body, csv_text)


def cmd_rectify(args) -> None:
    g = _group(args)
    A = _input_set(args, g)
    res = freiman.rectify(A)
    body = {"elements": A.elements(), "rectifiable": res is not None}
    if res is not None:
        lam, mu = res
        body.update(lam=lam, mu=mu, image=sorted((lam * x + mu) % g.order for x in A.elements()))
    cfg = _config(args, g, set_file=args.set_file)
    _emit(args, cfg, body)


def cmd_verify(args) -> None:
    from .verify import run_suite

    lines = []
    results = run_suite(args.level, log=lambda s: (lines.append(s), print(s, file=sys.stderr)))
    failed = [r.id for r in results if not r.passed]
    cfg = _config(args, None, level=args.level)
    body = {
        "checks": [{"id": r.id, "name": r.name, "passed": r.passed, "detail": r.detail,
                    "seconds": round(r.seconds, 2)} for r in results],
        "failed": failed,
    }
    _emit(args, cfg, body, "id,name,passed\n" + "".join(f"{r.id},{r.name},{r.passed}\n" for r in results))
    if failed:
        raise SystemExit(1)


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", choices=["zN", "z2n"], default="zN")
    common.add_argument("--size", type=int, help="N for Z_N")
    common.add_argument("--dim", type=int, help="n for Z_2^n")
    common.add_argument("--k", type=int)
    common.add_argument("--m-max", type=int)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget-nodes", type=int, default=cayley.DEFAULT_NODE_BUDGET)
    common.add_argument("--budget-subsets", type=int, default=DEFAULT_SUBSET_BUDGET)
    common.add_argument("--budget-subspaces", type=int, default=subspaces.DEFAULT_SUBSPACE_BUDGET)
    common.add_argument("--set-file")
    common.add_argument("--out")
    common.add_argument("--format", choices=["json", "csv"], default="json")

    p = argparse.ArgumentParser(prog="sumclique", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("census", parents=[common], help="count k-sets by restricted-sumset size")
    s.add_argument("--symmetry", action="store_true", help="count affine orbits instead of every subset")
    s.set_defaults(func=cmd_census)

    s = sub.add_parser("expect", parents=[common], help="expected number of k-cliques in G_A")
    s.add_argument("--symmetry", action="store_true")
    s.set_defaults(func=cmd_expect)

    s = sub.add_parser("clique", parents=[common], help="clique number of one Cayley sum graph")
    s.add_argument("--paley", action="store_true", help="use the quadratic residues mod a prime N")
    s.add_argument("--density", type=_fraction, default=Fraction(1, 2), help="density of a random A")
    s.add_argument("--complement", action="store_true", help="independence number instead")
    s.add_argument("--count-k", type=int, help="also count cliques of this size")
    s.add_argument("--edges-out", help="write the edge list here")
    s.set_defaults(func=cmd_clique)

    s = sub.add_parser("simulate", parents=[common], help="clique numbers of random graphs")
    s.add_argument("--trials", type=int, default=30)
    s.add_argument("--baseline", choices=["cayley", "binomial"], default="cayley")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("freiman", parents=[common], help="relations, dimension and classes of a set")
    s.add_argument("--integers", action="store_true", help="read the set file as integers")
    s.add_argument("--s", type=int, default=2, choices=list(freiman.SUPPORTED_ORDERS))
    s.add_argument("--classify", type=int, metavar="U", help="classify all k-subsets of {0..U-1}")
    s.add_argument("--method", choices=["relation_span", "definition_oracle"], default="relation_span")
    s.set_defaults(func=cmd_freiman)

    s = sub.add_parser("witness", parents=[common], help="sparse subset with nearly full restricted sumset")
    s.add_argument("--epsilon", type=_fraction, default=Fraction(1, 9))
    s.add_argument("--ap-length", type=int, help="use {0, ..., L-1} as the input set")
    s.add_argument("--retries", type=int, default=50)
    s.add_argument("--seven", action="store_true", help="return a subset with doubling at least 7")
    s.add_argument("--k-min", type=int, default=sampler.DEFAULT_K_MIN)
    s.set_defaults(func=cmd_witness)

    s = sub.add_parser("refine", parents=[common], help="popular-sum refinement of a set")
    s.add_argument("--ap-length", type=int)
    s.add_argument("--retries", type=int, default=100)
    s.set_defaults(func=cmd_refine)

    s = sub.add_parser("subspace", parents=[common], help="subspace counts and clique moments in Z_2^n")
    s.set_defaults(func=cmd_subspace)

    s = sub.add_parser("bounds", parents=[common], help="counting bounds and tail sums")
    s.set_defaults(func=cmd_bounds)

    s = sub.add_parser("rectify", parents=[common], help="dilate and translate a set of Z_p into a short interval")
    s.add_argument("--paley", action="store_true", help="use the quadratic residues mod a prime N")
    s.set_defaults(func=cmd_rectify)

    s = sub.add_parser("verify", parents=[common], help="run the verification suite")
    s.add_argument("--level", choices=["quick", "full"], default="quick")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (BudgetExceeded, sampler.WitnessFailure) as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except SystemExit as exc:
        return int(exc.code or 0)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
