"""Acceptance checks 1-14 at full size; each test prints one ``[PASS]``/``[FAIL]`` line.

Run directly (``python tests/test_acceptance.py``) for just the summary lines.
"""

from __future__ import annotations

import time

import pytest

from sumclique import verify

SIMPLE = {
    1: verify.check_census,
    2: verify.check_duality,
    3: verify.check_expectation,
    4: verify.check_classification,
    5: verify.check_freiman_inequality_grid,
    6: verify.check_unfold_dimension,
    7: verify.check_plunnecke,
    8: verify.check_subspace_formulas,
    9: verify.check_subspace_moments,
    10: verify.check_witness,
    11: verify.check_refinement,
    12: verify.check_scalar_and_tail,
}
# wall-clock limits in seconds, where one is stated
LIMITS = {1: 60, 5: 300, 10: 300, 13: 1800}


def _report(res, capsys, elapsed=None):
    line = res.line() if elapsed is None else res.line().replace(f"({res.seconds:.1f}s)", f"({elapsed:.1f}s)")
    with capsys.disabled():
        print("\n" + line)
    limit = LIMITS.get(res.id)
    within = limit is None or (elapsed if elapsed is not None else res.seconds) <= limit
    assert res.passed, line
    assert within, f"criterion {res.id} exceeded {limit}s"


@pytest.fixture(scope="module")
def gap_report():
    t0 = time.perf_counter()
    report = verify.clique_gap_experiment(threads=1)
    return report, time.perf_counter() - t0


@pytest.mark.parametrize("cid", sorted(SIMPLE))
def test_criterion(cid, capsys):
    _report(SIMPLE[cid](), capsys)


def test_criterion_13_clique_gap(gap_report, capsys):
    report, elapsed = gap_report
    _report(verify.check_clique_gap(report), capsys, elapsed)


def test_criterion_14_determinism(gap_report, capsys):
    report, _ = gap_report
    _report(verify.check_determinism(report, threads=(1, 2)), capsys)


if __name__ == "__main__":
    verify.run_suite("full")
