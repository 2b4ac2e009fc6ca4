"""Acceptance criteria 1-9 at their stated tolerances.

Thresholds are written out here rather than read from ``RunConfig`` so that
changing a default can never loosen a criterion. Run directly with
``python3 tests/test_acceptance.py`` for the pass/fail summary alone.
"""

import sys
import time

import pytest

from computable_ga import lattice as lt
from computable_ga.cli import main
from computable_ga.suite import (
    RunConfig,
    algebra_oracle,
    computability_verdicts,
    gauge_invariance,
    grade_projection_equivalence,
    noether_probes,
    obto_cancellation,
    representation_validation,
    vectorized_expectation_check,
)

CFG = RunConfig()
EXACT = 1e-12


@pytest.fixture(scope="module")
def conf():
    return lt.Configuration.random(CFG.seed, length=CFG.length)


def by_name(results):
    return {r.name: r for r in results}


def test_criterion_1_algebra_oracle(record_property):
    record_property("criterion", "1. algebra oracle equivalence")
    t0 = time.perf_counter()
    r = algebra_oracle(CFG)
    elapsed = time.perf_counter() - t0
    assert CFG.samples == 1000
    assert r.metrics["max_error"] <= EXACT
    assert elapsed < 1.0


def test_criterion_2_representation_validation(record_property):
    record_property("criterion", "2. representation validation")
    r = representation_validation(CFG)
    assert set(r.metrics) == {"pauli-2x2", "block-4x4"}
    assert max(r.metrics.values()) <= EXACT


def test_criterion_3_grade_projection_equivalence(record_property):
    record_property("criterion", "3. grade-projection equivalence")
    assert grade_projection_equivalence(CFG).metrics["max_error"] <= EXACT


def test_criterion_4_vectorized_expectation(record_property):
    record_property("criterion", "4. vectorized expectation")
    m = vectorized_expectation_check(CFG).metrics
    assert m["identity_error"] <= EXACT
    assert m["invariance_error"] <= EXACT
    assert m["witness_change"] >= 1e-3


def test_criterion_5_computability_verdicts(record_property):
    record_property("criterion", "5. computability verdicts")
    m = computability_verdicts(CFG).metrics
    assert m == {
        "covariant-observable": True,
        "reference-vector": False,
        "free-hamiltonian": False,
        "h-plus": True,
        "h-minus": True,
    }


def test_criterion_6_obto_cancellation(record_property, conf):
    record_property("criterion", "6. OBTO cancellation numerics")
    assert CFG.n == 16 and CFG.ladder == (16, 32, 64)
    t0 = time.perf_counter()
    results = by_name(obto_cancellation(CFG, conf, []))
    elapsed = time.perf_counter() - t0
    for v in lt.VARIANTS:
        m = results[f"obto cancellation ({v})"].metrics
        assert m["homogeneous_residual"] <= EXACT
        orders = [m["order_1"], m["order_2"]]
        assert all(abs(o - 2.0) <= 0.3 for o in orders), orders
    assert elapsed < 30.0


def test_criterion_7_gauge_invariance(record_property, conf):
    record_property("criterion", "7. gauge invariance")
    results = by_name(gauge_invariance(CFG, conf, []))
    plus = results["gauge invariance (plus)"].metrics
    assert all(abs(plus[k] - 2.0) <= 0.3 for k in ("order_1", "order_2"))
    minus = results["gauge non-invariance (minus)"].metrics
    assert minus["limit_residual"] >= 1e-3
    assert minus["relative_drift"] <= 0.05


def test_criterion_8_noether_probes(record_property, conf):
    record_property("criterion", "8. Noether probes")
    assert (CFG.eps, CFG.momentum_n) == (1e-4, 32)
    results = by_name(noether_probes(CFG, conf, []))
    for v in lt.VARIANTS:
        assert results[f"momentum probe ({v})"].metrics["relative_error"] <= 1e-2
    spin = results["spin probe"].metrics
    assert spin["sign_flip_sum"] <= EXACT
    assert spin["relative_error"] <= 1e-2
    assert abs(spin["spin_plus"]) > 0


def test_criterion_9_determinism(record_property, tmp_path, capsys):
    record_property("criterion", "9. determinism")
    for name in ("first", "second"):
        assert main(["verify", "--seed", "1", "--out", str(tmp_path / name)]) == 0
    capsys.readouterr()
    first = (tmp_path / "first.json").read_bytes()
    assert first == (tmp_path / "second.json").read_bytes()
    assert b'"seed": 1' in first


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
