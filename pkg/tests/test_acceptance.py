"""Acceptance suite: the full certification run at n = 128, seed 42."""
import time

import pytest

from twomuhs.verification import run_verification

CRITERIA = {
    1: "formulation equivalence",
    2: "coadjoint identity",
    3: "cocycle suite",
    4: "bihamiltonian certification",
    5: "gradient oracles",
    6: "conservation",
    7: "Lax certification",
    8: "variational certification",
    9: "Legendre correspondence",
    10: "muHS reduction",
}


@pytest.fixture(scope="module")
def report(request):
    start = time.perf_counter()
    rep = run_verification(n=128, seed=42, profile="default")
    elapsed = time.perf_counter() - start
    capman = request.config.pluginmanager.getplugin("capturemanager")
    with capman.global_and_fixture_disabled():
        print()
        for k, label in CRITERIA.items():
            status = "PASS" if rep.criterion_passed(k) else "FAIL"
            worst = [c for c in rep.checks if c.criterion == k]
            print(f"criterion {k:2d} {label:<30s} {status}  "
                  + "; ".join(f"{c.name}={c.residual:.2e}{c.comparison}{c.tolerance:.0e}" for c in worst))
        print(f"verification runtime {elapsed:.1f} s")
    rep.elapsed = elapsed
    return rep


@pytest.mark.parametrize("criterion", sorted(CRITERIA))
def test_criterion(report, criterion):
    failing = [c.line() for c in report.checks if c.criterion == criterion and not c.passed]
    assert [c for c in report.checks if c.criterion == criterion]
    assert not failing, failing


def test_runtime_budget(report):
    assert report.elapsed <= 60.0


def test_report_overall_flag(report):
    assert report.passed == all(c.passed for c in report.checks)
    d = report.to_dict()
    assert d["summary"]["total"] == len(report.checks)
    assert d["settings"] == {"n": 128, "seed": 42, "profile": "default", "criteria": list(range(1, 11))}
