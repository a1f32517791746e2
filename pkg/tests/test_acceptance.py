"""The eight acceptance criteria, each at its stated size and tolerance.

Every test prints one PASS/FAIL line; the lines are repeated in the pytest
terminal summary.  Seeds are fixed so a run is reproducible.
"""
import time

import pytest

import conftest
from lccdtt import suites
from lccdtt.fin_lcc import is_fibrant
from oracles import brute_fibrant, corpus

SEED = 0


def report(n, ok, detail):
    line = "criterion %d: %s  %s" % (n, "PASS" if ok else "FAIL", detail)
    print(line)
    conftest.LINES.append(line)
    return ok


@pytest.fixture(scope="module")
def runs():
    return {}


def run(runs, key, fn, *a, **k):
    if key not in runs:
        runs[key] = fn(*a, **k)
    return runs[key]


def test_1_strict_substitution(runs):
    R = run(runs, 1, suites.strict_substitution, SEED, 1000)
    ok = not R.failures and R.total("Equal") == 2000 and R.elapsed < 60
    assert report(1, ok, R.summary()), R.failures[:5]


def test_2_stability(runs):
    R = run(runs, 2, suites.stability, SEED, 1000)
    ok = not R.failures and all(R.counts[f]["Equal"] == 1000
                                for f in ("unit", "prod", "sigma", "pi"))
    assert report(2, ok, R.summary()), R.failures[:5]


def test_3_cwf_laws(runs):
    R = run(runs, 3, suites.cwf_laws, SEED, 500)
    ok = not R.failures and all(c["Equal"] == 500 for c in R.counts.values())
    assert report(3, ok, R.summary()), R.failures[:5]


def test_4_beta_eta(runs):
    R = run(runs, 4, suites.beta_eta, SEED, 400, 10000)
    enough = all(sum(c.values()) >= 200 for c in R.counts.values())
    ok = enough and not R.failures and R.small_unknown == 0
    assert report(4, ok, R.summary() + "; Unknown at size<=30: %d"
                  % R.small_unknown), R.failures[:5]


def test_5_soundness(runs):
    pairs = []
    for key, fn, a in ((1, suites.strict_substitution, (SEED, 1000)),
                       (2, suites.stability, (SEED, 1000)),
                       (3, suites.cwf_laws, (SEED, 500)),
                       (4, suites.beta_eta, (SEED, 400, 10000))):
        pairs += run(runs, key, fn, *a).pairs
    _R, steps = suites.rule_instances(SEED, 100)
    checked, skipped, failures = suites.soundness(pairs + steps, cap=100000)
    ok = not failures and checked > 0
    assert report(5, ok, "%d pairs + %d rule steps; %d evaluations, %d identical "
                  "pairs skipped, %d failures" % (len(pairs), len(steps), checked,
                                                 skipped, len(failures))), failures[:5]


def test_6_fibrancy_oracle():
    t0 = time.time()
    cats = corpus(SEED)
    bad = [name for name, C in cats if is_fibrant(C).ok != brute_fibrant(C)]
    small = all(len(C.objects) <= 5 for _n, C in cats)
    dt = time.time() - t0
    ok = not bad and len(cats) >= 50 and small and dt < 30
    assert report(6, ok, "%d categories, %d fibrant, %d disagreements, %.1fs"
                  % (len(cats), sum(brute_fibrant(C) for _n, C in cats),
                     len(bad), dt)), bad


def test_7_ab_equivalence():
    R = suites.ab_equivalence(SEED, 100, 10000, 100000)
    ok = not R.failures
    assert report(7, ok, R.summary()), R.failures[:5]


def test_8_bar_roundtrip():
    R = suites.bar_roundtrip(10)
    ok = not R.failures and R.count > 0
    assert report(8, ok, "%d morphism terms; " % R.count + R.summary()), R.failures[:5]
