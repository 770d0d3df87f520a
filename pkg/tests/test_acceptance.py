"""Acceptance criteria; each test prints one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the lines are repeated in
the "acceptance criteria" section of the terminal summary.
"""

import random
from itertools import combinations_with_replacement
from math import comb, prod

from _oracle import oracle_h0
from secantsv.claims import (A4_THRESHOLDS, A4OLD_THRESHOLDS, certify_tail, check_claim2,
                             claim1_construct, direct_table_check, verify_threshold_gap)
from secantsv.engine import Verdict, derive, expected_verdict, validate_certificate
from secantsv.linalg import DEFAULT_PRIMES, free_coordinates
from secantsv.scheme import (FIXED_POINT, FULL, HYPERPLANE, SchemeComponent, SchemeSpec,
                             double_points)
from secantsv.space import SegreVeronesePair, critical_z, h0
from secantsv.terracini import (Policy, Status, admissible_params, cohomology, defect_scan,
                                verify_lemma_instance)


def pair(dims, degs):
    return SegreVeronesePair(dims, degs)


def test_criterion_1_single_factor(criterion):
    c = criterion(1, "single factor P2")
    found, exact = {}, True
    for d in range(2, 7):
        scan = defect_scan(pair([2], [d]))
        found[d] = [v.z for v in scan if v.status is Status.PROBABLY_DEFECTIVE]
        for v in scan:
            if v.report is not None and v.status is Status.NOT_DEFECTIVE_CERTIFIED:
                exact &= v.report.rank == v.report.expected_rank
        if d in (3, 5, 6):
            exact &= all(v.status is Status.NOT_DEFECTIVE_CERTIFIED for v in scan)
    defective = sorted(d for d, zs in found.items() if zs)
    ok = defective == [2, 4] and exact and c.elapsed < 1.0
    c.finish(ok, f"defective degrees {defective} at z {found[2]}, {found[4]}; "
                 f"d=3,5,6 certified={exact}")


COMPUTER_CHECKS = (
    [((2, 2), (2, t)) for t in range(3, 10)]
    + [((2, 2, 2), (2, 2, 1)), ((2, 2, 2), (2, 2, 2)), ((2, 2, 1), (2, 2, 3)), ((2, 2, 1), (2, 2, 4))]
    + [((1, 1, 2), (2 * a, 2 * b, 2)) for a, b in [(2, 2), (3, 2), (4, 2), (5, 2), (3, 3)]]
    + [((1, 1, 2), (2 * a, 2, 2)) for a in range(2, 6)]
    + [((1, 2, 2), (t, 2, 2)) for t in (2, 3)]
    + [((3, 2), (3, 2)), ((1, 1, 1, 2), (2, 2, 2, 2))]
)


def test_criterion_2_computer_checks(criterion):
    c = criterion(2, "computer-checked pairs")
    failures, largest = [], (0, 0)
    for dims, degs in COMPUTER_CHECKS:
        x = pair(dims, degs)
        crit = critical_z(x)
        for v in defect_scan(x, [crit.z_lo, crit.z_hi]):
            rep = v.report
            n_sec, deg = h0(x), v.z * (x.dim + 1)
            largest = max(largest, (deg, n_sec))
            if v.status is not Status.NOT_DEFECTIVE_CERTIFIED or rep.rank != min(n_sec, deg):
                failures.append((x.text(), v.z))
    ok = not failures and c.elapsed < 60.0
    c.finish(ok, f"{len(COMPUTER_CHECKS)} pairs at both critical z, largest system "
                 f"{largest[0]}x{largest[1]}, failures {failures}")


# witnessing z -> defect, frozen from the scan and confirmed by the rational oracle
FROZEN_DEFECTS = {
    ((2, 2), (2, 2)): {7: 2, 8: 1},
    ((1, 1, 2), (2, 2, 2)): {11: 1},
}


def test_criterion_3_known_defective(criterion):
    c = criterion(3, "known defective products")
    ok, details = True, []
    for (dims, degs), frozen in FROZEN_DEFECTS.items():
        x = pair(dims, degs)
        scan = defect_scan(x)
        bad = {v.z: v.defect for v in scan if v.status is Status.PROBABLY_DEFECTIVE}
        agree = all(len(set(v.report.primes_used)) >= 2 and v.report.trials_used >= 3
                    for v in scan if v.status is Status.PROBABLY_DEFECTIVE)
        ok &= bad == frozen and agree and all(z <= critical_z(x).z_hi for z in bad)
        details.append(f"{x.text()} {bad}")
    # independent rational ranks at the witnessing z
    ok &= oracle_h0((2, 2), (2, 2), 7) == 36 - 33 and oracle_h0((1, 1, 2), (2, 2, 2), 11) == 1
    c.finish(ok, "; ".join(details))


def test_criterion_4_threshold_gap(criterion):
    c = criterion(4, "threshold table")
    gaps = {r: verify_threshold_gap(r).holds for r in range(2, 8)}
    c1 = claim1_construct(2, 60, 72)
    c2 = check_claim2(2, 60, 72, 43, 8)
    pinned = (c1.witness == {"x1": 43, "y1": 8}
              and c2.witness == {"z-x1-y1": 21, "ceil(alpha/(r+1))": 20} and c2.holds)
    ok = all(gaps.values()) and pinned and c.elapsed < 1.0
    c.finish(ok, f"gaps {[A4_THRESHOLDS[r] for r in gaps]} -> {[A4OLD_THRESHOLDS[r] for r in gaps]} "
                 f"verified {all(gaps.values())}; claim 1 (43,8), claim 2 21 >= 20: {pinned}")


def test_criterion_5_symbolic_tails(criterion):
    c = criterion(5, "symbolic tails")
    names = ["eqcon1", "eqcon2", "eqcon3", "eqcon4", "eq7", "eq8"]
    tails = {n: certify_tail(n).holds for n in names}
    direct = {n: direct_table_check(n).holds for n in names}
    ok = all(tails.values()) and all(direct.values()) and c.elapsed < 1.0
    c.finish(ok, f"r >= 8 certified {sorted(n for n, v in tails.items() if v)}; "
                 f"r = 2..7 direct {all(direct.values())}")


def test_criterion_6_lemma_instances(criterion):
    c = criterion(6, "lemma instances")
    bases = [pair([2], [3]), pair([2], [4]), pair([1, 1], [3, 3])]
    counts, ok = {}, True
    for lemma in ("a1a", "a1c", "a3a"):
        for base in bases:
            good = [p for p in admissible_params(lemma, base)
                    if (r := verify_lemma_instance(lemma, base, p)).hypotheses_hold
                    and r.conclusion_holds]
            counts[(lemma, base.text())] = len(good)
            ok &= len(good) >= 3
    # a1.2 asks for a base in the threshold table; the listed bases are not,
    # so its conclusion is checked on them and the full lemma on table bases
    concl = {}
    for base in bases:
        runs = [verify_lemma_instance("a1_2", base, p) for p in admissible_params("a1_2", base)]
        concl[base.text()] = sum(r.conclusion_holds for r in runs)
        ok &= concl[base.text()] >= 3
    full = {}
    for base in (pair([2], [10]), pair([2, 1], [3, 5]), pair([1, 1], [6, 8])):
        params = admissible_params("a1_2", base)[-3:]
        runs = [verify_lemma_instance("a1_2", base, p) for p in params]
        full[base.text()] = sum(r.hypotheses_hold and r.conclusion_holds for r in runs)
        ok &= full[base.text()] == 3
    least = min(counts.values())
    c.finish(ok, f"a1a/a1c/a3a >= {least} instances per base; a1.2 conclusion on listed bases "
                 f"{concl}, hypotheses fail there (not in the table); a1.2 full on table bases {full}")


def _sweep_pairs():
    singles = [(n, d) for n in (1, 2) for d in (2, 3, 4)]
    out = []
    for k in range(1, 7):
        for combo in combinations_with_replacement(singles, k):
            if prod(comb(n + d, n) for n, d in combo) <= 600:
                out.append(pair([n for n, _ in combo], [d for _, d in combo]))
    # P^m x P^n x (P^2)^k spot cases with a P^3 factor
    for combo in [((1, 3), (3, 3)), ((1, 4), (3, 3)), ((1, 3), (3, 4)), ((2, 3), (3, 3)),
                  ((3, 3), (3, 3)), ((1, 3), (3, 3), (2, 2)), ((1, 4), (3, 3), (2, 2)),
                  ((2, 3), (3, 3), (2, 2))]:
        x = pair([n for n, _ in combo], [d for _, d in combo])
        if h0(x) <= 600:
            out.append(x)
    return out


def test_criterion_7_classification_sweep(criterion):
    c = criterion(7, "classification sweep")
    pairs = _sweep_pairs()
    mismatches, invalid, uncovered = [], [], []
    for x in pairs:
        cert = derive(x)
        expected = expected_verdict(x)
        if expected is None:
            uncovered.append(x.text())
        elif cert.verdict is not expected:
            mismatches.append((x.text(), cert.verdict.value, expected.value))
        if cert.verdict is Verdict.NOT_DEFECTIVE and not validate_certificate(cert):
            invalid.append(x.text())
    ok = not mismatches and not invalid and not uncovered and c.elapsed < 300.0
    c.finish(ok, f"{len(pairs)} pairs, mismatches {mismatches}, invalid certificates {invalid}, "
                 f"uncovered {uncovered}")


def _random_scheme(rng):
    k = rng.randint(1, 3)
    dims = [rng.randint(1, 3) for _ in range(k)]
    degs = [rng.randint(1, 3) for _ in range(k)]
    x = pair(dims, degs)
    comps, pinned = [], False
    for _ in range(rng.randint(0, 6)):
        cons = tuple(rng.choice([FULL, HYPERPLANE, FIXED_POINT]) for _ in range(k))
        if free_coordinates(cons, dims) == 0:
            # two points pinned to the same anchor would coincide
            if pinned:
                continue
            pinned = True
        comps.append(SchemeComponent(rng.choice([1, 2]), cons))
    return SchemeSpec(x, tuple(comps))


def test_criterion_8_oracles_and_euler(criterion):
    c = criterion(8, "oracles and Euler bookkeeping")
    line = cohomology(pair([2], [2]), double_points(pair([2], [2]), 2)).h0
    conic = cohomology(pair([2], [4]), double_points(pair([2], [4]), 5)).h0
    oracles = oracle_h0((2,), (2,), 2) == line == 1 and oracle_h0((2,), (4,), 5) == conic == 1
    rng = random.Random(2024)
    policy = Policy(trials=1, primes=(DEFAULT_PRIMES[0],))
    violations = 0
    for _ in range(1000):
        s = _random_scheme(rng)
        rep = cohomology(s.pair, s, policy)
        violations += rep.h0 - rep.h1 != h0(s.pair) - s.total_degree
    ok = oracles and violations == 0
    c.finish(ok, f"double line h0={line}, double conic h0={conic}, oracle agrees {oracles}; "
                 f"Euler violations {violations}/1000")
