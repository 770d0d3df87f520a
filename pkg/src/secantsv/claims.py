"""Exact integer checks behind the P^2-extension induction.

Everything here is plain integer arithmetic.  The claims take a base of
dimension ``r`` with ``alpha`` sections and a number ``z`` of double
points; witnesses are returned as dicts so they can be replayed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Optional, Sequence

# lowest alpha covered by the extension theorem, r = 2..7
A4_THRESHOLDS = {2: 60, 3: 60, 4: 98, 5: 133, 6: 176, 7: 231}
# thresholds of the first version of the argument, before the gap check
A4OLD_THRESHOLDS = {2: 71, 3: 75, 4: 99, 5: 138, 6: 183, 7: 234}
# 81 * (alpha threshold) for r >= 8
TAIL_THRESHOLD_81 = (79, 210, 144, 27)


@dataclass
class ClaimResult:
    holds: bool
    witness: Optional[dict] = None
    checks: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"holds": self.holds, "witness": self.witness, "checks": dict(self.checks)}


def _fdiv(a: int, b: int) -> int:
    return a // b


def _cdiv(a: int, b: int) -> int:
    return -(-a // b)


def alpha_threshold(r: int) -> int:
    """Smallest integer alpha in the extension theorem's range for this r."""
    if r in A4_THRESHOLDS:
        return A4_THRESHOLDS[r]
    if r >= 8:
        return _cdiv(poly_eval(TAIL_THRESHOLD_81, r), 81)
    raise ValueError(f"no threshold for r={r}")


def meets_threshold(r: int, alpha: int) -> bool:
    try:
        return alpha >= alpha_threshold(r)
    except ValueError:
        return False


def critical_pair(alpha_times: int, r: int) -> tuple[int, int]:
    """(floor, ceil) of alpha_times / (r+3)."""
    return _fdiv(alpha_times, r + 3), _cdiv(alpha_times, r + 3)


# -- Claim 1 / Claim 2 ------------------------------------------------------

def claim1_inequalities(r: int, alpha: int, z: int, x1: int, y1: int) -> dict:
    return {
        "(r+2)x1+y1 = 3alpha": (r + 2) * x1 + y1 == 3 * alpha,
        "x1+y1 <= z": x1 + y1 <= z,
        "2r+2 <= y1 <= floor(alpha/(r+1))": 2 * r + 2 <= y1 <= _fdiv(alpha, r + 1),
        "(r+2)(z-x1-y1)+y1 <= 2alpha": (r + 2) * (z - x1 - y1) + y1 <= 2 * alpha,
        "z-x1-y1 <= alpha-(r+1)y1": z - x1 - y1 <= alpha - (r + 1) * y1,
        "x1 >= 0": x1 >= 0,
    }


def claim1_construct(r: int, alpha: int, z: int) -> ClaimResult:
    """Smallest y1 >= 2r+2 with y1 = 3alpha mod (r+2) and
    (r+2)(z-x1-y1)+y1 <= 2alpha, where (r+2)x1 + y1 = 3alpha; searched up
    to floor(alpha/(r+1))."""
    m = r + 2
    y = 2 * r + 2
    y += (3 * alpha - y) % m
    y_max = _fdiv(alpha, r + 1)
    while y <= y_max:
        x = (3 * alpha - y) // m
        if m * (z - x - y) + y <= 2 * alpha:
            checks = claim1_inequalities(r, alpha, z, x, y)
            return ClaimResult(all(checks.values()), {"x1": x, "y1": y}, checks)
        y += m
    return ClaimResult(False, None, {"construction": False})


def check_claim2(r: int, alpha: int, z: int, x1: int, y1: int) -> ClaimResult:
    lhs, rhs = z - x1 - y1, _cdiv(alpha, r + 1)
    ok = lhs >= rhs
    return ClaimResult(ok, {"z-x1-y1": lhs, "ceil(alpha/(r+1))": rhs},
                       {"z-x1-y1 >= ceil(alpha/(r+1))": ok})


# -- Claim 3 ----------------------------------------------------------------

def check_claim3(r: int, alpha: int) -> ClaimResult:
    a = _fdiv(4 * alpha, r + 2)
    b = 4 * alpha - (r + 2) * a
    z = _cdiv(10 * alpha, r + 3)
    zp = z - a - b
    z1 = _fdiv(6 * alpha, r + 3)
    witness = {"a": a, "b": b, "z": z, "z_prime": zp, "z1": z1}
    c1 = claim1_construct(r, alpha, z1)
    if c1.witness is None:
        return ClaimResult(False, witness, {"claim1 at z1": False})
    x1, y1 = c1.witness["x1"], c1.witness["y1"]
    zbar = zp - z1 + x1
    witness.update({"x1": x1, "y1": y1, "z_bar": zbar})
    checks = {"claim1 at z1": c1.holds, "z_bar >= 0": zbar >= 0}
    return ClaimResult(all(checks.values()), witness, checks)


# -- Claim 11 ---------------------------------------------------------------

def check_claim11(r: int, alpha: int, t: int) -> ClaimResult:
    if t < 3:
        raise ValueError("Claim 11 concerns t >= 3")
    a = _fdiv((t + 1) * alpha, r + 2)
    b = (t + 1) * alpha - (r + 2) * a
    lo, hi = critical_pair(comb(t + 2, 2) * alpha, r)
    checks = {f"z={lo} >= a+b": lo >= a + b, f"z={hi} >= a+b": hi >= a + b}
    return ClaimResult(all(checks.values()), {"a": a, "b": b, "z_lo": lo, "z_hi": hi}, checks)


# -- Claim 7 ----------------------------------------------------------------

def check_claim7(a_geom: int) -> ClaimResult:
    """Integer part of the (2a, 2, 2) step on P1 x P1 x P2, a >= 6."""
    if a_geom < 6:
        raise ValueError("Claim 7 assumes a >= 6")
    s = 2 * a_geom + 1
    zbar = _fdiv(9 * s, 4)
    ztil = 9 * s - 4 * zbar
    z_lo, z_hi = _fdiv(18 * s, 5), _cdiv(18 * s, 5)
    checks: dict = {
        "floor(3(2a+1)/4) <= 2a": _fdiv(3 * s, 4) <= 2 * a_geom,
        "z_tilde <= 2a": ztil <= 2 * a_geom,
    }
    for z in sorted({z_lo, z_hi}):
        zp = z - zbar - ztil
        checks[f"cl7_eq0 z={z}: z' >= 2a+2"] = zp >= 2 * a_geom + 2
        checks[f"cl7_eq1 z={z}"] = 4 * zp <= 6 * s - 6
        checks[f"cl7_eq2 z={z}"] = 4 * zp + ztil <= 6 * s
        checks[f"cl7_eq3 z={z}"] = ztil <= s
        checks[f"cl7_eq4 z={z}"] = zp <= 3 * s - 3 * ztil
    witness = {"z_bar": zbar, "z_tilde": ztil, "z_lo": z_lo, "z_hi": z_hi,
               "z_prime_lo": z_lo - zbar - ztil, "z_prime_hi": z_hi - zbar - ztil}
    return ClaimResult(all(checks.values()), witness, checks)


# -- threshold table --------------------------------------------------------

def check_alpha(r: int, alpha: int) -> ClaimResult:
    """Claims 1, 2 at both z in {floor, ceil}(6alpha/(r+3)) and Claim 3."""
    checks: dict = {}
    witness: dict = {}
    for z in sorted(set(critical_pair(6 * alpha, r))):
        c1 = claim1_construct(r, alpha, z)
        checks[f"claim1 z={z}"] = c1.holds
        if c1.witness is None:
            checks[f"claim2 z={z}"] = False
            continue
        witness[f"z={z}"] = c1.witness
        checks[f"claim2 z={z}"] = check_claim2(r, alpha, z, **c1.witness).holds
    checks["claim3"] = check_claim3(r, alpha).holds
    return ClaimResult(all(checks.values()), witness, checks)


def verify_threshold_gap(r: int) -> ClaimResult:
    """Claims 1-3 for every alpha between the two threshold tables."""
    if r not in A4_THRESHOLDS:
        raise ValueError(f"threshold gap is tabulated for r=2..7, got r={r}")
    alphas = list(range(A4_THRESHOLDS[r], A4OLD_THRESHOLDS[r]))
    failures = {}
    for alpha in alphas:
        res = check_alpha(r, alpha)
        if not res.holds:
            failures[alpha] = [k for k, v in res.checks.items() if not v]
    return ClaimResult(not failures, {"alphas": alphas, "failures": failures},
                       {f"alpha={a}": a not in failures for a in alphas})


# -- polynomial tails -------------------------------------------------------
# Polynomials are coefficient tuples, constant term first.

def poly_trim(p: Sequence[int]) -> tuple[int, ...]:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def poly_eval(p: Sequence[int], x: int) -> int:
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_add(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    n = max(len(p), len(q))
    return poly_trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0)
                      for i in range(n)])


def poly_scale(p: Sequence[int], c: int) -> tuple[int, ...]:
    return poly_trim([c * a for a in p])


def poly_mul(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    if not p or not q:
        return ()
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return poly_trim(out)


def poly_sub(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    return poly_add(p, poly_scale(q, -1))


def poly_nonneg_over_integer_tail(p: Sequence[int], r0: int) -> bool:
    """True iff p(n) >= 0 for every integer n >= r0.

    Beyond the Cauchy bound 1 + max|a_i|/|a_lead| the sign is the leading
    coefficient's, so only the integers below it need evaluating.
    """
    p = poly_trim(p)
    if not p:
        return True
    lead = p[-1]
    if lead < 0:
        return False
    bound = 1 + _cdiv(max(abs(c) for c in p[:-1]), lead) if len(p) > 1 else 0
    return all(poly_eval(p, n) >= 0 for n in range(r0, max(r0, bound) + 1))


@dataclass(frozen=True)
class LinearAlphaInequality:
    """alpha * coeff(r) >= rhs(r), with a name from the proof it serves."""

    name: str
    coeff: tuple[int, ...]
    rhs: tuple[int, ...]

    def holds(self, r: int, alpha: int) -> bool:
        return alpha * poly_eval(self.coeff, r) >= poly_eval(self.rhs, r)

    def tail_polynomial(self) -> tuple[int, ...]:
        """81 * (coeff(r) * threshold(r) - rhs(r)) at the r >= 8 threshold."""
        return poly_sub(poly_mul(self.coeff, TAIL_THRESHOLD_81), poly_scale(self.rhs, 81))


def _p(*coeffs: int) -> tuple[int, ...]:
    """Coefficients written highest degree first."""
    return poly_trim(tuple(reversed(coeffs)))


_R = (0, 1)
_RP1_CUBED = poly_mul(poly_mul((1, 1), (1, 1)), (1, 1))

INEQUALITIES: dict[str, LinearAlphaInequality] = {
    ineq.name: ineq
    for ineq in [
        LinearAlphaInequality("eqcon1", _p(5, 3), _p(1, 7, 15, 11, 4)),
        LinearAlphaInequality("eqcon2", _p(1, 2, 3), _p(3, 18, 37, 34, 13)),
        LinearAlphaInequality("eqcon3", _p(3, 8, 3), _p(1, 8, 23, 29, 15, 1)),
        LinearAlphaInequality("eqcon4", _p(2, 0), _p(1, 4, 4)),
        # 3r^2 + 12r + 11 - 4alpha < 0 over the integers
        LinearAlphaInequality("eq7", _p(4), _p(3, 12, 12)),
        LinearAlphaInequality(
            "eq8", _p(2, 1, -3, 0),
            poly_add(_p(2, 10, 14, 4, 0),
                     poly_mul(poly_scale(_R, 3), poly_mul(_RP1_CUBED, (3, 1))))),
        LinearAlphaInequality("claim1_alpha_floor", _p(1), _p(3, 7, 3)),
        LinearAlphaInequality("claim2_case2", _p(1, 2, 2, 3), _p(1, 10, 32, 39, 15, 1)),
        LinearAlphaInequality("claim3", _p(3, 7, 2), _p(1, 6, 12, 10, 3)),
        LinearAlphaInequality(
            "claim11_t3", _p(12, 16),
            poly_add(poly_scale(poly_mul(poly_mul((1, 1), (1, 1)), (3, 1)), 2),
                     poly_scale(poly_mul((2, 1), (2, 1)), 2))),
        LinearAlphaInequality("a5_t3", _p(3, -1), _p(1, 5, 8, 5)),
        LinearAlphaInequality("alpha > (r+1)^2", _p(1), _p(1, 2, 2)),
    ]
}


def certify_tail(name: str, r0: int = 8) -> ClaimResult:
    """Inequality ``name`` for every integer r >= r0 and every integer alpha at
    or above the r >= 8 threshold."""
    ineq = INEQUALITIES[name]
    monotone = poly_nonneg_over_integer_tail(ineq.coeff, r0)
    tail = poly_nonneg_over_integer_tail(ineq.tail_polynomial(), r0)
    return ClaimResult(monotone and tail,
                       {"tail_polynomial": list(ineq.tail_polynomial())},
                       {"alpha coefficient >= 0": monotone, "tail >= 0": tail})


def direct_table_check(name: str, thresholds: Optional[dict] = None) -> ClaimResult:
    """Inequality ``name`` at the threshold alpha for r = 2..7 (enough since
    the alpha coefficient is positive there)."""
    thresholds = A4OLD_THRESHOLDS if thresholds is None else thresholds
    ineq = INEQUALITIES[name]
    checks = {}
    for r, alpha in sorted(thresholds.items()):
        checks[f"r={r} alpha={alpha}"] = (poly_eval(ineq.coeff, r) > 0
                                          and ineq.holds(r, alpha))
    return ClaimResult(all(checks.values()), None, checks)


def threshold_table() -> list[dict]:
    rows = []
    for r in sorted(A4_THRESHOLDS):
        gap = verify_threshold_gap(r)
        rows.append({"r": r, "alpha_min": A4_THRESHOLDS[r],
                     "alpha_min_old": A4OLD_THRESHOLDS[r],
                     "gap_alphas": gap.witness["alphas"], "gap_verified": gap.holds})
    rows.append({"r": ">=8", "alpha_min": "(27r^3+144r^2+210r+79)/81",
                 "alpha_min_old": "(27r^3+144r^2+210r+79)/81",
                 "gap_alphas": [], "gap_verified": True})
    return rows
