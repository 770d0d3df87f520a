"""Non-defectivity derivations with replayable certificates.

A derivation combines three things: facts from a small database of known
classifications, the two product rules (a P^1 factor added to a base with
many sections, a P^2 factor added to a base in the threshold table) and a
Terracini rank check at the critical z values when the pair is small.
Deficient ranks never produce a certificate; defective verdicts come from
the database only.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Callable, Iterable, NamedTuple, Optional, Union

from .claims import meets_threshold
from .scheme import double_points
from .space import SegreVeronesePair, critical_z, h0
from .terracini import (DEFAULT_POLICY, Policy, RankCache, Status, defect_scan,
                        rank_at, z_report)

CERT_VERSION = "cert-v1"
DEFAULT_BUDGET = 600


class Verdict(str, enum.Enum):
    NOT_DEFECTIVE = "NOT_DEFECTIVE"
    DEFECTIVE = "DEFECTIVE"
    INCONCLUSIVE = "INCONCLUSIVE"


class Source(str, enum.Enum):
    AH = "AH"
    LP = "LP"
    GO = "GO"
    CGG = "CGG"
    BAUR_DRAISMA = "BAUR_DRAISMA"
    PAPER_COMPUTER_CHECK = "PAPER_COMPUTER_CHECK"
    # classification theorems proved by the induction itself; off by default
    PAPER_THEOREM = "PAPER_THEOREM"


class Rule(str, enum.Enum):
    RULE_A41 = "RULE_A41"
    RULE_A5 = "RULE_A5"
    RULE_P1ORP2 = "RULE_P1ORP2"
    DB_LOOKUP = "DB_LOOKUP"
    NUMERIC_CHECK = "NUMERIC_CHECK"
    INCONCLUSIVE = "INCONCLUSIVE"


# -- known facts ----------------------------------------------------------

Factors = tuple[tuple[int, int], ...]   # sorted (n, d) descending


def _factors(pair: SegreVeronesePair) -> Factors:
    return tuple(sorted(zip(pair.factor_dims, pair.multidegree), reverse=True))


@dataclass(frozen=True)
class KnownFact:
    pattern: str
    source: Source
    # returns a verdict when the pair lies in the family, else None
    classify: Callable[[Factors], Optional[Verdict]]


def _ah(f: Factors) -> Optional[Verdict]:
    if len(f) != 1:
        return None
    n, d = f[0]
    if n == 1 or d == 1:
        return Verdict.NOT_DEFECTIVE
    if d == 2 or (n, d) in {(2, 4), (3, 4), (4, 3), (4, 4)}:
        return Verdict.DEFECTIVE
    return Verdict.NOT_DEFECTIVE


def _lp(f: Factors) -> Optional[Verdict]:
    if len(f) < 2 or any(n != 1 or d < 2 for n, d in f):
        return None
    degs = sorted(d for _, d in f)
    if len(degs) == 2 and degs[0] == 2 and degs[1] % 2 == 0:
        return Verdict.DEFECTIVE
    if degs == [2, 2, 2]:
        return Verdict.DEFECTIVE
    return Verdict.NOT_DEFECTIVE


def _go(f: Factors) -> Optional[Verdict]:
    if len(f) == 2 and all(d >= 3 for _, d in f):
        return Verdict.NOT_DEFECTIVE
    return None


_CGG_PAIRS = {((2, 2), (2, 2)), ((2, 2), (1, 2), (1, 2))}


def _cgg(f: Factors) -> Optional[Verdict]:
    return Verdict.DEFECTIVE if f in _CGG_PAIRS else None


def _baur_draisma(f: Factors) -> Optional[Verdict]:
    if len(f) != 2 or [n for n, _ in f] != [2, 1]:
        return None
    t, s = f[0][1], f[1][1]
    if s < 2 or t < 2:
        return None
    return Verdict.DEFECTIVE if t == 2 and s % 2 == 0 else Verdict.NOT_DEFECTIVE


def _norm(*pairs: tuple[int, int]) -> Factors:
    return tuple(sorted(pairs, reverse=True))


COMPUTER_CHECKED: frozenset[Factors] = frozenset(
    [_norm((2, 2), (2, t)) for t in range(3, 10)]
    + [_norm((2, 2), (2, 2), (2, 1)), _norm((2, 2), (2, 2), (2, 2)),
       _norm((2, 2), (2, 2), (1, 3)), _norm((2, 2), (2, 2), (1, 4))]
    + [_norm((1, 2 * a), (1, 2 * b), (2, 2))
       for a, b in [(2, 2), (3, 2), (4, 2), (5, 2), (3, 3)]]
    + [_norm((1, 2 * a), (1, 2), (2, 2)) for a in range(2, 6)]
    + [_norm((1, t), (2, 2), (2, 2)) for t in (2, 3)]
    + [_norm((3, 3), (2, 2)), _norm((1, 2), (1, 2), (1, 2), (2, 2))]
)


def _computer_check(f: Factors) -> Optional[Verdict]:
    return Verdict.NOT_DEFECTIVE if f in COMPUTER_CHECKED else None


def _p1_p2_theorem(f: Factors) -> Optional[Verdict]:
    if any(n not in (1, 2) or d < 2 for n, d in f):
        return None
    s = sorted(d for n, d in f if n == 1)
    t = sorted(d for n, d in f if n == 2)
    j, k = len(s), len(t)
    defective = (
        (j == 0 and k == 1 and t[0] in (2, 4))
        or (j == 0 and k == 2 and t == [2, 2])
        or (j == 2 and k == 0 and s[0] == 2 and s[1] % 2 == 0)
        or (j == 3 and k == 0 and s == [2, 2, 2])
        or (j == 1 and k == 1 and s[0] % 2 == 0 and t[0] == 2)
        or (j == 2 and k == 1 and s == [2, 2] and t == [2])
    )
    return Verdict.DEFECTIVE if defective else Verdict.NOT_DEFECTIVE


def _mn2_theorem(f: Factors) -> Optional[Verdict]:
    big = [(n, d) for n, d in f if d >= 3]
    rest = list(f)
    # choose P^m x P^n with d, e >= 3; the remaining factors must be P^2, t >= 2
    for i in range(len(big)):
        for j in range(i + 1, len(big)):
            others = list(rest)
            others.remove(big[i])
            others.remove(big[j])
            if all(n == 2 and d >= 2 for n, d in others):
                return Verdict.NOT_DEFECTIVE
    return None


FACTS: tuple[KnownFact, ...] = (
    KnownFact("one factor P^n, degree d", Source.AH, _ah),
    KnownFact("(P^1)^j, all degrees >= 2", Source.LP, _lp),
    KnownFact("P^m x P^n, degrees >= 3", Source.GO, _go),
    KnownFact("P2xP2 deg (2,2), P2xP1xP1 deg (2,2,2)", Source.CGG, _cgg),
    KnownFact("P2xP1, degrees >= 2", Source.BAUR_DRAISMA, _baur_draisma),
    KnownFact("computer-checked small pairs", Source.PAPER_COMPUTER_CHECK, _computer_check),
)

THEOREM_FACTS: tuple[KnownFact, ...] = (
    KnownFact("(P^1)^j x (P^2)^k, all degrees >= 2", Source.PAPER_THEOREM, _p1_p2_theorem),
    KnownFact("P^m x P^n x (P^2)^k, d, e >= 3, t_i >= 2", Source.PAPER_THEOREM, _mn2_theorem),
)


class Match(NamedTuple):
    verdict: Verdict
    source: Source
    pattern: str


def _matches(f: Factors, facts: Iterable[KnownFact]) -> list[Match]:
    out = []
    for fact in facts:
        v = fact.classify(f)
        if v is not None:
            out.append(Match(v, fact.source, fact.pattern))
    return out


@lru_cache(maxsize=1)
def check_database(max_dim: int = 4, max_degree: int = 6, max_factors: int = 4) -> int:
    """Raise if some pair gets contradictory verdicts; returns pairs checked."""
    singles = [(n, d) for n in range(1, max_dim + 1) for d in range(1, max_degree + 1)]
    checked = 0
    for k in range(1, max_factors + 1):
        for combo in combinations_with_replacement(singles, k):
            f = tuple(sorted(combo, reverse=True))
            verdicts = {m.verdict for m in _matches(f, FACTS + THEOREM_FACTS)}
            if len(verdicts) > 1:
                raise RuntimeError(f"contradictory facts for {f}")
            checked += 1
    return checked


def lookup(pair: SegreVeronesePair, theorems: bool = False) -> Optional[Match]:
    """Known verdict for ``pair``; ``theorems`` also consults the P^1/P^2 and
    P^m x P^n x (P^2)^k classifications derived by the induction."""
    check_database()
    if any(d < 1 for d in pair.multidegree):
        return None
    found = _matches(_factors(pair), FACTS + (THEOREM_FACTS if theorems else ()))
    return found[0] if found else None


# -- certificates ---------------------------------------------------------

class CertificateError(ValueError):
    pass


@dataclass
class Certificate:
    pair: SegreVeronesePair
    verdict: Verdict
    rule: Rule
    hypotheses: dict = field(default_factory=dict)
    seeds: list = field(default_factory=list)
    prime: Optional[int] = None
    children: list["Certificate"] = field(default_factory=list)

    def leaves(self) -> list["Certificate"]:
        if not self.children:
            return [self]
        return [leaf for c in self.children for leaf in c.leaves()]

    def to_dict(self, root: bool = True) -> dict:
        out = {
            "pair": {"factors": list(self.pair.factor_dims),
                     "degrees": list(self.pair.multidegree),
                     "text": self.pair.text()},
            "verdict": self.verdict.value,
            "rule": self.rule.value,
            "hypotheses": self.hypotheses,
            "seeds": list(self.seeds),
            "prime": self.prime,
            "children": [c.to_dict(root=False) for c in self.children],
        }
        if root:
            out = {"version": CERT_VERSION, **out}
        return out

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict) -> "Certificate":
        if not isinstance(data, dict) or not data:
            raise CertificateError("empty certificate")
        if "version" in data and data["version"] != CERT_VERSION:
            raise CertificateError(f"unsupported certificate version {data['version']!r}")
        try:
            p = data["pair"]
            pair = SegreVeronesePair(p["factors"], p["degrees"])
            node = cls(pair, Verdict(data["verdict"]), Rule(data["rule"]),
                       dict(data.get("hypotheses", {})), list(data.get("seeds", [])),
                       data.get("prime"),
                       [cls.from_dict(c) for c in data.get("children", [])])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, CertificateError):
                raise
            raise CertificateError(f"malformed certificate node: {exc}") from exc
        return node


# -- rule hypotheses ------------------------------------------------------

@dataclass
class RuleCheck:
    applicable: bool
    hypotheses: dict
    base_certificate: Optional[Certificate] = None


def _a41_numeric(r: int, alpha: int) -> dict:
    return {"r": r, "alpha": alpha, "r > 1": r > 1, "alpha > (r+1)^2": alpha > (r + 1) ** 2}


def _a5_numeric(r: int, alpha: int) -> dict:
    return {"r": r, "alpha": alpha, "(r, alpha) in threshold table": meets_threshold(r, alpha)}


def _numeric_ok(hyp: dict) -> bool:
    return all(v for v in hyp.values() if isinstance(v, bool))


def rule_a41_applicable(base: SegreVeronesePair, budget: int = DEFAULT_BUDGET,
                        policy: Policy = DEFAULT_POLICY,
                        cache: Optional[RankCache] = None) -> RuleCheck:
    """Whether base x P^1 with degree t >= 2 is licensed as not defective."""
    hyp = _a41_numeric(base.dim, h0(base))
    if not _numeric_ok(hyp):
        hyp["base not defective"] = False
        return RuleCheck(False, hyp)
    sub = derive(base, budget, policy, cache)
    hyp["base not defective"] = sub.verdict is Verdict.NOT_DEFECTIVE
    return RuleCheck(_numeric_ok(hyp), hyp, sub)


def rule_a5_applicable(base: SegreVeronesePair, budget: int = DEFAULT_BUDGET,
                       policy: Policy = DEFAULT_POLICY,
                       cache: Optional[RankCache] = None) -> RuleCheck:
    """Whether base x P^2 with degree t >= 2 is licensed as not defective."""
    hyp = _a5_numeric(base.dim, h0(base))
    if not _numeric_ok(hyp):
        hyp["base not defective"] = False
        return RuleCheck(False, hyp)
    sub = derive(base, budget, policy, cache)
    hyp["base not defective"] = sub.verdict is Verdict.NOT_DEFECTIVE
    return RuleCheck(_numeric_ok(hyp), hyp, sub)


# -- derivation -----------------------------------------------------------

def _numeric_leaf(pair: SegreVeronesePair, policy: Policy,
                  cache: Optional[RankCache]) -> Optional[Certificate]:
    """Certified maximal rank at both critical z for one prime, or None."""
    crit = critical_z(pair)
    n_sec, width = h0(pair), pair.dim + 1
    zs = sorted({crit.z_lo, crit.z_hi})
    for prime in policy.primes:
        seeds, ranks = [], []
        for z in zs:
            rep = z_report(pair, z, Policy(policy.trials, (prime,), policy.seed), cache)
            run = rep.certifying_run()
            if run is None:
                break
            seeds.append(run.seed)
            ranks.append(run.rank)
        else:
            hyp = {"N": n_sec, "dim": pair.dim, "z_lo": crit.z_lo, "z_hi": crit.z_hi,
                   "z": zs, "ranks": ranks,
                   "expected": [min(n_sec, z * width) for z in zs]}
            return Certificate(pair, Verdict.NOT_DEFECTIVE, Rule.NUMERIC_CHECK, hyp,
                               seeds, prime)
    return None


def _peel_order(pair: SegreVeronesePair) -> list[int]:
    idx = [i for i, (n, d) in enumerate(zip(pair.factor_dims, pair.multidegree))
           if n in (1, 2) and d >= 2]
    # P^2 before P^1, higher degree first
    return sorted(idx, key=lambda i: (-pair.factor_dims[i], -pair.multidegree[i], i))


def _bottom_meets_table(sub: Certificate) -> Optional[tuple[list, Certificate]]:
    """Steps and bottom base when ``sub`` is a peel chain from a base in the
    threshold table."""
    if sub.rule is Rule.RULE_P1ORP2:
        return list(sub.hypotheses["steps"]), sub.children[0]
    if sub.rule in (Rule.RULE_A5, Rule.RULE_A41):
        bottom = sub.children[0]
        if meets_threshold(bottom.pair.dim, h0(bottom.pair)):
            step = {k: sub.hypotheses[k] for k in ("n", "t", "r", "alpha")}
            step["(r, alpha) in threshold table"] = True
            return [step], bottom
    return None


class _Deriver:
    def __init__(self, budget: int, policy: Policy, cache: Optional[RankCache]):
        self.budget, self.policy, self.cache = budget, policy, cache
        self.memo: dict[str, Certificate] = {}

    def run(self, pair: SegreVeronesePair) -> Certificate:
        key = pair.cache_key()
        if key not in self.memo:
            self.memo[key] = self._derive(pair)
        return self.memo[key]

    def _derive(self, pair: SegreVeronesePair) -> Certificate:
        n_sec = h0(pair)
        fact = lookup(pair)
        if fact is not None:
            replay = fact.source is Source.PAPER_COMPUTER_CHECK and n_sec <= self.budget
            if not replay:
                return Certificate(pair, fact.verdict, Rule.DB_LOOKUP,
                                   {"source": fact.source.value, "pattern": fact.pattern})
            leaf = _numeric_leaf(pair, self.policy, self.cache)
            if leaf is not None:
                return leaf
        for i in _peel_order(pair) if pair.num_factors > 1 else []:
            node = self._peel(pair, i)
            if node is not None:
                return node
        if n_sec <= self.budget:
            leaf = _numeric_leaf(pair, self.policy, self.cache)
            if leaf is not None:
                return leaf
            return Certificate(pair, Verdict.INCONCLUSIVE, Rule.INCONCLUSIVE,
                               {"reason": "rank deficient at a critical z", "N": n_sec})
        return Certificate(pair, Verdict.INCONCLUSIVE, Rule.INCONCLUSIVE,
                           {"reason": "no rule applies and N exceeds the budget",
                            "N": n_sec, "budget": self.budget})

    def _peel(self, pair: SegreVeronesePair, i: int) -> Optional[Certificate]:
        n, t = pair.factor_dims[i], pair.multidegree[i]
        base = pair.drop_factor(i)
        r, alpha = base.dim, h0(base)
        hyp = _a5_numeric(r, alpha) if n == 2 else _a41_numeric(r, alpha)
        if not _numeric_ok(hyp):
            return None
        sub = self.run(base)
        if sub.verdict is not Verdict.NOT_DEFECTIVE:
            return None
        hyp.update({"n": n, "t": t, "t >= 2": t >= 2, "base not defective": True})
        chain = _bottom_meets_table(sub)
        if chain is not None:
            steps, bottom = chain
            steps.append({"n": n, "t": t, "r": r, "alpha": alpha,
                          "(r, alpha) in threshold table": meets_threshold(r, alpha)})
            if all(s["(r, alpha) in threshold table"] for s in steps):
                b = bottom.pair
                return Certificate(pair, Verdict.NOT_DEFECTIVE, Rule.RULE_P1ORP2,
                                   {"r0": b.dim, "alpha0": h0(b), "steps": steps,
                                    "base not defective": True}, children=[bottom])
        rule = Rule.RULE_A5 if n == 2 else Rule.RULE_A41
        return Certificate(pair, Verdict.NOT_DEFECTIVE, rule, hyp, children=[sub])


def derive(pair: SegreVeronesePair, budget: int = DEFAULT_BUDGET,
           policy: Policy = DEFAULT_POLICY,
           cache: Optional[RankCache] = None) -> Certificate:
    """Certificate for ``pair``: database, then peeling a P^2 or P^1 factor,
    then a rank check at the critical z when N <= ``budget``."""
    if any(d < 1 for d in pair.multidegree):
        raise ValueError("derive needs every degree >= 1")
    return _Deriver(budget, policy, cache).run(pair)


# -- validation -----------------------------------------------------------

def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise _Invalid(msg)


class _Invalid(Exception):
    pass


def _same_pair(a: SegreVeronesePair, b: SegreVeronesePair) -> bool:
    return a.cache_key() == b.cache_key()


def _check_node(node: Certificate) -> None:
    hyp = node.hypotheses
    if node.rule is Rule.DB_LOOKUP:
        _require(not node.children, "database leaf with children")
        fact = lookup(node.pair, theorems=hyp.get("source") == Source.PAPER_THEOREM.value)
        _require(fact is not None, "pair not in the database")
        _require(fact.verdict is node.verdict, "database verdict differs")
        _require(fact.source.value == hyp.get("source"), "database source differs")
        return
    _require(node.verdict is Verdict.NOT_DEFECTIVE, "only database leaves may be defective")
    if node.rule is Rule.NUMERIC_CHECK:
        _check_numeric(node)
        return
    _require(len(node.children) == 1, "rule nodes have exactly one child")
    child = node.children[0]
    _require(child.verdict is Verdict.NOT_DEFECTIVE, "base is not certified")
    b = child.pair
    r, alpha = b.dim, h0(b)
    if node.rule is Rule.RULE_P1ORP2:
        _require(hyp.get("r0") == r and hyp.get("alpha0") == alpha, "base numbers differ")
        _require(meets_threshold(r, alpha), "base outside the threshold table")
        steps = hyp.get("steps")
        _require(isinstance(steps, list) and len(steps) >= 1, "missing steps")
        cur = b
        for s in steps:
            n, t = s.get("n"), s.get("t")
            _require(n in (1, 2) and isinstance(t, int) and t >= 2, "bad peel step")
            _require(s.get("r") == cur.dim and s.get("alpha") == h0(cur), "step numbers differ")
            _require(meets_threshold(cur.dim, h0(cur)), "step outside the threshold table")
            cur = cur.with_factor(n, t)
        _require(_same_pair(cur, node.pair), "steps do not rebuild the pair")
        return
    _require(node.rule in (Rule.RULE_A5, Rule.RULE_A41), f"unknown rule {node.rule}")
    n, t = hyp.get("n"), hyp.get("t")
    _require(n == (2 if node.rule is Rule.RULE_A5 else 1), "peeled factor has the wrong dimension")
    _require(isinstance(t, int) and t >= 2, "peeled degree below 2")
    _require(_same_pair(b.with_factor(n, t), node.pair), "child is not the peeled base")
    _require(hyp.get("r") == r and hyp.get("alpha") == alpha, "recorded r or alpha differs")
    if node.rule is Rule.RULE_A5:
        _require(meets_threshold(r, alpha), "threshold table fails")
    else:
        _require(r > 1, "r > 1 fails")
        _require(alpha > (r + 1) ** 2, "alpha > (r+1)^2 fails")


def _check_numeric(node: Certificate) -> None:
    pair, hyp = node.pair, node.hypotheses
    _require(not node.children, "numeric leaf with children")
    crit = critical_z(pair)
    n_sec, width = h0(pair), pair.dim + 1
    zs = sorted({crit.z_lo, crit.z_hi})
    _require(hyp.get("N") == n_sec and hyp.get("dim") == pair.dim, "recorded N or dim differs")
    _require(hyp.get("z") == zs, "recorded z values are not the critical ones")
    _require(isinstance(node.seeds, list) and len(node.seeds) == len(zs), "one seed per z")
    _require(isinstance(node.prime, int), "missing prime")
    for z, seed, recorded in zip(zs, node.seeds, hyp.get("ranks", [])):
        got = rank_at(double_points(pair, z), int(seed), node.prime)
        _require(got == recorded, f"rank at z={z} does not reproduce")
        _require(got == min(n_sec, z * width), f"rank at z={z} is not maximal")


def validate_certificate(cert: Union[Certificate, dict, str]) -> bool:
    """Re-evaluate every hypothesis and replay every rank check.

    Malformed input raises :class:`CertificateError`; a well-formed tree
    that does not reproduce returns False.
    """
    if isinstance(cert, str):
        try:
            cert = json.loads(cert)
        except json.JSONDecodeError as exc:
            raise CertificateError(f"not JSON: {exc}") from exc
    if not isinstance(cert, Certificate):
        cert = Certificate.from_dict(cert)
    if cert.verdict is Verdict.INCONCLUSIVE:
        return False
    stack = [cert]
    try:
        while stack:
            node = stack.pop()
            _check_node(node)
            stack.extend(node.children)
    except _Invalid:
        return False
    return True


# -- theorem-level comparison ---------------------------------------------

def expected_verdict(pair: SegreVeronesePair) -> Optional[Verdict]:
    """Verdict of the classification theorems alone, when they cover the pair."""
    if any(d < 1 for d in pair.multidegree):
        return None
    found = _matches(_factors(pair), THEOREM_FACTS)
    return found[0].verdict if found else None


def scan_summary(pair: SegreVeronesePair, policy: Policy = DEFAULT_POLICY,
                 cache: Optional[RankCache] = None) -> dict:
    """Per-z numeric scan next to the database verdict."""
    fact = lookup(pair)
    verdicts = defect_scan(pair, policy=policy, cache=cache)
    return {
        "pair": pair.text(),
        "database": None if fact is None else {"verdict": fact.verdict.value,
                                               "source": fact.source.value},
        "scan": [v.as_dict() for v in verdicts],
        "probably_defective": [v.z for v in verdicts if v.status is Status.PROBABLY_DEFECTIVE],
    }


__all__ = [
    "CERT_VERSION", "Certificate", "CertificateError", "DEFAULT_BUDGET", "FACTS",
    "KnownFact", "Match", "Rule", "RuleCheck", "Source", "THEOREM_FACTS", "Verdict",
    "check_database", "derive", "expected_verdict", "lookup", "rule_a41_applicable",
    "rule_a5_applicable", "scan_summary", "validate_certificate",
]
