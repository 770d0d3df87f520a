"""Terracini matrices for unions of fat points and the derived cohomology.

The matrix of a scheme has one column per monomial of multidegree
(d_1, ..., d_k) and one row per condition: an evaluation row for every
point, plus one partial derivative row per tangent direction of a double
point.  Its rank r gives h0 = N - r and h1 = deg - r for the twisted ideal
sheaf.  A rank computed at random points over F_p never exceeds the generic
rank in characteristic zero, so a maximal rank is a certificate while a
deficient one is only evidence.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from itertools import combinations_with_replacement
from typing import Iterable, Optional, Protocol, Sequence

import numpy as np

from .claims import meets_threshold
from .linalg import DEFAULT_PRIMES, DEFAULT_SEED, SampledPoints, rank, sample_points
from .scheme import FULL, HYPERPLANE, SchemeComponent, SchemeSpec, double_points, make_scheme
from .space import SegreVeronesePair, critical_z, h0


@lru_cache(maxsize=None)
def monomial_exponents(n: int, d: int) -> np.ndarray:
    """Exponent vectors of degree-d monomials in x_0..x_n, lex order with
    x_0^d first."""
    rows = []
    for combo in combinations_with_replacement(range(n + 1), d):
        e = [0] * (n + 1)
        for v in combo:
            e[v] += 1
        rows.append(e)
    out = np.array(rows, dtype=np.int64).reshape(len(rows), n + 1)
    out.setflags(write=False)
    return out


def _factor_vectors(chart: Sequence[int], directions: int, n: int, d: int, p: int):
    """Value of every monomial at (1, chart) and its derivative along the
    first ``directions`` chart coordinates."""
    exps = monomial_exponents(n, d)
    # powers[j][e] = chart[j]**e mod p
    powers = np.ones((n, d + 1), dtype=np.int64)
    for j in range(n):
        for e in range(1, d + 1):
            powers[j, e] = powers[j, e - 1] * chart[j] % p
    cols = [powers[j][exps[:, j + 1]] for j in range(n)]
    value = np.ones(len(exps), dtype=np.int64)
    for c in cols:
        value = value * c % p
    derivs = []
    for j in range(directions):
        e = exps[:, j + 1]
        dv = e * powers[j][np.maximum(e - 1, 0)] % p
        for l, c in enumerate(cols):
            if l != j:
                dv = dv * c % p
        derivs.append(dv)
    return value, derivs


def _kron(vectors: Iterable[np.ndarray], p: int) -> np.ndarray:
    return reduce(lambda a, b: np.outer(a, b).ravel() % p, vectors)


def build_matrix(pair: SegreVeronesePair, points: SampledPoints) -> np.ndarray:
    """Terracini matrix (total_degree x N) over F_p."""
    if points.scheme.pair != pair:
        raise ValueError("points were sampled for a different pair")
    p = points.prime
    n_cols = h0(pair)
    rows: list[np.ndarray] = []
    for comp, coords in zip(points.scheme.components, points.coords):
        values, derivs = [], []
        for n, d, chart, cons in zip(pair.factor_dims, pair.multidegree, coords,
                                     comp.constraints):
            ndir = cons.directions(n) if comp.multiplicity == 2 else 0
            v, ds = _factor_vectors(chart, ndir, n, d, p)
            values.append(v)
            derivs.append(ds)
        rows.append(_kron(values, p))
        for i, ds in enumerate(derivs):
            for dv in ds:
                rows.append(_kron(values[:i] + [dv] + values[i + 1:], p))
    if not rows:
        return np.zeros((0, n_cols), dtype=np.int64)
    return np.vstack(rows)


def trial_seed(seed: int, trial: int) -> int:
    """64-bit seed of the given trial, derived from a base seed."""
    ss = np.random.SeedSequence([seed % 2**64, trial])
    return int(ss.generate_state(1, np.uint64)[0])


class RankCache(Protocol):
    def lookup(self, pair: SegreVeronesePair, scheme: SchemeSpec, prime: int,
               seed: int) -> Optional[int]: ...

    def record(self, pair: SegreVeronesePair, scheme: SchemeSpec, prime: int,
               seed: int, rank: int, certified: bool) -> None: ...


@dataclass(frozen=True)
class Policy:
    trials: int = 3
    primes: tuple[int, ...] = DEFAULT_PRIMES[:2]
    seed: int = DEFAULT_SEED


DEFAULT_POLICY = Policy()


@dataclass(frozen=True)
class Run:
    prime: int
    seed: int
    rank: int


@dataclass(frozen=True)
class CohomologyReport:
    pair: SegreVeronesePair
    scheme: str
    sections: int
    degree: int
    rank: int
    certified_maximal: bool
    runs: tuple[Run, ...] = ()

    @property
    def h0(self) -> int:
        return self.sections - self.rank

    @property
    def h1(self) -> int:
        return self.degree - self.rank

    @property
    def expected_rank(self) -> int:
        return min(self.sections, self.degree)

    @property
    def defect(self) -> int:
        return self.expected_rank - self.rank

    @property
    def trials_used(self) -> int:
        return len({r.seed for r in self.runs})

    @property
    def primes_used(self) -> tuple[int, ...]:
        return tuple(sorted({r.prime for r in self.runs}))

    def certifying_run(self) -> Optional[Run]:
        if not self.certified_maximal:
            return None
        return next((r for r in self.runs if r.rank == self.rank), None)

    def as_dict(self) -> dict:
        return {
            "pair": self.pair.text(),
            "scheme": self.scheme,
            "sections": self.sections,
            "degree": self.degree,
            "rank": self.rank,
            "h0": self.h0,
            "h1": self.h1,
            "certified_maximal": self.certified_maximal,
            "trials_used": self.trials_used,
            "primes_used": list(self.primes_used),
            "runs": [{"prime": r.prime, "seed": r.seed, "rank": r.rank} for r in self.runs],
        }


def rank_at(scheme: SchemeSpec, seed: int, prime: int) -> int:
    """Rank of the Terracini matrix at one seeded configuration."""
    if not scheme.components:
        return 0
    pts = sample_points(scheme, seed, prime)
    return rank(build_matrix(scheme.pair, pts), prime)


def cohomology(pair: SegreVeronesePair, scheme: SchemeSpec,
               policy: Policy = DEFAULT_POLICY,
               cache: Optional[RankCache] = None) -> CohomologyReport:
    """Maximum Terracini rank over the policy's primes and trial seeds;
    stops at the first run that reaches min(N, deg)."""
    if scheme.pair != pair:
        raise ValueError("scheme lives on a different pair")
    n_sec, deg = h0(pair), scheme.total_degree
    target = min(n_sec, deg)
    best, runs = 0, []
    if target == 0:
        return CohomologyReport(pair, scheme.descriptor(), n_sec, deg, 0, True, ())
    for prime in policy.primes:
        for t in range(policy.trials):
            seed = trial_seed(policy.seed, t)
            r = cache.lookup(pair, scheme, prime, seed) if cache is not None else None
            if r is None:
                r = rank_at(scheme, seed, prime)
                if cache is not None:
                    cache.record(pair, scheme, prime, seed, r, r == target)
            runs.append(Run(prime, seed, r))
            best = max(best, r)
            if best == target:
                return CohomologyReport(pair, scheme.descriptor(), n_sec, deg, best,
                                        True, tuple(runs))
    return CohomologyReport(pair, scheme.descriptor(), n_sec, deg, best, False, tuple(runs))


class Status(str, enum.Enum):
    NOT_DEFECTIVE_CERTIFIED = "NOT_DEFECTIVE_CERTIFIED"
    PROBABLY_DEFECTIVE = "PROBABLY_DEFECTIVE"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class DefectivityVerdict:
    z: int
    status: Status
    defect: int = 0
    report: Optional[CohomologyReport] = None
    inferred_from: Optional[int] = None

    def as_dict(self) -> dict:
        out = {"z": self.z, "status": self.status.value, "defect": self.defect,
               "inferred_from": self.inferred_from}
        if self.report is not None:
            out["rank"] = self.report.rank
            out["expected_rank"] = self.report.expected_rank
        return out


def verdict_from(z: int, report: CohomologyReport) -> DefectivityVerdict:
    if report.certified_maximal:
        return DefectivityVerdict(z, Status.NOT_DEFECTIVE_CERTIFIED, 0, report)
    # deficiency is only reported when it survives two primes and three seeds
    if len(report.primes_used) >= 2 and report.trials_used >= 3:
        return DefectivityVerdict(z, Status.PROBABLY_DEFECTIVE, report.defect, report)
    return DefectivityVerdict(z, Status.INCONCLUSIVE, report.defect, report)


def z_report(pair: SegreVeronesePair, z: int, policy: Policy = DEFAULT_POLICY,
             cache: Optional[RankCache] = None) -> CohomologyReport:
    return cohomology(pair, double_points(pair, z), policy, cache)


def defect_scan(pair: SegreVeronesePair, z_range: Optional[Iterable[int]] = None,
                policy: Policy = DEFAULT_POLICY,
                cache: Optional[RankCache] = None) -> list[DefectivityVerdict]:
    """One verdict per z, default 1..z_hi.

    Maximal rank with z(dim+1) <= N gives h1 = 0 for every smaller z;
    with z(dim+1) >= N it gives h0 = 0 for every larger z.  So once both
    critical values are certified nothing else is computed.
    """
    crit = critical_z(pair)
    zs = list(range(1, crit.z_hi + 1)) if z_range is None else sorted(set(z_range))
    if any(z < 1 for z in zs):
        raise ValueError("z must be at least 1")
    width, n_sec = pair.dim + 1, h0(pair)
    h1_zero_upto = 0            # largest z known to have h1 = 0
    h0_zero_from = None         # smallest z known to have h0 = 0
    computed: dict[int, DefectivityVerdict] = {}

    def covered(z: int) -> Optional[int]:
        if z <= h1_zero_upto:
            return h1_zero_upto
        if h0_zero_from is not None and z >= h0_zero_from:
            return h0_zero_from
        return None

    # critical values first; below z_lo go downward, above it upward
    order = [z for z in (crit.z_lo, crit.z_hi) if z in zs]
    order += sorted((z for z in zs if z < crit.z_lo), reverse=True)
    order += [z for z in zs if z > crit.z_lo]
    for z in order:
        if z in computed or covered(z) is not None:
            continue
        v = verdict_from(z, z_report(pair, z, policy, cache))
        computed[z] = v
        if v.status is Status.NOT_DEFECTIVE_CERTIFIED:
            if z * width <= n_sec:
                h1_zero_upto = max(h1_zero_upto, z)
            if z * width >= n_sec:
                h0_zero_from = z if h0_zero_from is None else min(h0_zero_from, z)

    out = []
    for z in zs:
        if z in computed:
            out.append(computed[z])
        else:
            src = covered(z)
            out.append(DefectivityVerdict(z, Status.NOT_DEFECTIVE_CERTIFIED, 0, None, src))
    return out


def fully_certified(verdicts: Sequence[DefectivityVerdict]) -> bool:
    return all(v.status is Status.NOT_DEFECTIVE_CERTIFIED for v in verdicts)


def not_z_defective(pair: SegreVeronesePair, z: int, policy: Policy = DEFAULT_POLICY) -> bool:
    """Certified not-z-secant defective (z = 0 is vacuous)."""
    if z <= 0:
        return True
    return z_report(pair, z, policy).certified_maximal


def residual_points(points: SampledPoints, divisor: int) -> SampledPoints:
    """Residual of the sampled scheme with respect to the hyperplane divisor
    on ``divisor``, on the pair twisted by -H, at the same points."""
    scheme = points.scheme
    pair = scheme.pair
    degs = list(pair.multidegree)
    if degs[divisor] < 1:
        raise ValueError("cannot twist a degree-0 factor by -H")
    degs[divisor] -= 1
    res_pair = SegreVeronesePair(pair.factor_dims, degs)
    comps, coords = [], []
    for comp, xy in zip(scheme.components, points.coords):
        if comp.support[divisor] is FULL:
            comps.append(comp)
            coords.append(xy)
        elif comp.multiplicity == 2 and comp.constraints[divisor] is FULL:
            comps.append(SchemeComponent(1, comp.support, comp.support))
            coords.append(xy)
    res = SchemeSpec(res_pair, tuple(comps))
    return SampledPoints(res, tuple(coords), points.seed, points.prime)


def points_rank(points: SampledPoints) -> int:
    if not points.scheme.components:
        return 0
    return rank(build_matrix(points.scheme.pair, points), points.prime)


def lo2_check(scheme: SchemeSpec, divisor: int, e: int, seed: int = DEFAULT_SEED,
              prime: int = DEFAULT_PRIMES[0]) -> dict:
    """Compare h0 after adding ``e`` general simple points of the divisor
    with max(beta - e, h0 of the residual twisted by -H), all at one
    configuration."""
    pair = scheme.pair
    k = pair.num_factors
    on_h = tuple(HYPERPLANE if i == divisor else FULL for i in range(k))
    extra = make_scheme(pair, [(1, None, e, on_h)])
    both = sample_points(scheme + extra, seed, prime)
    base_pts = SampledPoints(scheme, both.coords[:len(scheme)], seed, prime)
    n_sec = h0(pair)
    beta = n_sec - points_rank(base_pts)
    with_s = n_sec - points_rank(both)
    res = residual_points(base_pts, divisor)
    res_h0 = h0(res.scheme.pair) - points_rank(res)
    return {"h0_with_points": with_s, "beta": beta, "residual_h0": res_h0,
            "bound": max(beta - e, res_h0), "holds": with_s <= max(beta - e, res_h0)}


# -- lemma instances ------------------------------------------------------

def meets_a4_table(r: int, alpha: int) -> bool:
    """(r, alpha) lies in the range of the P^2-extension theorem."""
    return meets_threshold(r, alpha)


LEMMAS = ("a1a", "a1c", "a3a", "a3b", "a5_0", "a1_2")
_REQUIRED = {"a1a": ("z",), "a1c": ("z",), "a3a": ("z", "u"), "a3b": ("z", "u"),
             "a5_0": (), "a1_2": ("z",)}


@dataclass
class LemmaReport:
    lemma_id: str
    base: SegreVeronesePair
    params: dict
    hypotheses: dict = field(default_factory=dict)
    conclusion_holds: bool = False
    report: Optional[CohomologyReport] = None

    @property
    def hypotheses_hold(self) -> bool:
        return all(self.hypotheses.values())

    def as_dict(self) -> dict:
        return {
            "lemma": self.lemma_id,
            "base": self.base.text(),
            "params": dict(self.params),
            "hypotheses": dict(self.hypotheses),
            "hypotheses_hold": self.hypotheses_hold,
            "conclusion_holds": self.conclusion_holds,
            "cohomology": None if self.report is None else self.report.as_dict(),
        }


def _floor(a: int, b: int) -> int:
    return a // b


def _ceil(a: int, b: int) -> int:
    return -(-a // b)


def verify_lemma_instance(lemma_id: str, base: SegreVeronesePair, params: dict,
                          policy: Policy = DEFAULT_POLICY) -> LemmaReport:
    """Evaluate a lemma's hypotheses on (base, params) exactly and check its
    vanishing statement with a Terracini rank on base x P^1 or base x P^2.

    ``base`` plays (Y, L) with alpha = h0(base) and r = dim(base);
    not-s-defectivity of the base is certified numerically.
    """
    if lemma_id not in _REQUIRED:
        raise ValueError(f"unknown lemma {lemma_id!r}; expected one of {LEMMAS}")
    missing = [k for k in _REQUIRED[lemma_id] if k not in params]
    if missing:
        raise ValueError(f"lemma {lemma_id} needs parameters {missing}")
    alpha, r = h0(base), base.dim
    out = LemmaReport(lemma_id, base, dict(params))
    hyp = out.hypotheses
    z = int(params.get("z", 0))
    u = int(params.get("u", 0))
    k = base.num_factors

    if lemma_id in ("a1a", "a1c"):
        hyp["dim_Y > 1"] = r > 1
        if lemma_id == "a1a":
            s = _floor(alpha, r + 2)
            hyp["z <= 2 floor(alpha/(r+2))"] = z <= 2 * s
        else:
            s = _ceil(alpha, r + 2)
            hyp["z >= 2 ceil(alpha/(r+2))"] = z >= 2 * s
        hyp[f"Y not {s}-secant defective"] = not_z_defective(base, s, policy)
        x1 = base.with_factor(1, 1)
        rep = cohomology(x1, double_points(x1, z), policy)
        out.report = rep
        out.conclusion_holds = rep.h1 == 0 if lemma_id == "a1a" else rep.h0 == 0
        return out

    if lemma_id in ("a3a", "a3b"):
        x2 = base.with_factor(2, 1)
        on_line = tuple([FULL] * k + [HYPERPLANE])
        scheme = make_scheme(x2, [(2, None, z), (2, on_line, u)])
        if lemma_id == "a3a":
            hyp["(r+2)z <= 2alpha-2r-2"] = (r + 2) * z <= 2 * alpha - 2 * r - 2
            hyp["(r+2)z+u <= 2alpha"] = (r + 2) * z + u <= 2 * alpha
            hyp["u <= floor(alpha/(r+1))"] = u <= _floor(alpha, r + 1)
            hyp["z <= alpha-(r+1)u"] = z <= alpha - (r + 1) * u
            svals = sorted({z, u, _floor(alpha, r + 2)})
        else:
            hyp["(r+2)z >= 2alpha+2r+2"] = (r + 2) * z >= 2 * alpha + 2 * r + 2
            hyp["u >= ceil(alpha/(r+1)) or z >= alpha-(r+1)u"] = (
                u >= _ceil(alpha, r + 1) or z >= alpha - (r + 1) * u)
            svals = sorted({u, _ceil(alpha, r + 2)})
        for s in svals:
            hyp[f"Y not {s}-secant defective"] = not_z_defective(base, s, policy)
        rep = cohomology(x2, scheme, policy)
        out.report = rep
        out.conclusion_holds = rep.h1 == 0 if lemma_id == "a3a" else rep.h0 == 0
        return out

    # a5_0 and a1_2 need the threshold table and full non-defectivity of Y
    hyp["(r, alpha) in threshold table"] = meets_a4_table(r, alpha)
    hyp["Y not secant defective"] = fully_certified(defect_scan(base, policy=policy))
    if lemma_id == "a1_2":
        x2 = base.with_factor(2, 1)
        rep = cohomology(x2, double_points(x2, z), policy)
        bound = max(0, 3 * alpha - (r + 2) * z)
        out.params["bound"] = bound
        out.report = rep
        out.conclusion_holds = rep.h0 <= bound
        return out

    a = _floor(4 * alpha, r + 2)
    b = 4 * alpha - (r + 2) * a
    zz = _ceil(10 * alpha, r + 3)
    zp = zz - a - b
    out.params.update({"a": a, "b": b, "z": zz, "z_prime": zp})
    if zp < 0:
        return out
    x2 = base.with_factor(2, 2)
    on_line = tuple([FULL] * k + [HYPERPLANE])
    scheme = make_scheme(x2, [(2, None, zp), (2, on_line, b)])
    rep = cohomology(x2, scheme, policy)
    out.report = rep
    out.conclusion_holds = rep.h1 == 0
    return out


def admissible_params(lemma_id: str, base: SegreVeronesePair) -> list[dict]:
    """Parameter sets meeting a lemma's numeric (non-secant) hypotheses:
    all of them when the range is finite, the first few otherwise."""
    alpha, r = h0(base), base.dim
    if lemma_id == "a1a":
        return [{"z": z} for z in range(1, 2 * _floor(alpha, r + 2) + 1)]
    if lemma_id == "a1c":
        # h0 = 0 persists for larger z; take at least three values
        lo = 2 * _ceil(alpha, r + 2)
        hi = _ceil(2 * alpha, r + 2)
        return [{"z": z} for z in range(lo, max(lo + 2, hi) + 1)]
    if lemma_id == "a3a":
        out = []
        for u in range(0, _floor(alpha, r + 1) + 1):
            for z in range(0, alpha + 1):
                if ((r + 2) * z <= 2 * alpha - 2 * r - 2 and (r + 2) * z + u <= 2 * alpha
                        and z <= alpha - (r + 1) * u and z + u > 0):
                    out.append({"z": z, "u": u})
        return out
    if lemma_id == "a3b":
        zmin = _ceil(2 * alpha + 2 * r + 2, r + 2)
        out = []
        for z in range(zmin, zmin + 3):
            for u in range(0, _ceil(alpha, r + 1) + 1):
                if u >= _ceil(alpha, r + 1) or z >= alpha - (r + 1) * u:
                    out.append({"z": z, "u": u})
                    break
        return out
    if lemma_id == "a1_2":
        hi = _ceil(3 * alpha, r + 3)
        return [{"z": z} for z in range(1, hi + 1)]
    if lemma_id == "a5_0":
        return [{}]
    raise ValueError(f"unknown lemma {lemma_id!r}")
