"""Prime field arithmetic, seeded point sampling and rank mod p."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scheme import FIXED_POINT, HYPERPLANE, SchemeSpec

# Largest primes below 2**31: products of two residues fit in int64.
DEFAULT_PRIMES: tuple[int, ...] = (2147483647, 2147483629, 2147483587, 2147483579)
DEFAULT_PRIME = DEFAULT_PRIMES[0]
DEFAULT_SEED = 0x5EC4_7E55_A11C_E5ED

MAX_SAMPLE_RETRIES = 64


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if p % q == 0:
            return p == q
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # deterministic Miller-Rabin for p < 3.3e24
    for a in small:
        x = pow(a, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PrimeField:
    p: int = DEFAULT_PRIME

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.p >= 2**31:
            raise ValueError("modulus must stay below 2**31 for int64 products")

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, self.p - 2, self.p)

    def reduce(self, m) -> np.ndarray:
        return np.asarray(m, dtype=np.int64) % self.p


@dataclass(frozen=True)
class SampledPoints:
    """Affine chart coordinates (x_{i,1}, ..., x_{i,n_i}) per factor per point;
    the chart coordinate x_{i,0} = 1 is implicit."""

    scheme: SchemeSpec
    coords: tuple[tuple[tuple[int, ...], ...], ...]
    seed: int
    prime: int

    def homogeneous(self, point: int, factor: int) -> tuple[int, ...]:
        return (1,) + self.coords[point][factor]


def free_coordinates(support, dims) -> int:
    """Dimension of the locus a point with this support ranges over."""
    return sum(0 if w is FIXED_POINT else n - 1 if w is HYPERPLANE else n
               for w, n in zip(support, dims))


def sample_points(scheme: SchemeSpec, seed: int = DEFAULT_SEED,
                  prime: int = DEFAULT_PRIME) -> SampledPoints:
    """Uniform points of the constrained charts, deterministic in (scheme, seed, prime)."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed % 2**64, prime])))
    dims = scheme.pair.factor_dims
    # a locus with no free coordinate is the anchor point itself
    if sum(free_coordinates(c.support, dims) == 0 for c in scheme.components) > 1:
        raise ValueError("two components are pinned to the anchor point")
    seen: set = set()
    coords = []
    for comp in scheme.components:
        for _ in range(MAX_SAMPLE_RETRIES):
            point = []
            for n, where in zip(dims, comp.support):
                if where is FIXED_POINT:
                    point.append((0,) * n)
                    continue
                free = n - 1 if where is HYPERPLANE else n
                vals = tuple(int(v) for v in rng.integers(0, prime, size=free))
                point.append(vals + (0,) * (n - free))
            key = tuple(point)
            if key not in seen:
                break
        else:
            raise RuntimeError(
                "could not sample distinct points; field too small for this scheme"
            )
        seen.add(key)
        coords.append(key)
    return SampledPoints(scheme, tuple(coords), seed, prime)


def rank(m, p: int = DEFAULT_PRIME) -> int:
    """Rank over F_p by row elimination.

    The pivot is the first nonzero entry of the current column; the pivot
    row is scaled to 1 and subtracted from every row below.
    """
    a = np.array(m, dtype=np.int64) % p
    if a.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    if a.shape[0] > a.shape[1]:
        a = np.ascontiguousarray(a.T)
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        prow = a[r, c:] * inv % p
        a[r, c:] = prow
        block = a[r + 1:, c:]
        # entries < 2**31, so the outer product stays below 2**62
        block -= np.outer(block[:, 0], prow)
        block %= p
        r += 1
    return r
