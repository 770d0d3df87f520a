"""Segre-Veronese pairs: a product of projective spaces with a multidegree."""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import comb, prod
from typing import Sequence

_TEXT_RE = re.compile(r"^\s*(P\d+(?:\s*x\s*P\d+)*)\s+deg\s*\(([\d,\s]+)\)\s*$")


@dataclass(frozen=True)
class SegreVeronesePair:
    """The pair (P^n1 x ... x P^nk, O(d1, ..., dk)).

    Factor order is kept as given; use :meth:`cache_key` for an
    order-independent identity.
    """

    factor_dims: tuple[int, ...]
    multidegree: tuple[int, ...]

    def __init__(self, factor_dims: Sequence[int], multidegree: Sequence[int]):
        dims = tuple(int(n) for n in factor_dims)
        degs = tuple(int(d) for d in multidegree)
        if not dims:
            raise ValueError("a pair needs at least one factor")
        if len(dims) != len(degs):
            raise ValueError(
                f"factor_dims has {len(dims)} entries but multidegree has {len(degs)}"
            )
        if any(n < 1 for n in dims):
            raise ValueError(f"factor dimensions must be positive: {dims}")
        if any(d < 0 for d in degs):
            raise ValueError(f"degrees must be nonnegative: {degs}")
        object.__setattr__(self, "factor_dims", dims)
        object.__setattr__(self, "multidegree", degs)

    @property
    def num_factors(self) -> int:
        return len(self.factor_dims)

    @property
    def dim(self) -> int:
        return sum(self.factor_dims)

    @property
    def sections(self) -> int:
        return h0(self)

    def factor_sections(self, i: int) -> int:
        n, d = self.factor_dims[i], self.multidegree[i]
        return comb(n + d, n)

    def drop_factor(self, i: int) -> "SegreVeronesePair":
        if self.num_factors == 1:
            raise ValueError("cannot drop the only factor")
        dims = self.factor_dims[:i] + self.factor_dims[i + 1:]
        degs = self.multidegree[:i] + self.multidegree[i + 1:]
        return SegreVeronesePair(dims, degs)

    def with_factor(self, n: int, d: int) -> "SegreVeronesePair":
        return SegreVeronesePair(self.factor_dims + (n,), self.multidegree + (d,))

    def normalized(self) -> "SegreVeronesePair":
        """Same pair with factors sorted by (n, d) descending."""
        order = sorted(zip(self.factor_dims, self.multidegree), reverse=True)
        return SegreVeronesePair([n for n, _ in order], [d for _, d in order])

    def text(self) -> str:
        dims = "x".join(f"P{n}" for n in self.factor_dims)
        degs = ",".join(str(d) for d in self.multidegree)
        return f"{dims} deg ({degs})"

    def cache_key(self) -> str:
        return self.normalized().text()

    def __str__(self) -> str:
        return self.text()

    @classmethod
    def parse(cls, text: str) -> "SegreVeronesePair":
        """Inverse of :meth:`text`, e.g. ``"P2xP2 deg (2,3)"``."""
        m = _TEXT_RE.match(text)
        if m is None:
            raise ValueError(f"cannot parse pair {text!r}")
        dims = [int(tok.strip()[1:]) for tok in m.group(1).split("x")]
        degs = [int(tok) for tok in m.group(2).split(",") if tok.strip()]
        return cls(dims, degs)


@dataclass(frozen=True)
class CriticalRanks:
    z_lo: int
    z_hi: int


def h0(pair: SegreVeronesePair) -> int:
    """Number of sections N = prod C(n_i + d_i, n_i), exact."""
    return prod(comb(n + d, n) for n, d in zip(pair.factor_dims, pair.multidegree))


def expected_secant_dim(pair: SegreVeronesePair, z: int) -> int:
    if z < 1:
        raise ValueError("z must be at least 1")
    return min(z * (pair.dim + 1), h0(pair)) - 1


def critical_z(pair: SegreVeronesePair) -> CriticalRanks:
    n_sec, width = h0(pair), pair.dim + 1
    return CriticalRanks(n_sec // width, -(-n_sec // width))
