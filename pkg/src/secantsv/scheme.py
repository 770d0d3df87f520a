"""Zero-dimensional schemes built from simple and double points.

A component is a point ``p`` of multiplicity 1 or 2.  For a double point the
``constraints`` name the subvariety ``V`` with ``(2p, V)`` the component:
per factor either the whole factor, the coordinate hyperplane
``{x_n = 0}`` or the anchor point ``(1:0:...:0)``.  ``support`` restricts
only where ``p`` lies, so ``(2p, X)`` with ``p`` on a divisor is
``constraints=FULL, support=HYPERPLANE`` on that factor.

Descriptors use a small text grammar, one term per group of points::

    3*2pt + 2*2pt@H2 + 1*1pt@H2 + 2*2pt:H1

``@H2``/``@E2`` constrain the fat point to the hyperplane/anchor of
factor 2 (1-based), ``:H2``/``:E2`` only move the support there.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable

from .space import SegreVeronesePair


class FactorConstraint(enum.IntEnum):
    FULL = 0
    HYPERPLANE = 1
    FIXED_POINT = 2

    def directions(self, n: int) -> int:
        """Tangent directions contributed on a factor P^n."""
        if self is FactorConstraint.FULL:
            return n
        if self is FactorConstraint.HYPERPLANE:
            return n - 1
        return 0


FULL = FactorConstraint.FULL
HYPERPLANE = FactorConstraint.HYPERPLANE
FIXED_POINT = FactorConstraint.FIXED_POINT


@dataclass(frozen=True)
class SchemeComponent:
    multiplicity: int
    constraints: tuple[FactorConstraint, ...]
    support: tuple[FactorConstraint, ...] = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.multiplicity not in (1, 2):
            raise ValueError(f"multiplicity must be 1 or 2, got {self.multiplicity}")
        cons = tuple(FactorConstraint(c) for c in self.constraints)
        supp = cons if self.support is None else tuple(FactorConstraint(c) for c in self.support)
        if len(supp) != len(cons):
            raise ValueError("support and constraints must have the same length")
        for c, s in zip(cons, supp):
            if s < c:
                raise ValueError("support must lie inside the constrained locus")
        object.__setattr__(self, "constraints", cons)
        object.__setattr__(self, "support", supp)

    def tangent_dim(self, pair: SegreVeronesePair) -> int:
        return sum(c.directions(n) for c, n in zip(self.constraints, pair.factor_dims))

    def degree(self, pair: SegreVeronesePair) -> int:
        if self.multiplicity == 1:
            return 1
        return self.tangent_dim(pair) + 1


@dataclass(frozen=True)
class SchemeSpec:
    pair: SegreVeronesePair
    components: tuple[SchemeComponent, ...] = field(default_factory=tuple)

    def __post_init__(self):
        k = self.pair.num_factors
        for comp in self.components:
            if len(comp.constraints) != k:
                raise ValueError(
                    f"component has {len(comp.constraints)} constraints, pair has {k} factors"
                )
            for c, n in zip(comp.support, self.pair.factor_dims):
                if c is HYPERPLANE and n < 1:
                    raise ValueError("HYPERPLANE constraint on a P^0 factor")

    @property
    def total_degree(self) -> int:
        return sum(c.degree(self.pair) for c in self.components)

    def __len__(self) -> int:
        return len(self.components)

    def __add__(self, other: "SchemeSpec") -> "SchemeSpec":
        if other.pair != self.pair:
            raise ValueError("schemes live on different pairs")
        return SchemeSpec(self.pair, self.components + other.components)

    def without(self, index: int) -> "SchemeSpec":
        comps = self.components[:index] + self.components[index + 1:]
        return SchemeSpec(self.pair, comps)

    def descriptor(self) -> str:
        return format_descriptor(self)


def make_scheme(
    pair: SegreVeronesePair,
    counts: Iterable[tuple],
) -> SchemeSpec:
    """Build a scheme from ``(multiplicity, constraints, number_of_points)``
    triples, optionally extended with a fourth ``support`` entry.

    ``constraints=None`` means FULL on every factor.
    """
    comps: list[SchemeComponent] = []
    k = pair.num_factors
    for entry in counts:
        if len(entry) == 3:
            mult, cons, number = entry
            supp = None
        else:
            mult, cons, number, supp = entry
        if cons is None:
            cons = (FULL,) * k
        if len(cons) != k:
            raise ValueError(f"constraints {tuple(cons)} do not match {k} factors")
        if supp is not None and len(supp) != k:
            raise ValueError(f"support {tuple(supp)} does not match {k} factors")
        if number < 0:
            raise ValueError("number of points must be nonnegative")
        comp = SchemeComponent(mult, tuple(cons), None if supp is None else tuple(supp))
        comps.extend([comp] * number)
    return SchemeSpec(pair, tuple(comps))


def double_points(pair: SegreVeronesePair, z: int) -> SchemeSpec:
    """``z`` general double points of the whole space."""
    return make_scheme(pair, [(2, None, z)])


def split_degree(scheme: SchemeSpec, divisor: int) -> tuple[int, int]:
    """(residual, trace) degrees with respect to the hyperplane divisor on
    factor ``divisor`` (0-based)."""
    pair = scheme.pair
    if not 0 <= divisor < pair.num_factors:
        raise IndexError(f"divisor index {divisor} out of range")
    residual = trace = 0
    for comp in scheme.components:
        deg = comp.degree(pair)
        on_divisor = comp.support[divisor] is not FULL
        if not on_divisor:
            residual += deg
        elif comp.multiplicity == 1 or comp.constraints[divisor] is not FULL:
            trace += deg
        else:
            # (2p, V) with p on H and V transverse to H: residue {p}, trace (2p, V cap H)
            residual += 1
            trace += deg - 1
    return residual, trace


_TERM_RE = re.compile(r"^(?:(\d+)\s*\*\s*)?([12])pt((?:[@:][HE]\d+)*)$")
_MOD_RE = re.compile(r"([@:])([HE])(\d+)")


def parse_descriptor(pair: SegreVeronesePair, text: str) -> SchemeSpec:
    k = pair.num_factors
    counts = []
    for raw in text.split("+"):
        term = raw.strip().replace(" ", "")
        if not term:
            continue
        m = _TERM_RE.match(term)
        if m is None:
            raise ValueError(f"bad scheme term {raw.strip()!r}")
        number = int(m.group(1)) if m.group(1) else 1
        mult = int(m.group(2))
        cons = [FULL] * k
        supp = [FULL] * k
        for sep, kind, idx in _MOD_RE.findall(m.group(3)):
            i = int(idx) - 1
            if not 0 <= i < k:
                raise ValueError(f"factor index {idx} out of range in {raw.strip()!r}")
            c = HYPERPLANE if kind == "H" else FIXED_POINT
            supp[i] = max(supp[i], c)
            if sep == "@":
                cons[i] = max(cons[i], c)
        counts.append((mult, tuple(cons), number, tuple(supp)))
    return make_scheme(pair, counts)


def _component_text(comp: SchemeComponent) -> str:
    out = f"{comp.multiplicity}pt"
    for i, (c, s) in enumerate(zip(comp.constraints, comp.support), start=1):
        if c is not FULL:
            out += f"@{'H' if c is HYPERPLANE else 'E'}{i}"
        if s is not c:
            out += f":{'H' if s is HYPERPLANE else 'E'}{i}"
    return out


def format_descriptor(scheme: SchemeSpec) -> str:
    groups: list[list] = []
    for comp in scheme.components:
        if groups and groups[-1][0] == comp:
            groups[-1][1] += 1
        else:
            groups.append([comp, 1])
    if not groups:
        return "0*2pt"
    return " + ".join(f"{n}*{_component_text(c)}" for c, n in groups)


def constraint_tuple(k: int, overrides: dict[int, FactorConstraint]) -> tuple[FactorConstraint, ...]:
    """FULL everywhere except the given 0-based factor overrides."""
    return tuple(overrides.get(i, FULL) for i in range(k))


def component_on(pair: SegreVeronesePair, factor: int, kind: FactorConstraint,
                 multiplicity: int = 2) -> SchemeComponent:
    cons = constraint_tuple(pair.num_factors, {factor: kind})
    return SchemeComponent(multiplicity, cons)
