"""Append-only JSON Lines store of Terracini ranks.

One record per computed rank.  Keys use the order-independent form of the
pair, with the scheme rewritten in that factor order, so permuted inputs
share entries.  The factor permutation is stored with each record: an exact
(seed-level) lookup only reuses ranks computed in the same order, since
the sampled points depend on it, while :meth:`RankStore.get` takes the best
rank over every seed and order.
"""

from __future__ import annotations

import json
import logging
import os
import threading
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Union

from .scheme import SchemeComponent, SchemeSpec
from .space import SegreVeronesePair

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CacheKey:
    pair: str
    scheme: str
    z: int
    prime: int
    seed: Optional[int] = None

    def prefix(self) -> tuple:
        return (self.pair, self.scheme, self.z, self.prime)


@dataclass(frozen=True)
class CacheEntry:
    pair: str
    scheme: str
    z: int
    prime: int
    seed: int
    rank: int
    certified: bool
    timestamp: str
    order: tuple[int, ...] = ()

    @property
    def key(self) -> CacheKey:
        return CacheKey(self.pair, self.scheme, self.z, self.prime, self.seed)

    def to_json(self) -> str:
        d = asdict(self)
        d["order"] = list(self.order)
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "CacheEntry":
        d = json.loads(line)
        return cls(str(d["pair"]), str(d["scheme"]), int(d["z"]), int(d["prime"]),
                   int(d["seed"]), int(d["rank"]), bool(d["certified"]),
                   str(d["timestamp"]), tuple(int(i) for i in d.get("order", ())))


def _order(pair: SegreVeronesePair) -> tuple[int, ...]:
    dims, degs = pair.factor_dims, pair.multidegree
    return tuple(sorted(range(pair.num_factors), key=lambda i: (-dims[i], -degs[i], i)))


def canonical_key(pair: SegreVeronesePair, scheme: SchemeSpec, prime: int,
                  seed: Optional[int] = None) -> tuple[CacheKey, tuple[int, ...]]:
    """Key in normalized factor order, plus the permutation that was applied."""
    order = _order(pair)
    norm = pair.normalized()
    comps = tuple(
        SchemeComponent(c.multiplicity, tuple(c.constraints[i] for i in order),
                        tuple(c.support[i] for i in order))
        for c in scheme.components
    )
    desc = SchemeSpec(norm, comps).descriptor()
    return CacheKey(norm.text(), desc, len(scheme), prime, seed), order


class RankStore:
    """JSONL-backed cache; also usable as the rank cache of ``cohomology``."""

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._best: dict[tuple, CacheEntry] = {}
        self._exact: dict[tuple, CacheEntry] = {}
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    entry = CacheEntry.from_json(line)
                except (ValueError, KeyError, TypeError) as exc:
                    log.warning("%s:%d: skipping corrupt cache line (%s)", self.path, lineno, exc)
                    continue
                self._index(entry)

    def _index(self, entry: CacheEntry) -> None:
        p = entry.key.prefix()
        if p not in self._best or entry.rank > self._best[p].rank:
            self._best[p] = entry
        self._exact[p + (entry.seed, entry.order)] = entry

    def __len__(self) -> int:
        return len(self._exact)

    def get(self, key: CacheKey) -> Optional[CacheEntry]:
        """Highest-rank entry for the key's prefix, whatever its seed."""
        return self._best.get(key.prefix())

    def put(self, entry: CacheEntry) -> None:
        line = entry.to_json() + "\n"
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            fd = os.open(self.path, os.O_WRONLY | os.O_APPEND | os.O_CREAT, 0o644)
            try:
                os.write(fd, line.encode("utf-8"))
            finally:
                os.close(fd)
            self._index(entry)

    # rank-cache protocol used by the Terracini layer
    def lookup(self, pair: SegreVeronesePair, scheme: SchemeSpec, prime: int,
               seed: int) -> Optional[int]:
        key, order = canonical_key(pair, scheme, prime, seed)
        hit = self._exact.get(key.prefix() + (seed, order))
        return None if hit is None else hit.rank

    def record(self, pair: SegreVeronesePair, scheme: SchemeSpec, prime: int,
               seed: int, rank: int, certified: bool) -> None:
        key, order = canonical_key(pair, scheme, prime, seed)
        stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        self.put(CacheEntry(key.pair, key.scheme, key.z, prime, seed, rank, certified,
                            stamp, order))
