import threading

from secantsv.cache import CacheEntry, CacheKey, RankStore, canonical_key
from secantsv.scheme import FULL, HYPERPLANE, double_points, make_scheme
from secantsv.space import SegreVeronesePair
from secantsv.terracini import cohomology

P2P2 = SegreVeronesePair([2, 2], [2, 2])


def entry(rank, seed=0, prime=101, z=7):
    key, order = canonical_key(P2P2, double_points(P2P2, z), prime)
    return CacheEntry(key.pair, key.scheme, key.z, prime, seed, rank, rank == 35,
                      "2026-01-01T00:00:00+00:00", order)


def test_put_get(tmp_path):
    store = RankStore(tmp_path / "c.jsonl")
    e = entry(33)
    store.put(e)
    assert store.get(e.key) == e
    assert RankStore(tmp_path / "c.jsonl").get(e.key) == e


def test_get_missing(tmp_path):
    store = RankStore(tmp_path / "none.jsonl")
    assert store.get(CacheKey("P2 deg (2)", "", 1, 101)) is None
    assert len(store) == 0


def test_get_returns_best_rank(tmp_path):
    path = tmp_path / "c.jsonl"
    store = RankStore(path)
    store.put(entry(34, seed=1))
    store.put(entry(35, seed=2))
    store.put(entry(33, seed=3))
    assert store.get(entry(0).key).rank == 35
    assert RankStore(path).get(entry(0).key).rank == 35
    assert len(path.read_text().splitlines()) == 3


def test_corrupt_line_is_skipped(tmp_path, caplog):
    path = tmp_path / "c.jsonl"
    good = entry(34)
    path.write_text(good.to_json() + "\n{not json\n\n" + '{"pair": "x"}\n')
    store = RankStore(path)
    assert store.get(good.key) == good
    assert len(store) == 1
    assert "corrupt" in caplog.text


def test_permuted_pairs_share_keys():
    a = SegreVeronesePair([1, 2], [3, 2])
    b = SegreVeronesePair([2, 1], [2, 3])
    sa = make_scheme(a, [(2, (HYPERPLANE, FULL), 2)])
    sb = make_scheme(b, [(2, (FULL, HYPERPLANE), 2)])
    (ka, oa), (kb, ob) = canonical_key(a, sa, 101), canonical_key(b, sb, 101)
    assert ka == kb
    assert oa != ob
    # the constraint moved with its factor
    sc = make_scheme(b, [(2, (HYPERPLANE, FULL), 2)])
    assert canonical_key(b, sc, 101)[0] != ka


def test_store_as_rank_cache(tmp_path):
    path = tmp_path / "c.jsonl"
    first = cohomology(P2P2, double_points(P2P2, 7), cache=RankStore(path))
    lines = len(path.read_text().splitlines())
    assert lines == len(first.runs)
    again = cohomology(P2P2, double_points(P2P2, 7), cache=RankStore(path))
    assert again.rank == first.rank == 33
    assert len(path.read_text().splitlines()) == lines


def test_exact_lookup_is_order_specific(tmp_path):
    store = RankStore(tmp_path / "c.jsonl")
    a = SegreVeronesePair([1, 2], [3, 2])
    b = SegreVeronesePair([2, 1], [2, 3])
    store.record(a, double_points(a, 4), 101, 9, 18, True)
    assert store.lookup(a, double_points(a, 4), 101, 9) == 18
    assert store.lookup(b, double_points(b, 4), 101, 9) is None
    assert store.get(canonical_key(b, double_points(b, 4), 101)[0]).rank == 18


def test_ranks_only_grow_under_appends(tmp_path):
    store = RankStore(tmp_path / "c.jsonl")
    best = []
    for seed, r in enumerate([30, 34, 32, 35, 31]):
        store.put(entry(r, seed=seed))
        best.append(store.get(entry(0).key).rank)
    assert best == [30, 34, 34, 35, 35]


def test_concurrent_puts(tmp_path):
    path = tmp_path / "c.jsonl"
    store = RankStore(path)
    threads = [threading.Thread(target=lambda s=s: store.put(entry(30, seed=s))) for s in range(20)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(RankStore(path)) == 20
