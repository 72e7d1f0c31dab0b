import os
import random

import pytest

import roarlab
from roarlab import ConciseBitmap, RoaringBitmap, WahBitmap

SAMPLE = os.path.join(os.path.dirname(__file__), "..", "..", "data", "sample_table.csv")


def test_roaring_ops_match_python_sets():
    rng = random.Random(3)
    a = {rng.randrange(1 << 20) for _ in range(20000)}
    b = {rng.randrange(1 << 20) for _ in range(20000)}
    ra, rb = RoaringBitmap(list(a)), RoaringBitmap(list(b))
    assert (ra & rb).to_list() == sorted(a & b)
    assert (ra | rb).to_list() == sorted(a | b)
    assert len(ra) == len(a)
    x = sorted(a)[100]
    assert x in ra
    assert ra.select(ra.rank(x) - 1) == x


def test_three_chunk_layout():
    v = [62 * k for k in range(1000)] + list(range(1 << 16, (1 << 16) + 100)) + list(range(2 << 16, 3 << 16, 2))
    r = RoaringBitmap(v)
    assert r.containers() == [(0, "array", 1000), (1, "array", 100), (2, "bitmap", 32768)]


def test_serialize_round_trip_and_errors():
    r = RoaringBitmap(roarlab.gen_uniform(2 ** -4, 50000, 1))
    data = r.serialize()
    assert len(data) == r.size_in_bytes()
    assert RoaringBitmap.deserialize(data) == r
    with pytest.raises(ValueError):
        RoaringBitmap.deserialize(data[:-1])


def test_multi_or():
    rng = random.Random(9)
    bitmaps = [RoaringBitmap([rng.randrange(1 << 22) for _ in range(500)]) for _ in range(50)]
    fold = RoaringBitmap()
    for b in bitmaps:
        fold |= b
    assert roarlab.multi_or(bitmaps) == fold


def test_rle_sizes_and_ops():
    s = [62 * k for k in range(1000)]
    assert ConciseBitmap.encode(s).size_bits == 32 * 1000
    assert WahBitmap.encode(s).decode() == s
    a = WahBitmap.encode(list(range(0, 3000, 3)))
    b = WahBitmap.encode(list(range(0, 3000, 5)))
    assert (a & b).decode() == list(range(0, 3000, 15))
    c = ConciseBitmap.encode([1, 2, 3])
    c.append(100)
    assert c.decode() == [1, 2, 3, 100]


def test_build_index():
    index = roarlab.build_index(SAMPLE)
    assert set(index) == {"region", "status", "age", "account", "day", "flag"}
    assert sum(len(b) for b in index["status"].values()) == 20000
