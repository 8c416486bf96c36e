import numpy as np
import pytest

from midfield.priority_heap import AddressableMinHeap


def test_single_insert_is_root():
    h = AddressableMinHeap(4)
    h.insert(2, 5.0)
    assert h.peek() == (2, 5.0)
    assert h.extract_min() == (2, 5.0)
    assert len(h) == 0


def test_extract_order():
    h = AddressableMinHeap(8)
    for item, key in [(0, 3.0), (1, 1.0), (2, 2.0)]:
        h.insert(item, key)
    assert [h.extract_min()[1] for _ in range(3)] == [1.0, 2.0, 3.0]


def test_random_inserts_sorted(rng):
    keys = rng.random(10_000)
    h = AddressableMinHeap(10_000)
    for i, k in enumerate(keys):
        h.insert(i, k)
    out = [h.extract_min()[1] for _ in range(10_000)]
    assert out == sorted(keys.tolist())


def test_equal_keys_preserve_count():
    h = AddressableMinHeap(5)
    for i in range(5):
        h.insert(i, 1.0)
    items = {h.extract_min()[0] for _ in range(5)}
    assert items == set(range(5))


def test_decrease_key():
    h = AddressableMinHeap(8)
    for i, k in enumerate([1.0, 5.0, 6.0, 7.0]):
        h.insert(i, k)
    h.decrease_key(0, 0.5)
    assert h.peek() == (0, 0.5)
    h.decrease_key(3, 0.1)
    assert h.peek() == (3, 0.1)
    h.check()


def test_random_decrease_sequence(rng):
    n = 500
    h = AddressableMinHeap(n)
    keys = rng.random(n) * 10
    for i in range(n):
        h.insert(i, keys[i])
    for i in rng.integers(0, n, 2000):
        keys[i] *= rng.random()
        h.decrease_key(int(i), keys[i])
    out = [h.extract_min()[1] for _ in range(n)]
    assert np.all(np.diff(out) >= 0)
    assert sorted(out) == sorted(keys.tolist())


def test_errors():
    h = AddressableMinHeap(3)
    with pytest.raises(IndexError):
        h.extract_min()
    with pytest.raises(IndexError):
        h.peek()
    with pytest.raises(IndexError):
        h.insert(3, 1.0)
    h.insert(0, 1.0)
    with pytest.raises(ValueError):
        h.insert(0, 2.0)
    with pytest.raises(KeyError):
        h.decrease_key(1, 0.0)
    with pytest.raises(ValueError):
        h.decrease_key(0, 2.0)
