"""Addressable binary min-heap.

The heap lives in three arrays so the jitted solvers can drive it directly:
``keys[slot]`` and ``items[slot]`` hold entries, ``pos[item]`` maps a grid
index back to its slot (-1 when absent).  :class:`AddressableMinHeap` wraps
the same kernels for use from Python.  No ordering is promised among equal
keys.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _sift_up(keys, items, pos, slot):
    key = keys[slot]
    item = items[slot]
    while slot > 0:
        parent = (slot - 1) >> 1
        if keys[parent] <= key:
            break
        keys[slot] = keys[parent]
        items[slot] = items[parent]
        pos[items[slot]] = slot
        slot = parent
    keys[slot] = key
    items[slot] = item
    pos[item] = slot


@njit(cache=True)
def _sift_down(keys, items, pos, slot, n):
    key = keys[slot]
    item = items[slot]
    while True:
        child = 2 * slot + 1
        if child >= n:
            break
        if child + 1 < n and keys[child + 1] < keys[child]:
            child += 1
        if keys[child] >= key:
            break
        keys[slot] = keys[child]
        items[slot] = items[child]
        pos[items[slot]] = slot
        slot = child
    keys[slot] = key
    items[slot] = item
    pos[item] = slot


@njit(cache=True)
def heap_push(keys, items, pos, n, item, key):
    """Insert ``item`` with ``key``; returns the new size."""
    if pos[item] >= 0:
        raise ValueError("already in heap")
    keys[n] = key
    items[n] = item
    pos[item] = n
    _sift_up(keys, items, pos, n)
    return n + 1


@njit(cache=True)
def heap_pop(keys, items, pos, n):
    """Remove the root; returns ``(item, key, new_size)``."""
    if n == 0:
        raise IndexError("empty")
    item = items[0]
    key = keys[0]
    pos[item] = -1
    n -= 1
    if n > 0:
        keys[0] = keys[n]
        items[0] = items[n]
        pos[items[0]] = 0
        _sift_down(keys, items, pos, 0, n)
    return item, key, n


@njit(cache=True)
def heap_decrease(keys, items, pos, item, key):
    slot = pos[item]
    if slot < 0:
        raise KeyError("not in heap")
    if key > keys[slot]:
        raise ValueError("key increase forbidden")
    keys[slot] = key
    _sift_up(keys, items, pos, slot)


class AddressableMinHeap:
    """Min-heap over grid indices ``0 .. capacity-1`` with decrease-key."""

    def __init__(self, capacity: int):
        self.keys = np.empty(capacity, np.float64)
        self.items = np.empty(capacity, np.int64)
        self.pos = np.full(capacity, -1, np.int64)
        self.n = 0

    def __len__(self):
        return self.n

    def __contains__(self, item):
        return 0 <= item < len(self.pos) and self.pos[item] >= 0

    def insert(self, item: int, key: float) -> None:
        if not 0 <= item < len(self.pos):
            raise IndexError(f"grid index {item} outside heap capacity")
        self.n = heap_push(self.keys, self.items, self.pos, self.n, item, key)

    def extract_min(self) -> tuple[int, float]:
        item, key, self.n = heap_pop(self.keys, self.items, self.pos, self.n)
        return int(item), float(key)

    def peek(self) -> tuple[int, float]:
        if self.n == 0:
            raise IndexError("empty")
        return int(self.items[0]), float(self.keys[0])

    def decrease_key(self, item: int, key: float) -> None:
        if item not in self:
            raise KeyError(f"grid index {item} not in heap")
        heap_decrease(self.keys, self.items, self.pos, item, key)

    def key_of(self, item: int) -> float:
        return float(self.keys[self.pos[item]])

    def check(self) -> None:
        """Assert the heap property and that ``pos`` inverts the layout."""
        n = self.n
        for slot in range(1, n):
            assert self.keys[(slot - 1) // 2] <= self.keys[slot], f"heap property broken at slot {slot}"
        for slot in range(n):
            assert self.pos[self.items[slot]] == slot
        assert np.count_nonzero(self.pos >= 0) == n
