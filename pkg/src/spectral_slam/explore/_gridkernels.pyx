# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled grid kernels: laser ray casting and Dijkstra distance fields.

Mirrors _kernels_py exactly (same stepping arithmetic, neighbor order and
heap tie-breaking) so the two backends are interchangeable bit-for-bit.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, floor, sqrt
from libc.stdlib cimport free, malloc, realloc

cnp.import_array()

cdef signed char _UNKNOWN = -1
cdef signed char _FREE = 0
cdef signed char _OCCUPIED = 1


def cast_rays(signed char[:, ::1] world, signed char[:, ::1] belief,
              double x, double y, double theta, double resolution,
              double max_range, int n_beams, double fov):
    """See _kernels_py.cast_rays."""
    cdef Py_ssize_t height = world.shape[0]
    cdef Py_ssize_t width = world.shape[1]
    cdef double step = 0.5 * resolution
    cdef int n_steps = <int>(max_range / step)
    cdef Py_ssize_t row0 = <Py_ssize_t>floor(y / resolution)
    cdef Py_ssize_t col0 = <Py_ssize_t>floor(x / resolution)
    cdef int b, s
    cdef double ang, dx, dy, dist
    cdef Py_ssize_t row, col
    if 0 <= row0 < height and 0 <= col0 < width and world[row0, col0] != _OCCUPIED:
        belief[row0, col0] = _FREE
    for b in range(n_beams):
        if n_beams > 1:
            ang = theta - 0.5 * fov + b * fov / (n_beams - 1)
        else:
            ang = theta
        dx = cos(ang)
        dy = sin(ang)
        for s in range(1, n_steps + 1):
            dist = s * step
            row = <Py_ssize_t>floor((y + dy * dist) / resolution)
            col = <Py_ssize_t>floor((x + dx * dist) / resolution)
            if row < 0 or row >= height or col < 0 or col >= width:
                break
            if world[row, col] == _OCCUPIED:
                belief[row, col] = _OCCUPIED
                break
            belief[row, col] = _FREE


cdef struct HeapEntry:
    double dist
    long idx


cdef inline bint _entry_lt(HeapEntry a, HeapEntry b) nogil:
    if a.dist != b.dist:
        return a.dist < b.dist
    return a.idx < b.idx


cdef class _Heap:
    """Binary min-heap over (dist, idx) with lexicographic ordering, matching
    Python's heapq on 2-tuples."""
    cdef HeapEntry* data
    cdef Py_ssize_t size
    cdef Py_ssize_t capacity

    def __cinit__(self, Py_ssize_t capacity):
        self.data = <HeapEntry*>malloc(capacity * sizeof(HeapEntry))
        if self.data == NULL:
            raise MemoryError()
        self.size = 0
        self.capacity = capacity

    def __dealloc__(self):
        if self.data != NULL:
            free(self.data)

    cdef void push(self, double dist, long idx):
        cdef Py_ssize_t pos, parent_pos
        cdef HeapEntry entry
        if self.size == self.capacity:
            self.capacity *= 2
            self.data = <HeapEntry*>realloc(self.data, self.capacity * sizeof(HeapEntry))
            if self.data == NULL:
                raise MemoryError()
        entry.dist = dist
        entry.idx = idx
        pos = self.size
        self.size += 1
        while pos > 0:
            parent_pos = (pos - 1) >> 1
            if _entry_lt(entry, self.data[parent_pos]):
                self.data[pos] = self.data[parent_pos]
                pos = parent_pos
            else:
                break
        self.data[pos] = entry

    cdef HeapEntry pop(self):
        cdef HeapEntry top = self.data[0]
        cdef HeapEntry last
        cdef Py_ssize_t pos = 0
        cdef Py_ssize_t child
        self.size -= 1
        if self.size > 0:
            last = self.data[self.size]
            while True:
                child = 2 * pos + 1
                if child >= self.size:
                    break
                if child + 1 < self.size and _entry_lt(self.data[child + 1], self.data[child]):
                    child += 1
                if _entry_lt(self.data[child], last):
                    self.data[pos] = self.data[child]
                    pos = child
                else:
                    break
            self.data[pos] = last
        return top


def dijkstra_field(cnp.uint8_t[:, ::1] passable, Py_ssize_t start_row,
                   Py_ssize_t start_col):
    """See _kernels_py.dijkstra_field."""
    cdef Py_ssize_t height = passable.shape[0]
    cdef Py_ssize_t width = passable.shape[1]
    cdef cnp.ndarray dist_arr = np.full((height, width), np.inf)
    cdef cnp.ndarray parent_arr = np.full((height, width), -1, dtype=np.int64)
    cdef double[:, ::1] dist = dist_arr
    cdef long[:, ::1] parent = parent_arr
    cdef double SQRT2 = sqrt(2.0)
    # neighbor order shared with the pure-Python kernel
    cdef long[8] drs = [-1, 1, 0, 0, -1, -1, 1, 1]
    cdef long[8] dcs = [0, 0, -1, 1, -1, 1, -1, 1]
    cdef double[8] costs = [1.0, 1.0, 1.0, 1.0, SQRT2, SQRT2, SQRT2, SQRT2]
    cdef HeapEntry top
    cdef long idx, row, col, nr, nc, k
    cdef double d, nd

    if not passable[start_row, start_col]:
        return dist_arr, parent_arr
    dist[start_row, start_col] = 0.0
    cdef _Heap heap = _Heap(max(64, height * width // 4))
    heap.push(0.0, start_row * width + start_col)
    while heap.size > 0:
        top = heap.pop()
        d = top.dist
        idx = top.idx
        row = idx // width
        col = idx - row * width
        if d > dist[row, col]:
            continue
        for k in range(8):
            nr = row + drs[k]
            nc = col + dcs[k]
            if nr < 0 or nr >= height or nc < 0 or nc >= width:
                continue
            if not passable[nr, nc]:
                continue
            nd = d + costs[k]
            if nd < dist[nr, nc]:
                dist[nr, nc] = nd
                parent[nr, nc] = idx
                heap.push(nd, nr * width + nc)
    return dist_arr, parent_arr
