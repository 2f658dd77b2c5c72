# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the fallback kernels.

Semantics are pinned by footlens._kernels._fallback: the float kernels agree
to round-off, the thinning kernel agrees exactly (identical heap ordering).
"""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport free, malloc

cnp.import_array()

cdef extern from "complex.h" nogil:
    double complex clog(double complex)
    double complex cexp(double complex)
    double cabs(double complex)


def sc_segment_integrals(za, zb, sing, prevertices, betas,
                         jac_nodes, jac_weights, leg_nodes, leg_weights,
                         int max_panels=200):
    """See footlens._kernels._fallback.sc_segment_integrals."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] za_ = np.ascontiguousarray(za, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zb_ = np.ascontiguousarray(zb, dtype=np.complex128)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] sing_ = np.ascontiguousarray(sing, dtype=np.int64)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] z_ = np.ascontiguousarray(prevertices, dtype=np.complex128)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] b_ = np.ascontiguousarray(betas, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] jn = np.ascontiguousarray(jac_nodes, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] jw = np.ascontiguousarray(jac_weights, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ln = np.ascontiguousarray(leg_nodes, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lw = np.ascontiguousarray(leg_weights, dtype=np.float64)

    cdef Py_ssize_t m = za_.shape[0]
    cdef Py_ssize_t n = z_.shape[0]
    cdef Py_ssize_t q = ln.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.zeros(m, dtype=np.complex128)

    cdef Py_ssize_t j, p, k, iq
    cdef double complex seg, u, cur, pt, acc, val, panel, pref
    cdef double rem, seglen, dmin, d, half, node, weight
    cdef long ab

    for j in range(m):
        seg = zb_[j] - za_[j]
        seglen = cabs(seg)
        if seglen == 0.0:
            continue
        u = seg / seglen
        cur = za_[j]
        rem = seglen
        ab = sing_[j]
        for p in range(max_panels):
            if rem <= 1e-15 * seglen:
                break
            dmin = 1e300
            for k in range(n):
                if k == ab:
                    continue
                d = cabs(z_[k] - cur)
                if d < dmin:
                    dmin = d
            half = rem
            if 2.0 * dmin < half:
                half = 2.0 * dmin
            panel = 0.0
            for iq in range(q):
                if ab >= 0:
                    node = jn[ab, iq]
                    weight = jw[ab, iq]
                else:
                    node = ln[iq]
                    weight = lw[iq]
                pt = cur + (node + 1.0) * (0.5 * half * u)
                acc = 0.0
                for k in range(n):
                    if k == ab:
                        continue
                    acc = acc + b_[k] * clog(1.0 - pt / z_[k])
                val = cexp(acc)
                panel = panel + weight * val
            panel = panel * (0.5 * half * u)
            if ab >= 0:
                pref = cexp(b_[ab] * clog(-(half * u) / (2.0 * z_[ab])))
                panel = panel * pref
            out[j] = out[j] + panel
            cur = cur + half * u
            rem = rem - half
            ab = -1
    return out


def min_edge_distance(px, py, ax, ay, bx, by):
    """See footlens._kernels._fallback.min_edge_distance."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] px_ = np.ascontiguousarray(px, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] py_ = np.ascontiguousarray(py, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ax_ = np.ascontiguousarray(ax, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ay_ = np.ascontiguousarray(ay, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] bx_ = np.ascontiguousarray(bx, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] by_ = np.ascontiguousarray(by, dtype=np.float64)

    cdef Py_ssize_t m = px_.shape[0]
    cdef Py_ssize_t e = ax_.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m, dtype=np.float64)

    cdef Py_ssize_t i, k
    cdef double ex, ey, ee, dx, dy, t, rx, ry, dd, best
    for i in range(m):
        best = 1e300
        for k in range(e):
            ex = bx_[k] - ax_[k]
            ey = by_[k] - ay_[k]
            ee = ex * ex + ey * ey
            if ee == 0.0:
                ee = 1.0
            dx = px_[i] - ax_[k]
            dy = py_[i] - ay_[k]
            t = (dx * ex + dy * ey) / ee
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
            rx = dx - t * ex
            ry = dy - t * ey
            dd = rx * rx + ry * ry
            if dd < best:
                best = dd
        out[i] = best ** 0.5
    return out


cdef struct HeapEntry:
    double d
    long y
    long x


cdef inline bint _less(HeapEntry a, HeapEntry b) nogil:
    if a.d != b.d:
        return a.d < b.d
    if a.y != b.y:
        return a.y < b.y
    return a.x < b.x


cdef class _Heap:
    # Binary min-heap over (d, y, x), ordering identical to Python's heapq
    # on the equivalent tuples.
    cdef HeapEntry* data
    cdef Py_ssize_t size
    cdef Py_ssize_t cap

    def __cinit__(self, Py_ssize_t cap):
        self.data = <HeapEntry*> malloc(cap * sizeof(HeapEntry))
        self.size = 0
        self.cap = cap

    def __dealloc__(self):
        if self.data != NULL:
            free(self.data)

    cdef void push(self, double d, long y, long x):
        cdef HeapEntry e
        cdef Py_ssize_t i, parent
        if self.size >= self.cap:
            self._grow()
        e.d = d
        e.y = y
        e.x = x
        i = self.size
        self.size += 1
        while i > 0:
            parent = (i - 1) >> 1
            if _less(e, self.data[parent]):
                self.data[i] = self.data[parent]
                i = parent
            else:
                break
        self.data[i] = e

    cdef void _grow(self):
        cdef Py_ssize_t newcap = self.cap * 2
        cdef HeapEntry* nd = <HeapEntry*> malloc(newcap * sizeof(HeapEntry))
        cdef Py_ssize_t i
        for i in range(self.size):
            nd[i] = self.data[i]
        free(self.data)
        self.data = nd
        self.cap = newcap

    cdef HeapEntry pop(self):
        cdef HeapEntry top = self.data[0]
        cdef HeapEntry e
        cdef Py_ssize_t i, child
        self.size -= 1
        if self.size > 0:
            e = self.data[self.size]
            i = 0
            while True:
                child = 2 * i + 1
                if child >= self.size:
                    break
                if child + 1 < self.size and _less(self.data[child + 1], self.data[child]):
                    child += 1
                if _less(self.data[child], e):
                    self.data[i] = self.data[child]
                    i = child
                else:
                    break
            self.data[i] = e
        return top


cdef int _OFFY[8]
cdef int _OFFX[8]
_OFFY[0] = -1; _OFFX[0] = -1
_OFFY[1] = -1; _OFFX[1] = 0
_OFFY[2] = -1; _OFFX[2] = 1
_OFFY[3] = 0;  _OFFX[3] = -1
_OFFY[4] = 0;  _OFFX[4] = 1
_OFFY[5] = 1;  _OFFX[5] = -1
_OFFY[6] = 1;  _OFFX[6] = 0
_OFFY[7] = 1;  _OFFX[7] = 1


cdef inline int _ncode(cnp.uint8_t[:, ::1] occ, long y, long x,
                       long h, long w) nogil:
    cdef int code = 0
    cdef int i
    cdef long yy, xx
    for i in range(8):
        yy = y + _OFFY[i]
        xx = x + _OFFX[i]
        if 0 <= yy < h and 0 <= xx < w and occ[yy, xx]:
            code |= 1 << i
    return code


cdef inline int _popcount(int v) nogil:
    cdef int c = 0
    while v:
        v &= v - 1
        c += 1
    return c


def thin_skeleton(occ, dist, anchors, lut):
    """See footlens._kernels._fallback.thin_skeleton."""
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] occ_ = np.ascontiguousarray(occ, dtype=np.uint8).copy()
    cdef cnp.ndarray[cnp.float64_t, ndim=2] dist_ = np.ascontiguousarray(dist, dtype=np.float64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] anch_ = np.ascontiguousarray(anchors, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] lut_ = np.ascontiguousarray(lut, dtype=np.uint8)

    cdef cnp.uint8_t[:, ::1] o = occ_
    cdef cnp.float64_t[:, ::1] d = dist_
    cdef cnp.uint8_t[:, ::1] a = anch_
    cdef cnp.uint8_t[::1] l = lut_

    cdef long h = occ_.shape[0]
    cdef long w = occ_.shape[1]
    cdef Py_ssize_t n_occ = int(np.count_nonzero(occ_))
    cdef _Heap heap = _Heap(10 * n_occ + 16)

    cdef long y, x, yy, xx
    cdef int i, code
    cdef HeapEntry top

    for y in range(h):
        for x in range(w):
            if o[y, x] and not a[y, x]:
                heap.push(d[y, x], y, x)
    while heap.size > 0:
        top = heap.pop()
        y = top.y
        x = top.x
        if not o[y, x] or a[y, x]:
            continue
        if not l[_ncode(o, y, x, h, w)]:
            continue
        o[y, x] = 0
        for i in range(8):
            yy = y + _OFFY[i]
            xx = x + _OFFX[i]
            if 0 <= yy < h and 0 <= xx < w and o[yy, xx] and not a[yy, xx]:
                heap.push(d[yy, xx], yy, xx)

    for y in range(h):
        for x in range(w):
            if o[y, x]:
                heap.push(d[y, x], y, x)
    while heap.size > 0:
        top = heap.pop()
        y = top.y
        x = top.x
        if not o[y, x]:
            continue
        code = _ncode(o, y, x, h, w)
        if _popcount(code) < 2:
            continue
        if not l[code]:
            continue
        o[y, x] = 0
        for i in range(8):
            yy = y + _OFFY[i]
            xx = x + _OFFX[i]
            if 0 <= yy < h and 0 <= xx < w and o[yy, xx]:
                heap.push(d[yy, xx], yy, xx)

    return occ_
