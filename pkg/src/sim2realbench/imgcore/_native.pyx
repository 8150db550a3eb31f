# Hot correlation kernels with reflect-101 borders.
#
# These back the Gaussian windowing used by the structural-similarity and
# naturalness metrics, which dominates batch runtime together with the
# FFT-based metrics. A numpy/scipy fallback with identical semantics lives
# in imgcore.filters.

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline Py_ssize_t reflect101(Py_ssize_t i, Py_ssize_t n) nogil:
    # reflect about the edge sample without duplicating it: d c b | a b c d | c b a
    while i < 0 or i >= n:
        if i < 0:
            i = -i
        if i >= n:
            i = 2 * n - 2 - i
    return i


def correlate2d_reflect(double[:, :] img, double[:, :] taps):
    """Dense KxK correlation, same-size output, reflect-101 borders."""
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1]
    cdef Py_ssize_t kh = taps.shape[0], kw = taps.shape[1]
    cdef Py_ssize_t ry = kh // 2, rx = kw // 2
    out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, :] out = out_arr
    cdef Py_ssize_t y, x, j, i
    cdef double acc
    with nogil:
        for y in range(h):
            for x in range(w):
                acc = 0.0
                for j in range(kh):
                    for i in range(kw):
                        acc += taps[j, i] * img[
                            reflect101(y + j - ry, h), reflect101(x + i - rx, w)
                        ]
                out[y, x] = acc
    return out_arr


def correlate_sep_reflect(double[:, :] img, double[:] taps):
    """Separable correlation (rows then columns) with a 1-D tap vector."""
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1]
    cdef Py_ssize_t k = taps.shape[0]
    cdef Py_ssize_t r = k // 2
    tmp_arr = np.empty((h, w), dtype=np.float64)
    out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, :] tmp = tmp_arr
    cdef double[:, :] out = out_arr
    cdef Py_ssize_t y, x, i
    cdef double acc
    with nogil:
        for y in range(h):
            for x in range(w):
                acc = 0.0
                for i in range(k):
                    acc += taps[i] * img[y, reflect101(x + i - r, w)]
                tmp[y, x] = acc
        for y in range(h):
            for x in range(w):
                acc = 0.0
                for i in range(k):
                    acc += taps[i] * tmp[reflect101(y + i - r, h), x]
                out[y, x] = acc
    return out_arr
