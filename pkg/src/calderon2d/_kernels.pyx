# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled direct-summation core for the weighted Cauchy transforms.

``cauchy_apply`` evaluates, for every target point, the sum over source
points of ``q[s, c] / (target - source)``, skipping exact coincidences
(source cell equal to the target cell).  Phases and quadrature weights are
folded into ``q`` by the caller; the conjugate kernel is obtained by passing
conjugated coordinates.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def cauchy_apply(const cnp.complex128_t[::1] targets,
                 const cnp.complex128_t[::1] sources,
                 const cnp.complex128_t[:, ::1] q):
    """Sum q[s, :] / (targets[t] - sources[s]) over s, per target t.

    Returns a (len(targets), q.shape[1]) complex array.  Terms with
    ``targets[t] == sources[s]`` (exact float equality) are skipped.
    """
    cdef Py_ssize_t nt = targets.shape[0]
    cdef Py_ssize_t ns = sources.shape[0]
    cdef Py_ssize_t nc = q.shape[1]
    if sources.shape[0] != q.shape[0]:
        raise ValueError("sources and q must have matching lengths")

    out_arr = np.zeros((nt, nc), dtype=np.complex128)
    cdef cnp.complex128_t[:, ::1] out = out_arr
    cdef Py_ssize_t t, s, c
    cdef double complex zt, d

    with nogil:
        for t in range(nt):
            zt = targets[t]
            if nc == 1:
                for s in range(ns):
                    d = zt - sources[s]
                    if d.real == 0.0 and d.imag == 0.0:
                        continue
                    out[t, 0] = out[t, 0] + q[s, 0] / d
            else:
                for s in range(ns):
                    d = zt - sources[s]
                    if d.real == 0.0 and d.imag == 0.0:
                        continue
                    d = 1.0 / d
                    for c in range(nc):
                        out[t, c] = out[t, c] + q[s, c] * d
    return out_arr
