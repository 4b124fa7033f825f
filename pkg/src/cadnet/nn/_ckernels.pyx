# cython: boundscheck=False, wraparound=False, cdivision=True
"""Direct-loop convolution kernels, independent of BLAS.

Same contracts as kernels_numpy; arrays must be C-contiguous and share
one floating dtype. Loops are ordered so the innermost index walks
contiguous memory.
"""

import numpy as np

ctypedef fused real:
    float
    double


def conv1d_forward(real[:, :, ::1] xpad, real[:, :, ::1] w, real[::1] bias):
    cdef Py_ssize_t batch = xpad.shape[0]
    cdef Py_ssize_t cin = xpad.shape[1]
    cdef Py_ssize_t lpad = xpad.shape[2]
    cdef Py_ssize_t filt = w.shape[0]
    cdef Py_ssize_t k = w.shape[2]
    cdef Py_ssize_t lout = lpad - k + 1
    if real is float:
        out_arr = np.empty((batch, filt, lout), dtype=np.float32)
    else:
        out_arr = np.empty((batch, filt, lout), dtype=np.float64)
    cdef real[:, :, ::1] out = out_arr
    cdef Py_ssize_t b, f, c, i, j
    cdef real wv
    for b in range(batch):
        for f in range(filt):
            for i in range(lout):
                out[b, f, i] = bias[f]
            for c in range(cin):
                for j in range(k):
                    wv = w[f, c, j]
                    for i in range(lout):
                        out[b, f, i] += wv * xpad[b, c, i + j]
    return out_arr


def conv1d_grad_weights(real[:, :, ::1] xpad, real[:, :, ::1] gout):
    cdef Py_ssize_t batch = xpad.shape[0]
    cdef Py_ssize_t cin = xpad.shape[1]
    cdef Py_ssize_t lpad = xpad.shape[2]
    cdef Py_ssize_t filt = gout.shape[1]
    cdef Py_ssize_t lout = gout.shape[2]
    cdef Py_ssize_t k = lpad - lout + 1
    if real is float:
        gw_arr = np.zeros((filt, cin, k), dtype=np.float32)
        gb_arr = np.zeros(filt, dtype=np.float32)
    else:
        gw_arr = np.zeros((filt, cin, k), dtype=np.float64)
        gb_arr = np.zeros(filt, dtype=np.float64)
    cdef real[:, :, ::1] gw = gw_arr
    cdef real[::1] gb = gb_arr
    cdef Py_ssize_t b, f, c, i, j
    cdef real v, acc
    for f in range(filt):
        acc = 0
        for b in range(batch):
            for i in range(lout):
                acc += gout[b, f, i]
        gb[f] = acc
    for b in range(batch):
        for f in range(filt):
            for c in range(cin):
                for i in range(lout):
                    v = gout[b, f, i]
                    for j in range(k):
                        gw[f, c, j] += v * xpad[b, c, i + j]
    return gw_arr, gb_arr
