# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the hot kernels; same contracts as ``_fallback``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport tanh

cnp.import_array()

NAME = "cython"


def cheb_basis(x, int order):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64).reshape(-1)
    cdef Py_ssize_t n = xv.shape[0]
    out = np.zeros((n, order + 1, 5))
    cdef double[:, :, ::1] o = out
    cdef Py_ssize_t i, k
    cdef int d
    cdef double xi
    cdef double scale[5]
    scale[0] = 1.0
    for d in range(1, 5):
        scale[d] = 2.0 * scale[d - 1]
    for i in range(n):
        xi = 2.0 * xv[i] - 1.0
        o[i, 0, 0] = 1.0
        if order >= 1:
            o[i, 1, 0] = xi
            o[i, 1, 1] = 1.0
        for k in range(1, order):
            o[i, k + 1, 0] = 2.0 * xi * o[i, k, 0] - o[i, k - 1, 0]
            for d in range(1, 5):
                o[i, k + 1, d] = 2.0 * xi * o[i, k, d] + 2.0 * d * o[i, k, d - 1] - o[i, k - 1, d]
        for k in range(order + 1):
            for d in range(1, 5):
                o[i, k, d] *= scale[d]
    return out


cdef class _Net:
    """Scratch space and layer layout for one parameter vector."""
    cdef Py_ssize_t nl, maxw
    cdef Py_ssize_t[::1] fin, fout, offw, offb
    cdef double[:, :, ::1] a      # (nl+1, 5, maxw) layer inputs
    cdef double[:, :, ::1] z      # (nl, 5, maxw) pre-activations
    cdef double[:, :, ::1] f      # (nl, 6, maxw) tanh tower t, f1..f5
    cdef double[:, ::1] ab        # (5, maxw) adjoint of layer input
    cdef double[:, ::1] zb        # (5, maxw) adjoint of pre-activation

    def __init__(self, sizes, Py_ssize_t nparams):
        sizes = [int(s) for s in sizes]
        self.nl = len(sizes) - 1
        self.maxw = max(sizes)
        self.fin = np.array(sizes[:-1], dtype=np.intp)
        self.fout = np.array(sizes[1:], dtype=np.intp)
        offw = []
        offb = []
        off = 0
        for fi, fo in zip(sizes[:-1], sizes[1:]):
            offw.append(off)
            off += fi * fo
            offb.append(off)
            off += fo
        if off != nparams:
            raise ValueError(f"parameter vector has length {nparams}, layer sizes need {off}")
        self.offw = np.array(offw, dtype=np.intp)
        self.offb = np.array(offb, dtype=np.intp)
        self.a = np.zeros((self.nl + 1, 5, self.maxw))
        self.z = np.zeros((self.nl, 5, self.maxw))
        self.f = np.zeros((self.nl, 6, self.maxw))
        self.ab = np.zeros((5, self.maxw))
        self.zb = np.zeros((5, self.maxw))

    cdef void forward(self, const double[::1] p, double x) noexcept nogil:
        cdef Py_ssize_t l, o, i, ni, no
        cdef int k
        cdef double s, t, t2, f1, f2, f3, f4, z1, z2, z3, z4, z1s
        self.a[0, 0, 0] = x
        self.a[0, 1, 0] = 1.0
        self.a[0, 2, 0] = 0.0
        self.a[0, 3, 0] = 0.0
        self.a[0, 4, 0] = 0.0
        for l in range(self.nl):
            ni = self.fin[l]
            no = self.fout[l]
            for o in range(no):
                for k in range(5):
                    s = 0.0
                    for i in range(ni):
                        s = s + p[self.offw[l] + o * ni + i] * self.a[l, k, i]
                    self.z[l, k, o] = s
                self.z[l, 0, o] += p[self.offb[l] + o]
            if l == self.nl - 1:
                for o in range(no):
                    for k in range(5):
                        self.a[l + 1, k, o] = self.z[l, k, o]
                continue
            for o in range(no):
                t = tanh(self.z[l, 0, o])
                t2 = t * t
                f1 = 1.0 - t2
                f2 = -2.0 * t * f1
                f3 = f1 * (6.0 * t2 - 2.0)
                f4 = f1 * t * (16.0 - 24.0 * t2)
                self.f[l, 0, o] = t
                self.f[l, 1, o] = f1
                self.f[l, 2, o] = f2
                self.f[l, 3, o] = f3
                self.f[l, 4, o] = f4
                self.f[l, 5, o] = f1 * (16.0 - 120.0 * t2 + 120.0 * t2 * t2)
                z1 = self.z[l, 1, o]
                z2 = self.z[l, 2, o]
                z3 = self.z[l, 3, o]
                z4 = self.z[l, 4, o]
                z1s = z1 * z1
                self.a[l + 1, 0, o] = t
                self.a[l + 1, 1, o] = f1 * z1
                self.a[l + 1, 2, o] = f2 * z1s + f1 * z2
                self.a[l + 1, 3, o] = f3 * z1s * z1 + 3.0 * f2 * z1 * z2 + f1 * z3
                self.a[l + 1, 4, o] = (f4 * z1s * z1s + 6.0 * f3 * z1s * z2
                                       + f2 * (3.0 * z2 * z2 + 4.0 * z1 * z3) + f1 * z4)

    cdef void backward(self, const double[::1] p, double[::1] g) noexcept nogil:
        # expects self.zb to hold the adjoint of the output jet
        cdef Py_ssize_t l, o, i, ni, no
        cdef int k
        cdef double s, f1, f2, f3, f4, f5, z1, z2, z3, z4, z1s
        cdef double y0, y1, y2, y3, y4, f1b, f2b, f3b, f4b
        l = self.nl - 1
        while True:
            ni = self.fin[l]
            no = self.fout[l]
            for o in range(no):
                for i in range(ni):
                    s = 0.0
                    for k in range(5):
                        s = s + self.zb[k, o] * self.a[l, k, i]
                    g[self.offw[l] + o * ni + i] += s
                g[self.offb[l] + o] += self.zb[0, o]
            if l == 0:
                break
            for i in range(ni):
                for k in range(5):
                    s = 0.0
                    for o in range(no):
                        s = s + p[self.offw[l] + o * ni + i] * self.zb[k, o]
                    self.ab[k, i] = s
            l -= 1
            for o in range(self.fout[l]):
                f1 = self.f[l, 1, o]
                f2 = self.f[l, 2, o]
                f3 = self.f[l, 3, o]
                f4 = self.f[l, 4, o]
                f5 = self.f[l, 5, o]
                z1 = self.z[l, 1, o]
                z2 = self.z[l, 2, o]
                z3 = self.z[l, 3, o]
                z4 = self.z[l, 4, o]
                z1s = z1 * z1
                y0 = self.ab[0, o]
                y1 = self.ab[1, o]
                y2 = self.ab[2, o]
                y3 = self.ab[3, o]
                y4 = self.ab[4, o]
                self.zb[4, o] = y4 * f1
                self.zb[3, o] = y3 * f1 + y4 * 4.0 * f2 * z1
                self.zb[2, o] = y2 * f1 + y3 * 3.0 * f2 * z1 + y4 * (6.0 * f3 * z1s + 6.0 * f2 * z2)
                self.zb[1, o] = (y1 * f1 + y2 * 2.0 * f2 * z1
                                 + y3 * (3.0 * f3 * z1s + 3.0 * f2 * z2)
                                 + y4 * (4.0 * f4 * z1s * z1 + 12.0 * f3 * z1 * z2 + 4.0 * f2 * z3))
                f1b = y1 * z1 + y2 * z2 + y3 * z3 + y4 * z4
                f2b = y2 * z1s + y3 * 3.0 * z1 * z2 + y4 * (3.0 * z2 * z2 + 4.0 * z1 * z3)
                f3b = y3 * z1s * z1 + y4 * 6.0 * z1s * z2
                f4b = y4 * z1s * z1s
                self.zb[0, o] = y0 * f1 + f1b * f2 + f2b * f3 + f3b * f4 + f4b * f5


def mlp_forward_jet(params, sizes, x):
    cdef const double[::1] p = np.ascontiguousarray(params, dtype=np.float64)
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64).reshape(-1)
    cdef _Net net = _Net(sizes, p.shape[0])
    cdef Py_ssize_t n = xv.shape[0], j
    cdef int k
    out = np.empty((5, n))
    cdef double[:, ::1] u = out
    for j in range(n):
        net.forward(p, xv[j])
        for k in range(5):
            u[k, j] = net.a[net.nl, k, 0]
    return out


def pinn_loss_grad(params, sizes, x, c2, c3, c4, rhs, probe_x, probe_order, probe_weight):
    cdef const double[::1] p = np.ascontiguousarray(params, dtype=np.float64)
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64).reshape(-1)
    cdef const double[::1] cc2 = np.ascontiguousarray(c2, dtype=np.float64)
    cdef const double[::1] cc3 = np.ascontiguousarray(c3, dtype=np.float64)
    cdef const double[::1] cc4 = np.ascontiguousarray(c4, dtype=np.float64)
    cdef const double[::1] rr = np.ascontiguousarray(rhs, dtype=np.float64)
    cdef const double[::1] px = np.ascontiguousarray(probe_x, dtype=np.float64).reshape(-1)
    cdef const Py_ssize_t[::1] po = np.ascontiguousarray(probe_order, dtype=np.intp).reshape(-1)
    cdef const double[::1] pw = np.ascontiguousarray(probe_weight, dtype=np.float64).reshape(-1)
    cdef Py_ssize_t n = xv.shape[0], m = px.shape[0], j
    cdef int k
    cdef _Net net = _Net(sizes, p.shape[0])
    grad = np.zeros(p.shape[0])
    cdef double[::1] g = grad
    cdef double loss = 0.0, r, s, v
    cdef double inv_n = 1.0 / n
    cdef Py_ssize_t top = net.nl
    with nogil:
        for j in range(n):
            net.forward(p, xv[j])
            r = (cc2[j] * net.a[top, 2, 0] + cc3[j] * net.a[top, 3, 0]
                 + cc4[j] * net.a[top, 4, 0] - rr[j])
            loss += r * r * inv_n
            s = 2.0 * r * inv_n
            net.zb[0, 0] = 0.0
            net.zb[1, 0] = 0.0
            net.zb[2, 0] = s * cc2[j]
            net.zb[3, 0] = s * cc3[j]
            net.zb[4, 0] = s * cc4[j]
            net.backward(p, g)
        for j in range(m):
            net.forward(p, px[j])
            v = net.a[top, po[j], 0]
            loss += pw[j] * v * v
            for k in range(5):
                net.zb[k, 0] = 0.0
            net.zb[po[j], 0] = 2.0 * pw[j] * v
            net.backward(p, g)
    return loss, grad
