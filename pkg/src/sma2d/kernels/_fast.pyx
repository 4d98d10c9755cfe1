# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled assembly kernels; contracts documented in ``_ref.py``."""

import numpy as np

from libc.math cimport log, sqrt, INFINITY


def variant_energies(const double[:, ::1] pos, const int[:, ::1] tri,
                     const double[:, :, ::1] dxinv,
                     const double[:, ::1] f1inv, const double[:, ::1] f2inv,
                     double alpha, double d1, double d2):
    cdef Py_ssize_t nt = tri.shape[0]
    w1 = np.empty(nt)
    w2 = np.empty(nt)
    det = np.empty(nt)
    cdef double[::1] w1v = w1
    cdef double[::1] w2v = w2
    cdef double[::1] detv = det
    cdef Py_ssize_t t, i, j, k
    cdef double d00, d01, d10, d11, a00, a01, a10, a11
    cdef double f00, f01, f10, f11, g00, g01, g10, g11
    cdef double detf, detg, detfv
    cdef double det1 = f1inv[0, 0] * f1inv[1, 1] - f1inv[0, 1] * f1inv[1, 0]
    cdef double det2 = f2inv[0, 0] * f2inv[1, 1] - f2inv[0, 1] * f2inv[1, 0]
    cdef int variant
    cdef const double[:, ::1] fvinv

    for t in range(nt):
        i = tri[t, 0]
        j = tri[t, 1]
        k = tri[t, 2]
        d00 = pos[j, 0] - pos[i, 0]
        d10 = pos[j, 1] - pos[i, 1]
        d01 = pos[k, 0] - pos[i, 0]
        d11 = pos[k, 1] - pos[i, 1]
        a00 = dxinv[t, 0, 0]
        a01 = dxinv[t, 0, 1]
        a10 = dxinv[t, 1, 0]
        a11 = dxinv[t, 1, 1]
        f00 = d00 * a00 + d01 * a10
        f01 = d00 * a01 + d01 * a11
        f10 = d10 * a00 + d11 * a10
        f11 = d10 * a01 + d11 * a11
        detf = f00 * f11 - f01 * f10
        detv[t] = detf
        if detf <= 0.0:
            w1v[t] = INFINITY
            w2v[t] = INFINITY
            continue
        for variant in range(2):
            if variant == 0:
                fvinv = f1inv
                detfv = det1
            else:
                fvinv = f2inv
                detfv = det2
            g00 = f00 * fvinv[0, 0] + f01 * fvinv[1, 0]
            g01 = f00 * fvinv[0, 1] + f01 * fvinv[1, 1]
            g10 = f10 * fvinv[0, 0] + f11 * fvinv[1, 0]
            g11 = f10 * fvinv[0, 1] + f11 * fvinv[1, 1]
            detg = detf * detfv
            if variant == 0:
                w1v[t] = alpha * (g00 * g00 + g01 * g01 + g10 * g10 + g11 * g11) \
                    + d1 * detg * detg - d2 * log(detg)
            else:
                w2v[t] = alpha * (g00 * g00 + g01 * g01 + g10 * g10 + g11 * g11) \
                    + d1 * detg * detg - d2 * log(detg)
    return w1, w2, det


def bulk_energy_grad(const double[:, ::1] pos, const int[:, ::1] tri,
                     const double[:, :, ::1] dxinv,
                     const double[::1] area, const signed char[::1] z,
                     const double[:, ::1] f1inv, const double[:, ::1] f2inv,
                     double alpha, double d1, double d2):
    cdef Py_ssize_t nt = tri.shape[0]
    grad = np.zeros((pos.shape[0], 2))
    cdef double[:, ::1] gv = grad
    cdef Py_ssize_t t, i, j, k
    cdef double d00, d01, d10, d11, a00, a01, a10, a11
    cdef double f00, f01, f10, f11, g00, g01, g10, g11
    cdef double detf, detg, detfv, w, coef, at
    cdef double p00, p01, p10, p11, q00, q01, q10, q11, h00, h01, h10, h11
    cdef double energy = 0.0
    cdef double min_det = 1.0
    cdef double det1 = f1inv[0, 0] * f1inv[1, 1] - f1inv[0, 1] * f1inv[1, 0]
    cdef double det2 = f2inv[0, 0] * f2inv[1, 1] - f2inv[0, 1] * f2inv[1, 0]
    cdef const double[:, ::1] fvinv
    cdef bint bad = False

    for t in range(nt):
        i = tri[t, 0]
        j = tri[t, 1]
        k = tri[t, 2]
        d00 = pos[j, 0] - pos[i, 0]
        d10 = pos[j, 1] - pos[i, 1]
        d01 = pos[k, 0] - pos[i, 0]
        d11 = pos[k, 1] - pos[i, 1]
        a00 = dxinv[t, 0, 0]
        a01 = dxinv[t, 0, 1]
        a10 = dxinv[t, 1, 0]
        a11 = dxinv[t, 1, 1]
        f00 = d00 * a00 + d01 * a10
        f01 = d00 * a01 + d01 * a11
        f10 = d10 * a00 + d11 * a10
        f11 = d10 * a01 + d11 * a11
        detf = f00 * f11 - f01 * f10
        if t == 0 or detf < min_det:
            min_det = detf
        if detf <= 0.0:
            bad = True
            continue
        if bad:
            continue
        if z[t] == 1:
            fvinv = f1inv
            detfv = det1
        else:
            fvinv = f2inv
            detfv = det2
        g00 = f00 * fvinv[0, 0] + f01 * fvinv[1, 0]
        g01 = f00 * fvinv[0, 1] + f01 * fvinv[1, 1]
        g10 = f10 * fvinv[0, 0] + f11 * fvinv[1, 0]
        g11 = f10 * fvinv[0, 1] + f11 * fvinv[1, 1]
        detg = detf * detfv
        at = area[t]
        w = alpha * (g00 * g00 + g01 * g01 + g10 * g10 + g11 * g11) \
            + d1 * detg * detg - d2 * log(detg)
        energy += w * at
        # dW/dG = 2*alpha*G + coef * G^{-T}, coef = 2*d1*detg^2 - d2
        coef = (2.0 * d1 * detg * detg - d2) / detg
        p00 = 2.0 * alpha * g00 + coef * g11
        p01 = 2.0 * alpha * g01 - coef * g10
        p10 = 2.0 * alpha * g10 - coef * g01
        p11 = 2.0 * alpha * g11 + coef * g00
        # P = dW/dG @ fvinv^T
        q00 = p00 * fvinv[0, 0] + p01 * fvinv[0, 1]
        q01 = p00 * fvinv[1, 0] + p01 * fvinv[1, 1]
        q10 = p10 * fvinv[0, 0] + p11 * fvinv[0, 1]
        q11 = p10 * fvinv[1, 0] + p11 * fvinv[1, 1]
        # H = P @ dxinv^T * |T|
        h00 = (q00 * a00 + q01 * a01) * at
        h01 = (q00 * a10 + q01 * a11) * at
        h10 = (q10 * a00 + q11 * a01) * at
        h11 = (q10 * a10 + q11 * a11) * at
        gv[j, 0] += h00
        gv[j, 1] += h10
        gv[k, 0] += h01
        gv[k, 1] += h11
        gv[i, 0] -= h00 + h01
        gv[i, 1] -= h10 + h11

    if bad:
        grad[:] = 0.0
        return INFINITY, grad, min_det
    return energy, grad, min_det


def edge_energy_grad(const double[:, ::1] pos, const int[:, ::1] edge_nodes,
                     const double[::1] coef):
    cdef Py_ssize_t ne = edge_nodes.shape[0]
    grad = np.zeros((pos.shape[0], 2))
    length = np.zeros(ne)
    cdef double[:, ::1] gv = grad
    cdef double[::1] lv = length
    cdef Py_ssize_t e, a, b
    cdef double dx, dy, ln, c, gx, gy
    cdef double energy = 0.0

    for e in range(ne):
        a = edge_nodes[e, 0]
        b = edge_nodes[e, 1]
        dx = pos[b, 0] - pos[a, 0]
        dy = pos[b, 1] - pos[a, 1]
        ln = sqrt(dx * dx + dy * dy)
        lv[e] = ln
        c = coef[e]
        energy += c * ln
        if ln > 0.0 and c != 0.0:
            gx = c * dx / ln
            gy = c * dy / ln
            gv[b, 0] += gx
            gv[b, 1] += gy
            gv[a, 0] -= gx
            gv[a, 1] -= gy
    return energy, grad, length
