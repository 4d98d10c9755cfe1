"""Pure-numpy assembly kernels (fallback backend).

Same contracts as the compiled backend in ``_fast.pyx``:

- ``variant_energies``: per-triangle densities of both variants plus det F;
  entries with det F <= 0 carry +inf densities.
- ``bulk_energy_grad``: mixture energy and its nodal gradient for a binary
  phase vector; returns (+inf, zero gradient, min det) when any triangle is
  inverted.
- ``edge_energy_grad``: sum of coef_e * |y_b - y_a| over interior edges with
  its nodal gradient and the deformed edge lengths.
"""

from __future__ import annotations

import numpy as np


def _gradients(pos, tri, dxinv):
    p0 = pos[tri[:, 0]]
    dy = np.empty((tri.shape[0], 2, 2))
    dy[:, :, 0] = pos[tri[:, 1]] - p0
    dy[:, :, 1] = pos[tri[:, 2]] - p0
    return dy @ dxinv


def variant_energies(pos, tri, dxinv, f1inv, f2inv, alpha, d1, d2):
    F = _gradients(pos, tri, dxinv)
    det = F[:, 0, 0] * F[:, 1, 1] - F[:, 0, 1] * F[:, 1, 0]
    ok = det > 0.0
    w = []
    for fvinv in (f1inv, f2inv):
        G = F @ fvinv
        detg = det * (fvinv[0, 0] * fvinv[1, 1] - fvinv[0, 1] * fvinv[1, 0])
        trace = np.einsum("tij,tij->t", G, G)
        wv = np.full(tri.shape[0], np.inf)
        wv[ok] = alpha * trace[ok] + d1 * detg[ok] ** 2 - d2 * np.log(detg[ok])
        w.append(wv)
    return w[0], w[1], det


def bulk_energy_grad(pos, tri, dxinv, area, z, f1inv, f2inv, alpha, d1, d2):
    nt = tri.shape[0]
    F = _gradients(pos, tri, dxinv)
    det = F[:, 0, 0] * F[:, 1, 1] - F[:, 0, 1] * F[:, 1, 0]
    min_det = float(det.min()) if nt else 1.0
    grad = np.zeros_like(pos)
    if min_det <= 0.0:
        return np.inf, grad, min_det

    fvinv = np.where((z == 1)[:, None, None], f1inv[None], f2inv[None])
    G = F @ fvinv
    detg = det * (fvinv[:, 0, 0] * fvinv[:, 1, 1] - fvinv[:, 0, 1] * fvinv[:, 1, 0])
    trace = np.einsum("tij,tij->t", G, G)
    w = alpha * trace + d1 * detg**2 - d2 * np.log(detg)
    energy = float(np.dot(w, area))

    # dW/dG = 2*alpha*G + (2*d1*detg^2 - d2) * G^{-T}
    g_inv_t = np.empty_like(G)
    g_inv_t[:, 0, 0] = G[:, 1, 1]
    g_inv_t[:, 0, 1] = -G[:, 1, 0]
    g_inv_t[:, 1, 0] = -G[:, 0, 1]
    g_inv_t[:, 1, 1] = G[:, 0, 0]
    g_inv_t /= detg[:, None, None]
    dw_dg = 2.0 * alpha * G + (2.0 * d1 * detg**2 - d2)[:, None, None] * g_inv_t
    P = dw_dg @ np.swapaxes(fvinv, 1, 2)
    H = (P @ np.swapaxes(dxinv, 1, 2)) * area[:, None, None]
    np.add.at(grad, tri[:, 1], H[:, :, 0])
    np.add.at(grad, tri[:, 2], H[:, :, 1])
    np.add.at(grad, tri[:, 0], -(H[:, :, 0] + H[:, :, 1]))
    return energy, grad, min_det


def edge_energy_grad(pos, edge_nodes, coef):
    grad = np.zeros_like(pos)
    if edge_nodes.shape[0] == 0:
        return 0.0, grad, np.zeros(0)
    d = pos[edge_nodes[:, 1]] - pos[edge_nodes[:, 0]]
    length = np.hypot(d[:, 0], d[:, 1])
    energy = float(np.dot(coef, length))
    safe = np.where(length > 0.0, length, 1.0)
    g = (coef / safe)[:, None] * d
    g[length == 0.0] = 0.0
    np.add.at(grad, edge_nodes[:, 1], g)
    np.add.at(grad, edge_nodes[:, 0], -g)
    return energy, grad, length
