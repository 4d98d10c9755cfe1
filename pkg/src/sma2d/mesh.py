"""Structured triangulations of the reference rectangle.

The domain is a ``width x height`` rectangle split into ``nx * ny`` cells;
every cell is cut along its "/" diagonal (lower-left to upper-right) into two
counterclockwise triangles.  Geometry that the assembly kernels need per
triangle (reference-gradient matrices, areas) and per interior edge
(endpoints, adjacent triangle pair, unit normal/tangent, reference length) is
precomputed once here; the mesh is immutable afterwards and safe to share
across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

DOMAIN_WIDTH = 2.0
DOMAIN_HEIGHT = 1.0


@dataclass(frozen=True)
class NodeSets:
    """Named node subsets produced by boundary classification.

    ``periodic_top[i]`` is the slave node paired with master
    ``periodic_bottom[i]``.  ``free`` collects every node that carries
    unknowns (periodic masters included); ``dirichlet``, ``periodic_top`` and
    ``free`` partition the node set.
    """

    dirichlet: np.ndarray
    periodic_top: np.ndarray
    periodic_bottom: np.ndarray
    free: np.ndarray


@dataclass(frozen=True)
class InteriorEdge:
    """Record view of one interior edge (for inspection and tests)."""

    nodes: tuple[int, int]
    t_plus: int
    t_minus: int
    normal: np.ndarray
    tangent: np.ndarray
    length: float


@dataclass(frozen=True)
class Mesh2D:
    """Immutable structured triangulation with interior-edge adjacency.

    Arrays are laid out for the assembly kernels:

    - ``nodes``: (n, 2) reference coordinates,
    - ``node_ij``: (n, 2) integer grid coordinates (exact classification),
    - ``triangles``: (nt, 3) node indices, counterclockwise,
    - ``areas``: (nt,) reference areas,
    - ``dxinv``: (nt, 2, 2) inverses of the reference edge matrices, so the
      deformation gradient of a P1 field y is ``F_T = Dy_T @ dxinv[T]``,
    - ``edge_nodes``/``edge_tri``/``edge_normal``/``edge_tangent``/``edge_len``:
      per interior edge.
    """

    nx: int
    ny: int
    width: float
    height: float
    nodes: np.ndarray
    node_ij: np.ndarray
    triangles: np.ndarray
    areas: np.ndarray
    dxinv: np.ndarray
    edge_nodes: np.ndarray
    edge_tri: np.ndarray
    edge_normal: np.ndarray
    edge_tangent: np.ndarray
    edge_len: np.ndarray
    n_edges_total: int

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_triangles(self) -> int:
        return self.triangles.shape[0]

    @property
    def n_interior_edges(self) -> int:
        return self.edge_nodes.shape[0]

    def interior_edge_records(self) -> Iterator[InteriorEdge]:
        for e in range(self.n_interior_edges):
            yield InteriorEdge(
                nodes=(int(self.edge_nodes[e, 0]), int(self.edge_nodes[e, 1])),
                t_plus=int(self.edge_tri[e, 0]),
                t_minus=int(self.edge_tri[e, 1]),
                normal=self.edge_normal[e].copy(),
                tangent=self.edge_tangent[e].copy(),
                length=float(self.edge_len[e]),
            )

    def triangle_layer(self, t: int) -> int:
        """Horizontal layer (cell row) the triangle belongs to."""
        return (t // 2) // self.nx


def build_structured_mesh(
    nx: int,
    ny: int,
    width: float = DOMAIN_WIDTH,
    height: float = DOMAIN_HEIGHT,
) -> Mesh2D:
    """Build the nx-by-ny structured triangulation of the rectangle.

    Each cell is split along the "/" diagonal; the lower triangle is
    (ll, lr, ur) and the upper one (ll, ur, ul), both counterclockwise.  Cell
    (ix, iy) owns triangles ``2*(iy*nx + ix)`` and ``2*(iy*nx + ix) + 1``.
    """
    if nx <= 0 or ny <= 0:
        raise ValueError(f"cell counts must be positive, got nx={nx}, ny={ny}")

    n_nodes = (nx + 1) * (ny + 1)
    nodes = np.empty((n_nodes, 2), dtype=np.float64)
    node_ij = np.empty((n_nodes, 2), dtype=np.int32)
    for iy in range(ny + 1):
        for ix in range(nx + 1):
            nid = iy * (nx + 1) + ix
            nodes[nid, 0] = width * ix / nx
            nodes[nid, 1] = height * iy / ny
            node_ij[nid, 0] = ix
            node_ij[nid, 1] = iy

    triangles = np.empty((2 * nx * ny, 3), dtype=np.int32)
    for iy in range(ny):
        for ix in range(nx):
            cell = iy * nx + ix
            n00 = iy * (nx + 1) + ix
            n10 = n00 + 1
            n01 = n00 + (nx + 1)
            n11 = n01 + 1
            triangles[2 * cell] = (n00, n10, n11)
            triangles[2 * cell + 1] = (n00, n11, n01)

    # Reference edge matrices, areas, and their inverses per triangle.
    p0 = nodes[triangles[:, 0]]
    d1 = nodes[triangles[:, 1]] - p0
    d2 = nodes[triangles[:, 2]] - p0
    det = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    if np.any(det <= 0):
        raise ValueError("triangle orientation is not counterclockwise")
    areas = 0.5 * det
    dxinv = np.empty((triangles.shape[0], 2, 2), dtype=np.float64)
    dxinv[:, 0, 0] = d2[:, 1] / det
    dxinv[:, 0, 1] = -d2[:, 0] / det
    dxinv[:, 1, 0] = -d1[:, 1] / det
    dxinv[:, 1, 1] = d1[:, 0] / det

    # Edge -> adjacent triangles, in deterministic first-seen order.
    adjacency: dict[tuple[int, int], list[int]] = {}
    for t in range(triangles.shape[0]):
        a, b, c = (int(v) for v in triangles[t])
        for u, v in ((a, b), (b, c), (c, a)):
            key = (u, v) if u < v else (v, u)
            adjacency.setdefault(key, []).append(t)

    interior = [(key, tris) for key, tris in adjacency.items() if len(tris) == 2]
    ne = len(interior)
    edge_nodes = np.empty((ne, 2), dtype=np.int32)
    edge_tri = np.empty((ne, 2), dtype=np.int32)
    edge_normal = np.empty((ne, 2), dtype=np.float64)
    edge_tangent = np.empty((ne, 2), dtype=np.float64)
    edge_len = np.empty(ne, dtype=np.float64)
    for e, ((a, b), tris) in enumerate(interior):
        edge_nodes[e] = (a, b)
        edge_tri[e] = (tris[0], tris[1])
        vec = nodes[b] - nodes[a]
        length = float(np.hypot(vec[0], vec[1]))
        t_hat = vec / length
        edge_tangent[e] = t_hat
        edge_normal[e] = (t_hat[1], -t_hat[0])
        edge_len[e] = length

    for arr in (nodes, node_ij, triangles, areas, dxinv, edge_nodes, edge_tri,
                edge_normal, edge_tangent, edge_len):
        arr.setflags(write=False)

    return Mesh2D(
        nx=nx,
        ny=ny,
        width=width,
        height=height,
        nodes=nodes,
        node_ij=node_ij,
        triangles=triangles,
        areas=areas,
        dxinv=dxinv,
        edge_nodes=edge_nodes,
        edge_tri=edge_tri,
        edge_normal=edge_normal,
        edge_tangent=edge_tangent,
        edge_len=edge_len,
        n_edges_total=len(adjacency),
    )


PRESETS = ("example1", "example2", "custom")


def classify_boundary(mesh: Mesh2D, preset: str) -> NodeSets:
    """Classify nodes into Dirichlet / periodic / free sets for a preset.

    example1 (and custom): the whole perimeter is Dirichlet.
    example2: the two vertical edges are Dirichlet; top nodes at interior
    columns are paired with the bottom node sharing the same x1.  Corner
    nodes sit on both boundaries and resolve as Dirichlet, so only interior
    columns are paired.
    """
    if preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}, expected one of {PRESETS}")

    ix = mesh.node_ij[:, 0]
    iy = mesh.node_ij[:, 1]
    on_boundary = (ix == 0) | (ix == mesh.nx) | (iy == 0) | (iy == mesh.ny)

    if preset in ("example1", "custom"):
        dirichlet = np.flatnonzero(on_boundary)
        periodic_top = np.empty(0, dtype=np.int64)
        periodic_bottom = np.empty(0, dtype=np.int64)
        free = np.flatnonzero(~on_boundary)
    else:
        is_dirichlet = (ix == 0) | (ix == mesh.nx)
        dirichlet = np.flatnonzero(is_dirichlet)
        interior_col = (ix > 0) & (ix < mesh.nx)
        top = np.flatnonzero((iy == mesh.ny) & interior_col)
        # Order both rows by column index so pairs share x1.
        top = top[np.argsort(ix[top], kind="stable")]
        bottom = np.flatnonzero((iy == 0) & interior_col)
        bottom = bottom[np.argsort(ix[bottom], kind="stable")]
        periodic_top = top
        periodic_bottom = bottom
        constrained = is_dirichlet.copy()
        constrained[top] = True
        free = np.flatnonzero(~constrained)

    return NodeSets(
        dirichlet=dirichlet,
        periodic_top=periodic_top,
        periodic_bottom=periodic_bottom,
        free=free,
    )


def export_mesh_text(mesh: Mesh2D, node_sets: NodeSets | None = None) -> str:
    """Plain-text snapshot of the mesh for the plotting component.

    Sections: node table (id, x1, x2), triangle table (id, n1, n2, n3) and,
    when node sets are given, the Dirichlet ids and periodic (top, bottom)
    pairs so renderers can mark constrained nodes without re-deriving them.
    """
    lines = [f"nx = {mesh.nx}", f"ny = {mesh.ny}", "[nodes]"]
    for i in range(mesh.n_nodes):
        lines.append(f"{i} {mesh.nodes[i, 0]:.17g} {mesh.nodes[i, 1]:.17g}")
    lines.append("[triangles]")
    for t in range(mesh.n_triangles):
        a, b, c = mesh.triangles[t]
        lines.append(f"{t} {a} {b} {c}")
    if node_sets is not None:
        lines.append("[dirichlet]")
        lines.extend(str(int(i)) for i in node_sets.dirichlet)
        lines.append("[periodic]")
        for top, bottom in zip(node_sets.periodic_top, node_sets.periodic_bottom):
            lines.append(f"{int(top)} {int(bottom)}")
    return "\n".join(lines) + "\n"
