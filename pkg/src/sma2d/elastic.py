"""Nodal minimization of the elastic part of the incremental functional.

The unknowns are the deformed positions of the free nodes; Dirichlet nodes
carry prescribed positions and periodic slave nodes are eliminated as
master + constant offset, so the reduced problem is unconstrained except for
the orientation barrier det F > 0, which the line search enforces by
rejecting any trial state containing an inverted triangle.

The minimizer is a limited-memory quasi-Newton iteration (memory 10) with
Armijo backtracking; it only ever accepts energy-decreasing admissible
iterates, so the energy trace is non-increasing and every visited state is
orientation-preserving.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import InadmissibleDeformationError
from .material import MaterialParams
from .mesh import Mesh2D, NodeSets

ARMIJO_C1 = 1e-4
LBFGS_MEMORY = 10
MAX_BACKTRACKS = 60


@dataclass(frozen=True)
class ConstraintMap:
    """Node-level constraint bookkeeping for the reduced unknown vector."""

    n_nodes: int
    free_nodes: np.ndarray
    dirichlet_nodes: np.ndarray
    slave_nodes: np.ndarray
    master_nodes: np.ndarray
    slave_offset: np.ndarray

    @classmethod
    def from_node_sets(cls, mesh: Mesh2D, node_sets: NodeSets) -> "ConstraintMap":
        """Periodic slaves follow their master at the constant reference offset,
        which is exactly the displacement-equality pairing condition."""
        offsets = mesh.nodes[node_sets.periodic_top] - mesh.nodes[node_sets.periodic_bottom]
        return cls(
            n_nodes=mesh.n_nodes,
            free_nodes=np.asarray(node_sets.free, dtype=np.int64),
            dirichlet_nodes=np.asarray(node_sets.dirichlet, dtype=np.int64),
            slave_nodes=np.asarray(node_sets.periodic_top, dtype=np.int64),
            master_nodes=np.asarray(node_sets.periodic_bottom, dtype=np.int64),
            slave_offset=np.asarray(offsets, dtype=np.float64).reshape(-1, 2),
        )

    @property
    def n_reduced(self) -> int:
        return 2 * self.free_nodes.shape[0]

    def assemble(self, reduced: np.ndarray, dirichlet_values: np.ndarray,
                 base: np.ndarray) -> np.ndarray:
        """Full positions from the reduced vector; ``base`` fills nothing in
        practice (every node is free, Dirichlet, or slave) but keeps the shape."""
        pos = base.copy()
        pos[self.free_nodes] = reduced.reshape(-1, 2)
        pos[self.dirichlet_nodes] = dirichlet_values
        pos[self.slave_nodes] = pos[self.master_nodes] + self.slave_offset
        return pos

    def impose(self, positions: np.ndarray, dirichlet_values: np.ndarray) -> np.ndarray:
        """Project arbitrary positions onto the constraint set."""
        pos = positions.copy()
        pos[self.dirichlet_nodes] = dirichlet_values
        pos[self.slave_nodes] = pos[self.master_nodes] + self.slave_offset
        return pos

    def extract(self, positions: np.ndarray) -> np.ndarray:
        return positions[self.free_nodes].ravel().copy()

    def reduce_gradient(self, grad_full: np.ndarray) -> np.ndarray:
        """Chain rule of the elimination: slave forces accumulate on masters."""
        if self.slave_nodes.shape[0]:
            grad_full = grad_full.copy()
            np.add.at(grad_full, self.master_nodes, grad_full[self.slave_nodes])
        return grad_full[self.free_nodes].ravel()


@dataclass
class ElasticObjective:
    """Bulk mixture energy plus the deformation-dependent interface term.

    The constant interface cost (per-edge coefficient alpha_i) does not
    depend on the deformation, so it is deliberately not part of this
    objective; the driver adds it to the incremental total.  The
    deformation-dependent part enters only when ``include_alpha_s`` is set
    and there are phase jumps with alpha_s > 0.
    """

    mesh: Mesh2D
    params: MaterialParams
    z: np.ndarray
    cmap: ConstraintMap
    dirichlet_values: np.ndarray
    include_alpha_s: bool = True
    _edge_coef: np.ndarray = field(init=False, repr=False)
    n_evaluations: int = field(default=0, repr=False)

    def __post_init__(self) -> None:
        self.z = np.ascontiguousarray(self.z, dtype=np.int8)
        if self.z.shape[0] != self.mesh.n_triangles:
            raise ValueError("phase vector length does not match the mesh")
        if self.include_alpha_s and self.params.alpha_s > 0.0 and self.mesh.n_interior_edges:
            zf = self.z.astype(np.float64)
            jump = np.abs(zf[self.mesh.edge_tri[:, 0]] - zf[self.mesh.edge_tri[:, 1]])
            # alpha_s * |F t| * |jump| * |E| == alpha_s * |jump| * deformed length
            self._edge_coef = self.params.alpha_s * jump
        else:
            self._edge_coef = np.zeros(0)

    def evaluate_full(self, positions: np.ndarray) -> tuple[float, np.ndarray, float]:
        """Energy, full nodal gradient and min det F; +inf marks inadmissibility."""
        self.n_evaluations += 1
        energy, grad, min_det = kernels.bulk_energy_grad(
            positions, self.mesh.triangles, self.mesh.dxinv, self.mesh.areas,
            self.z, self.params.F1_inv, self.params.F2_inv,
            self.params.alpha, self.params.delta1, self.params.delta2,
        )
        if min_det <= 0.0:
            return np.inf, grad, min_det
        if self._edge_coef.shape[0]:
            e_edge, g_edge, _ = kernels.edge_energy_grad(
                positions, self.mesh.edge_nodes, self._edge_coef)
            energy += e_edge
            grad = grad + g_edge
        return energy, grad, min_det

    def evaluate(self, positions: np.ndarray) -> tuple[float, np.ndarray]:
        """Public evaluation; raises on orientation loss."""
        energy, grad, min_det = self.evaluate_full(positions)
        if not np.isfinite(energy):
            raise InadmissibleDeformationError(
                f"configuration contains an inverted triangle (min det F = {min_det})")
        return energy, grad

    def value_and_grad_reduced(self, reduced: np.ndarray, base: np.ndarray
                               ) -> tuple[float, np.ndarray | None, np.ndarray]:
        pos = self.cmap.assemble(reduced, self.dirichlet_values, base)
        energy, grad, _ = self.evaluate_full(pos)
        if not np.isfinite(energy):
            return np.inf, None, pos
        return energy, self.cmap.reduce_gradient(grad), pos


@dataclass(frozen=True)
class ElasticResult:
    positions: np.ndarray
    energy: float
    grad_norm: float
    iterations: int
    status: str  # converged | maxiter | stalled
    n_evaluations: int


def _two_loop(g: np.ndarray, s_list: list[np.ndarray], y_list: list[np.ndarray]) -> np.ndarray:
    q = g.copy()
    alphas = []
    rhos = [1.0 / np.dot(y, s) for s, y in zip(s_list, y_list)]
    for s, y, rho in zip(reversed(s_list), reversed(y_list), reversed(rhos)):
        a = rho * np.dot(s, q)
        alphas.append(a)
        q -= a * y
    if s_list:
        gamma = np.dot(s_list[-1], y_list[-1]) / np.dot(y_list[-1], y_list[-1])
        q *= gamma
    for (s, y, rho), a in zip(zip(s_list, y_list, rhos), reversed(alphas)):
        b = rho * np.dot(y, q)
        q += (a - b) * s
    return q


def minimize(objective: ElasticObjective, initial: np.ndarray,
             tol: float = 1e-6, max_iter: int = 2000) -> ElasticResult:
    """Minimize over the free nodal positions from an admissible start.

    The initial positions are projected onto the constraints first; an
    inverted triangle in the projected start is rejected outright.  Returns
    the best admissible iterate found with a status string; the energy at the
    output never exceeds the energy at the (projected) input.
    """
    base = objective.cmap.impose(initial, objective.dirichlet_values)
    x = objective.cmap.extract(base)
    start_evals = objective.n_evaluations

    if x.shape[0] == 0:
        energy, grad, min_det = objective.evaluate_full(base)
        if not np.isfinite(energy):
            raise InadmissibleDeformationError("fully constrained state is inadmissible")
        return ElasticResult(base, energy, 0.0, 0, "converged",
                             objective.n_evaluations - start_evals)

    f, g, pos = objective.value_and_grad_reduced(x, base)
    if not np.isfinite(f):
        raise InadmissibleDeformationError("initial configuration contains an inverted triangle")

    s_list: list[np.ndarray] = []
    y_list: list[np.ndarray] = []
    status = "maxiter"
    it = 0
    while it < max_iter:
        g_norm = float(np.max(np.abs(g)))
        if g_norm <= tol:
            status = "converged"
            break
        it += 1

        d = -_two_loop(g, s_list, y_list)
        descent = float(np.dot(d, g))
        if not np.isfinite(descent) or descent >= 0.0:
            d = -g
            descent = -float(np.dot(g, g))
            s_list.clear()
            y_list.clear()

        step = 1.0 if s_list else min(1.0, 1.0 / max(1.0, float(np.linalg.norm(g))))
        accepted = False
        for _ in range(MAX_BACKTRACKS):
            x_new = x + step * d
            f_new, g_new, pos_new = objective.value_and_grad_reduced(x_new, base)
            if np.isfinite(f_new) and f_new <= f + ARMIJO_C1 * step * descent:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            status = "stalled"
            break

        s_vec = x_new - x
        y_vec = g_new - g
        sy = float(np.dot(s_vec, y_vec))
        if sy > 1e-12 * float(np.linalg.norm(s_vec)) * float(np.linalg.norm(y_vec)):
            s_list.append(s_vec)
            y_list.append(y_vec)
            if len(s_list) > LBFGS_MEMORY:
                s_list.pop(0)
                y_list.pop(0)
        x, f, g, pos = x_new, f_new, g_new, pos_new

    return ElasticResult(
        positions=pos,
        energy=f,
        grad_norm=float(np.max(np.abs(g))),
        iterations=it,
        status=status,
        n_evaluations=objective.n_evaluations - start_evals,
    )
