"""Rate-independent quasistatic evolution by incremental minimization.

Each time step imposes the current Dirichlet data, then alternates between
an elastic minimization at frozen phase and an exact phase minimization at
frozen deformation until the incremental objective

    E(t_k, y, z) + dissipation(z, z_{k-1})

stops decreasing.  The phase solve is a global minimizer of the restricted
objective, the elastic solve a descent method, so the objective is
non-increasing across sweeps; a violation beyond rounding noise is a solver
bug and raises.

The module also carries the two run-level diagnostics: a finite-competitor
stability check (single-triangle flips and the two uniform phases, each with
re-minimized deformation) and a per-step energy bookkeeping report with an
upper-estimate check and a work-balance residual.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .elastic import ConstraintMap, ElasticObjective, minimize
from .errors import ContractViolationError, InadmissibleDeformationError
from .material import MaterialParams
from .mesh import Mesh2D, NodeSets, classify_boundary
from .phase import PhaseProblem, solve_coupled, solve_decoupled

PAPER_WAVE_KNOTS = ((0.0, 0.0), (4.0, 1.0), (8.0, 0.0), (12.0, -1.0), (16.0, 0.0))


@dataclass(frozen=True)
class LoadProgram:
    """Triangular-wave amplitude plus the preset's displacement rule."""

    t_final: float = 16.0
    n_steps: int = 16
    wave_knots: tuple[tuple[float, float], ...] = PAPER_WAVE_KNOTS
    preset: str = "example1"

    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * (self.t_final / self.n_steps)


def schedule_amplitude(program: LoadProgram, t: float) -> float:
    """Piecewise-linear interpolation of the wave knots."""
    if t < 0.0 or t > program.t_final:
        raise ValueError(f"time {t} outside [0, {program.t_final}]")
    knots_t = [k[0] for k in program.wave_knots]
    knots_a = [k[1] for k in program.wave_knots]
    return float(np.interp(t, knots_t, knots_a))


def boundary_displacement(program: LoadProgram, coords: np.ndarray, t: float) -> np.ndarray:
    """Prescribed displacement of constrained nodes at time t.

    example1/custom shears the whole perimeter horizontally proportionally to
    the height above the midline; example2 pins the left edge and translates
    the right edge vertically.
    """
    a = schedule_amplitude(program, t)
    u = np.zeros_like(coords)
    if program.preset in ("example1", "custom"):
        u[:, 0] = 0.3 * a * (coords[:, 1] - 0.5)
    elif program.preset == "example2":
        u[:, 1] = 0.4 * a * coords[:, 0]
    else:
        raise ValueError(f"unknown preset {program.preset!r}")
    return u


def dirichlet_values(program: LoadProgram, mesh: Mesh2D, node_sets: NodeSets,
                     t: float) -> np.ndarray:
    coords = mesh.nodes[node_sets.dirichlet]
    return coords + boundary_displacement(program, coords, t)


@dataclass
class State:
    positions: np.ndarray
    z: np.ndarray


@dataclass(frozen=True)
class EnergyBreakdown:
    bulk: float
    e_int1: float
    e_int2: float

    @property
    def total(self) -> float:
        return self.bulk + self.e_int1 + self.e_int2


@dataclass(frozen=True)
class LedgerRow:
    k: int
    t: float
    a: float
    e_bulk: float
    e_int1: float
    e_int2: float
    d_inc: float
    diss_cum: float
    frac_z1: float
    sweeps: int
    status: str


@dataclass
class Trajectory:
    preset: str
    seed: int
    mesh: Mesh2D
    params: MaterialParams
    program: LoadProgram
    node_sets: NodeSets
    states: list[State]
    ledger: list[LedgerRow]


def deformed_edge_lengths(mesh: Mesh2D, positions: np.ndarray) -> np.ndarray:
    d = positions[mesh.edge_nodes[:, 1]] - positions[mesh.edge_nodes[:, 0]]
    return np.hypot(d[:, 0], d[:, 1])


def phase_jumps(mesh: Mesh2D, z: np.ndarray) -> np.ndarray:
    zf = z.astype(np.float64)
    return np.abs(zf[mesh.edge_tri[:, 0]] - zf[mesh.edge_tri[:, 1]])


def energy_components(mesh: Mesh2D, params: MaterialParams, positions: np.ndarray,
                      z: np.ndarray) -> EnergyBreakdown:
    """Bulk, constant-interface and deformed-interface energies of a state."""
    w1, w2, det = kernels.variant_energies(
        positions, mesh.triangles, mesh.dxinv,
        params.F1_inv, params.F2_inv, params.alpha, params.delta1, params.delta2)
    zf = z.astype(np.float64)
    if np.any(det <= 0.0):
        bulk = np.inf
    else:
        bulk = float(np.dot(zf * w1 + (1.0 - zf) * w2, mesh.areas))
    jumps = phase_jumps(mesh, z)
    e1 = params.alpha_i * float(np.dot(jumps, mesh.edge_len))
    e2 = params.alpha_s * float(np.dot(jumps, deformed_edge_lengths(mesh, positions))) \
        if params.alpha_s > 0.0 else 0.0
    return EnergyBreakdown(bulk=bulk, e_int1=e1, e_int2=e2)


def dissipation_total(mesh: Mesh2D, params: MaterialParams, z_new: np.ndarray,
                      z_old: np.ndarray, beta: float | None = None) -> float:
    b = params.beta if beta is None else beta
    return b * float(np.dot(np.abs(z_new.astype(np.float64) - z_old.astype(np.float64)),
                            mesh.areas))


def variant_fraction(mesh: Mesh2D, z: np.ndarray) -> float:
    """Volume fraction occupied by variant 1 (z = 1)."""
    return float(np.dot(z.astype(np.float64), mesh.areas) / np.sum(mesh.areas))


def build_phase_problem(mesh: Mesh2D, params: MaterialParams, positions: np.ndarray,
                        z_prev: np.ndarray, beta: float) -> PhaseProblem:
    """Coefficients of the phase minimization at frozen deformation."""
    w1, w2, det = kernels.variant_energies(
        positions, mesh.triangles, mesh.dxinv,
        params.F1_inv, params.F2_inv, params.alpha, params.delta1, params.delta2)
    if np.any(det <= 0.0):
        raise InadmissibleDeformationError("phase problem assembled on inverted triangle")
    sign = np.where(z_prev == 0, 1.0, -1.0)
    unary = (w1 - w2 + beta * sign) * mesh.areas
    pairwise = params.alpha_i * mesh.edge_len
    if params.alpha_s > 0.0:
        pairwise = pairwise + params.alpha_s * deformed_edge_lengths(mesh, positions)
    return PhaseProblem(unary=unary, pairwise=pairwise, edge_tri=mesh.edge_tri,
                        z_prev=np.ascontiguousarray(z_prev, dtype=np.int8))


@dataclass(frozen=True)
class SweepResult:
    positions: np.ndarray
    z: np.ndarray
    objective: float
    sweeps: int
    status: str


def alternating_solve(mesh: Mesh2D, params: MaterialParams, cmap: ConstraintMap,
                      dvals: np.ndarray, positions: np.ndarray, z: np.ndarray,
                      z_prev: np.ndarray, beta: float, elastic_tol: float = 1e-6,
                      sweep_rtol: float = 1e-8, max_sweeps: int = 50) -> SweepResult:
    """Alternate elastic and phase minimization of one incremental problem.

    ``z_prev`` is the dissipation reference (and tie-break preference);
    ``beta`` is passed separately so the initial relaxation can run the same
    loop without the dissipation term.
    """
    y = cmap.impose(positions, dvals)
    z = np.ascontiguousarray(z, dtype=np.int8)
    obj = energy_components(mesh, params, y, z).total \
        + dissipation_total(mesh, params, z, z_prev, beta)
    if not np.isfinite(obj):
        raise InadmissibleDeformationError("warm start contains an inverted triangle")

    status = "ok"
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        objective = ElasticObjective(mesh, params, z, cmap, dvals)
        res = minimize(objective, y, tol=elastic_tol)
        y = res.positions
        if res.status == "stalled":
            status = "stalled"

        problem = build_phase_problem(mesh, params, y, z_prev, beta)
        if np.any(problem.pairwise > 0.0):
            z_new = solve_coupled(problem)
        else:
            z_new = solve_decoupled(problem)

        obj_new = energy_components(mesh, params, y, z_new).total \
            + dissipation_total(mesh, params, z_new, z_prev, beta)
        if obj_new > obj + 1e-10 * max(1.0, abs(obj)):
            raise ContractViolationError(
                f"incremental objective increased across a sweep: {obj} -> {obj_new}")
        converged = bool(np.array_equal(z_new, z)) and \
            (obj - obj_new) < sweep_rtol * max(1.0, abs(obj))
        z = z_new
        obj = obj_new
        if converged:
            break
    else:
        status = "maxsweeps" if status == "ok" else status

    return SweepResult(positions=y, z=z, objective=obj, sweeps=sweeps, status=status)


def initial_phase(preset: str, mesh: Mesh2D, seed: int,
                  max_resample: int = 100) -> np.ndarray:
    """Prescribed phase field before the initial relaxation.

    example1/custom draws a per-triangle fair coin from the seeded generator
    (PCG64) and redraws until both variant fractions are within 5% of 1/2;
    example2 lays down alternating single-variant horizontal strips, one mesh
    layer each, variant 1 at the bottom.
    """
    if preset in ("example1", "custom"):
        rng = np.random.default_rng(seed)
        for _ in range(max_resample):
            z = rng.integers(0, 2, size=mesh.n_triangles).astype(np.int8)
            if abs(variant_fraction(mesh, z) - 0.5) < 0.05:
                return z
        raise RuntimeError(f"could not draw a balanced phase field in {max_resample} tries")
    if preset == "example2":
        layers = np.array([mesh.triangle_layer(t) for t in range(mesh.n_triangles)])
        return np.where(layers % 2 == 0, 1, 0).astype(np.int8)
    raise ValueError(f"unknown preset {preset!r}")


def initial_state(preset: str, mesh: Mesh2D, params: MaterialParams, seed: int,
                  program: LoadProgram | None = None,
                  node_sets: NodeSets | None = None,
                  elastic_tol: float = 1e-6, sweep_rtol: float = 1e-8,
                  max_sweeps: int = 50) -> tuple[State, SweepResult]:
    """Relaxed initial microstructure at t = 0.

    Starting from the prescribed phase field and zero displacement, the
    t = 0 incremental problem is solved with the dissipation term omitted.
    """
    program = program or LoadProgram(preset=preset)
    node_sets = node_sets if node_sets is not None else classify_boundary(mesh, preset)
    cmap = ConstraintMap.from_node_sets(mesh, node_sets)
    z0 = initial_phase(preset, mesh, seed)
    dvals = dirichlet_values(program, mesh, node_sets, 0.0)
    result = alternating_solve(mesh, params, cmap, dvals, mesh.nodes.copy(), z0, z0,
                               beta=0.0, elastic_tol=elastic_tol,
                               sweep_rtol=sweep_rtol, max_sweeps=max_sweeps)
    return State(positions=result.positions, z=result.z), result


def run(preset: str, mesh: Mesh2D, params: MaterialParams,
        program: LoadProgram | None = None, seed: int = 0,
        elastic_tol: float = 1e-6, sweep_rtol: float = 1e-8,
        max_sweeps: int = 50) -> Trajectory:
    """Full quasistatic evolution over the load program's time grid."""
    program = program or LoadProgram(preset=preset)
    if program.preset != preset:
        program = replace(program, preset=preset)
    node_sets = classify_boundary(mesh, preset)
    cmap = ConstraintMap.from_node_sets(mesh, node_sets)

    state0, relax = initial_state(preset, mesh, params, seed, program, node_sets,
                                  elastic_tol, sweep_rtol, max_sweeps)
    comps = energy_components(mesh, params, state0.positions, state0.z)
    ledger = [LedgerRow(k=0, t=0.0, a=schedule_amplitude(program, 0.0),
                        e_bulk=comps.bulk, e_int1=comps.e_int1, e_int2=comps.e_int2,
                        d_inc=0.0, diss_cum=0.0,
                        frac_z1=variant_fraction(mesh, state0.z),
                        sweeps=relax.sweeps, status=relax.status)]
    states = [state0]

    diss_cum = 0.0
    y = state0.positions
    z_prev = state0.z
    for k in range(1, program.n_steps + 1):
        t = program.t_final * k / program.n_steps
        dvals = dirichlet_values(program, mesh, node_sets, t)
        result = alternating_solve(mesh, params, cmap, dvals, y, z_prev, z_prev,
                                   beta=params.beta, elastic_tol=elastic_tol,
                                   sweep_rtol=sweep_rtol, max_sweeps=max_sweeps)
        d_inc = dissipation_total(mesh, params, result.z, z_prev)
        diss_cum += d_inc
        comps = energy_components(mesh, params, result.positions, result.z)
        ledger.append(LedgerRow(k=k, t=t, a=schedule_amplitude(program, t),
                                e_bulk=comps.bulk, e_int1=comps.e_int1,
                                e_int2=comps.e_int2, d_inc=d_inc, diss_cum=diss_cum,
                                frac_z1=variant_fraction(mesh, result.z),
                                sweeps=result.sweeps, status=result.status))
        states.append(State(positions=result.positions, z=result.z))
        y = result.positions
        z_prev = result.z

    return Trajectory(preset=preset, seed=seed, mesh=mesh, params=params,
                      program=program, node_sets=node_sets, states=states,
                      ledger=ledger)


@dataclass(frozen=True)
class StabilityReport:
    """Stability of one converged step against a finite competitor set."""

    k: int
    n_checked: int
    min_margin: float
    violations: tuple[tuple[str, float], ...]

    @property
    def ok(self) -> bool:
        return len(self.violations) == 0


def stability_diagnostic(mesh: Mesh2D, params: MaterialParams, cmap: ConstraintMap,
                         dvals: np.ndarray, state: State, k: int = 0,
                         elastic_tol: float = 1e-6, tol: float = 1e-8,
                         include_uniform: bool = True) -> StabilityReport:
    """Check E(t, y, z) <= E(t, y~, z~) + dissipation(z, z~) over competitors.

    Competitors are every single-triangle phase flip and (optionally) the two
    uniform phases; each gets its deformation re-minimized from the converged
    one.  The dissipation is paid from the converged phase to the competitor.
    """
    base = energy_components(mesh, params, state.positions, state.z).total
    violations: list[tuple[str, float]] = []
    min_margin = np.inf
    n_checked = 0

    def check(label: str, z_comp: np.ndarray) -> None:
        nonlocal min_margin, n_checked
        n_checked += 1
        objective = ElasticObjective(mesh, params, z_comp, cmap, dvals)
        res = minimize(objective, state.positions, tol=elastic_tol)
        jumps = phase_jumps(mesh, z_comp)
        e1 = params.alpha_i * float(np.dot(jumps, mesh.edge_len))
        total = res.energy + e1  # res.energy already holds bulk + alpha_s part
        margin = total + dissipation_total(mesh, params, state.z, z_comp) - base
        if margin < min_margin:
            min_margin = margin
        if margin < -tol:
            violations.append((label, margin))

    for t in range(mesh.n_triangles):
        z_comp = state.z.copy()
        z_comp[t] = 1 - z_comp[t]
        check(f"flip:{t}", z_comp)
    if include_uniform:
        check("uniform:0", np.zeros(mesh.n_triangles, dtype=np.int8))
        check("uniform:1", np.ones(mesh.n_triangles, dtype=np.int8))

    return StabilityReport(k=k, n_checked=n_checked, min_margin=float(min_margin),
                           violations=tuple(violations))


@dataclass(frozen=True)
class BalanceRow:
    """Per-step energy bookkeeping.

    ``upper_gap`` is E(t_k, q_k) + D_k - E(t_k, q_{k-1}) evaluated with the
    step's boundary data imposed on the previous state; incremental
    minimality makes it nonpositive up to solver tolerance.  ``residual``
    compares the running energy-plus-dissipation total against the initial
    energy plus the accumulated boundary work estimate; it is reported, not
    asserted, because with hard Dirichlet data the work term is itself an
    estimate.
    """

    k: int
    e_total: float
    e_warm: float
    d_inc: float
    upper_gap: float
    upper_ok: bool
    work_est: float
    residual: float


def energy_balance_report(traj: Trajectory, tol: float = 1e-8) -> list[BalanceRow]:
    mesh, params, program = traj.mesh, traj.params, traj.program
    cmap = ConstraintMap.from_node_sets(mesh, traj.node_sets)
    rows: list[BalanceRow] = []
    e0 = energy_components(mesh, params, traj.states[0].positions, traj.states[0].z).total
    e_prev = e0
    diss_cum = 0.0
    work_cum = 0.0
    for k in range(1, len(traj.states)):
        t = program.t_final * k / program.n_steps
        dvals = dirichlet_values(program, mesh, traj.node_sets, t)
        prev = traj.states[k - 1]
        warm = cmap.impose(prev.positions, dvals)
        e_warm = energy_components(mesh, params, warm, prev.z).total
        cur = traj.states[k]
        e_total = energy_components(mesh, params, cur.positions, cur.z).total
        d_inc = dissipation_total(mesh, params, cur.z, prev.z)
        diss_cum += d_inc
        upper_gap = e_total + d_inc - e_warm
        work_est = e_warm - e_prev
        work_cum += work_est
        rows.append(BalanceRow(
            k=k, e_total=e_total, e_warm=e_warm, d_inc=d_inc,
            upper_gap=upper_gap, upper_ok=bool(upper_gap <= tol),
            work_est=work_est,
            residual=(e_total + diss_cum) - (e0 + work_cum)))
        e_prev = e_total
    return rows


def run_stability_diagnostics(traj: Trajectory, elastic_tol: float = 1e-6,
                              tol: float = 1e-8) -> list[StabilityReport]:
    """Stability reports for every recorded step of a trajectory."""
    cmap = ConstraintMap.from_node_sets(traj.mesh, traj.node_sets)
    reports = []
    for k, state in enumerate(traj.states):
        t = traj.program.t_final * k / traj.program.n_steps
        dvals = dirichlet_values(traj.program, traj.mesh, traj.node_sets, t)
        reports.append(stability_diagnostic(
            traj.mesh, traj.params, cmap, dvals, state, k=k,
            elastic_tol=elastic_tol, tol=tol))
    return reports


def compare_time_refinement(preset: str, mesh: Mesh2D, params: MaterialParams,
                            seed: int, program: LoadProgram | None = None,
                            factor: int = 2) -> dict[str, object]:
    """Rerun with a refined time grid and report variant-fraction deviations
    at the shared times (a sensitivity log, not an assertion)."""
    program = program or LoadProgram(preset=preset)
    fine = replace(program, n_steps=program.n_steps * factor)
    coarse_traj = run(preset, mesh, params, program, seed)
    fine_traj = run(preset, mesh, params, fine, seed)
    shared = [(k, k * factor) for k in range(program.n_steps + 1)]
    fractions = [
        (program.t_final * k / program.n_steps,
         coarse_traj.ledger[k].frac_z1, fine_traj.ledger[kf].frac_z1)
        for k, kf in shared
    ]
    max_dev = max(abs(c - f) for _, c, f in fractions)
    return {"fractions": fractions, "max_deviation": max_dev}
