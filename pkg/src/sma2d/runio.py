"""Run-directory persistence: manifest, ledger CSV, mesh table, snapshots.

All files are written atomically (temp file in the target directory, then
rename) and all floating-point output uses a fixed 17-significant-digit
format, so identical runs produce byte-identical files.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np

from . import kernels
from .config import RunConfig, parse_config_string, serialize_config
from .driver import LedgerRow, State, Trajectory, schedule_amplitude
from .mesh import Mesh2D, NodeSets, export_mesh_text

LEDGER_COLUMNS = ("k", "t", "a", "E_bulk", "E_int1", "E_int2", "D_inc",
                  "Diss_cum", "frac_z1", "sweeps", "status")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def ledger_csv_text(rows: list[LedgerRow]) -> str:
    lines = [",".join(LEDGER_COLUMNS)]
    for r in rows:
        lines.append(",".join([
            str(r.k), _fmt(r.t), _fmt(r.a), _fmt(r.e_bulk), _fmt(r.e_int1),
            _fmt(r.e_int2), _fmt(r.d_inc), _fmt(r.diss_cum), _fmt(r.frac_z1),
            str(r.sweeps), r.status,
        ]))
    return "\n".join(lines) + "\n"


def snapshot_text(mesh: Mesh2D, state: State, k: int, t: float, a: float) -> str:
    lines = [f"k = {k}", f"t = {_fmt(t)}", f"a = {_fmt(a)}", "[nodes]"]
    ref = mesh.nodes
    pos = state.positions
    for i in range(mesh.n_nodes):
        lines.append(f"{i} {_fmt(ref[i, 0])} {_fmt(ref[i, 1])} "
                     f"{_fmt(pos[i, 0])} {_fmt(pos[i, 1])}")
    lines.append("[triangles]")
    for tri in range(mesh.n_triangles):
        lines.append(f"{tri} {int(state.z[tri])}")
    return "\n".join(lines) + "\n"


def write_run(traj: Trajectory, cfg: RunConfig, out_dir: str | Path,
              partial: bool = False) -> Path:
    """Persist a trajectory; returns the run directory path."""
    run_dir = Path(out_dir)
    run_dir.mkdir(parents=True, exist_ok=True)

    meta = [
        "[meta]",
        "format = sma2d-run-1",
        f"kernel_backend = {kernels.backend_name()}",
        f"partial = {'true' if partial else 'false'}",
        f"n_snapshots = {len(traj.states) if cfg.emit_snapshots else 0}",
    ]
    _atomic_write(run_dir / "manifest.txt",
                  serialize_config(cfg) + "\n".join(meta) + "\n")
    _atomic_write(run_dir / "mesh.txt", export_mesh_text(traj.mesh, traj.node_sets))
    _atomic_write(run_dir / "ledger.csv", ledger_csv_text(traj.ledger))
    if cfg.emit_snapshots:
        for k, state in enumerate(traj.states):
            row = traj.ledger[k]
            _atomic_write(run_dir / f"snap_{k:03d}.txt",
                          snapshot_text(traj.mesh, state, k, row.t, row.a))
    return run_dir


def read_manifest(run_dir: str | Path) -> tuple[RunConfig, dict[str, str]]:
    text = (Path(run_dir) / "manifest.txt").read_text(encoding="utf-8")
    cfg = parse_config_string(text)
    meta: dict[str, str] = {}
    in_meta = False
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("["):
            in_meta = line == "[meta]"
            continue
        if in_meta and "=" in line:
            key, _, value = line.partition("=")
            meta[key.strip()] = value.strip()
    return cfg, meta


def read_ledger(path: str | Path) -> list[LedgerRow]:
    lines = Path(path).read_text(encoding="utf-8").strip().splitlines()
    if lines[0] != ",".join(LEDGER_COLUMNS):
        raise ValueError(f"unexpected ledger header in {path}")
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        rows.append(LedgerRow(
            k=int(parts[0]), t=float(parts[1]), a=float(parts[2]),
            e_bulk=float(parts[3]), e_int1=float(parts[4]), e_int2=float(parts[5]),
            d_inc=float(parts[6]), diss_cum=float(parts[7]), frac_z1=float(parts[8]),
            sweeps=int(parts[9]), status=parts[10]))
    return rows


def read_snapshot(path: str | Path) -> tuple[int, float, float, np.ndarray, np.ndarray]:
    """Returns (k, t, a, deformed positions, phase vector)."""
    header: dict[str, float] = {}
    nodes: list[tuple[float, float]] = []
    zs: list[int] = []
    section = ""
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("["):
            section = line
            continue
        if section == "":
            key, _, value = line.partition("=")
            header[key.strip()] = float(value)
        elif section == "[nodes]":
            parts = line.split()
            nodes.append((float(parts[3]), float(parts[4])))
        elif section == "[triangles]":
            zs.append(int(line.split()[1]))
    return (int(header["k"]), header["t"], header["a"],
            np.array(nodes), np.array(zs, dtype=np.int8))


def load_states(run_dir: str | Path, n_steps: int) -> list[State]:
    states = []
    for k in range(n_steps + 1):
        path = Path(run_dir) / f"snap_{k:03d}.txt"
        _, _, _, pos, z = read_snapshot(path)
        states.append(State(positions=pos, z=z))
    return states
