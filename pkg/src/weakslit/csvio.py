"""Deterministic CSV and binary writers for the simulation artifacts.

Floats are rendered with repr() (shortest round-trip form), so identical
inputs always produce byte-identical files.
"""

from __future__ import annotations

import hashlib
import struct
from pathlib import Path

import numpy as np

from .qcore import Grid1D, WaveState


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, columns, rows, comments=()) -> None:
    """Write rows (iterable of tuples) under a `#`-commented preamble."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as f:
        for line in comments:
            f.write(f"# {line}\n")
        f.write(",".join(columns) + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")


def read_csv(path):
    """Read back a `#`-commented CSV; returns (comments, columns, rows-as-strings)."""
    comments, columns, rows = [], None, []
    with open(path) as f:
        for line in f:
            line = line.rstrip("\n")
            if line.startswith("#"):
                comments.append(line[1:].strip())
            elif columns is None:
                columns = line.split(",")
            elif line:
                rows.append(line.split(","))
    return comments, columns, rows


def save_wavestate_csv(state: WaveState, path, extra_comments=()) -> None:
    comments = [f"t = {_fmt(state.t)}",
                f"grid = [{_fmt(state.grid.x_min)}, {_fmt(state.grid.x_max)}] "
                f"n = {state.grid.n_points}"]
    if state.components is not None:
        for c in state.components:
            p = c.params
            comments.append(
                "component: weight = {}+{}j, x0 = {}, p0 = {}, d = {}, m = {}".format(
                    _fmt(c.weight.real), _fmt(c.weight.imag),
                    _fmt(p.x0), _fmt(p.p0), _fmt(p.d), _fmt(p.m)))
    comments.extend(extra_comments)
    x = state.grid.x
    rows = ((x[i], state.amplitudes[i].real, state.amplitudes[i].imag)
            for i in range(state.grid.n_points))
    write_csv(path, ("x", "re", "im"), rows, comments)


def load_wavestate_csv(path) -> WaveState:
    comments, cols, rows = read_csv(path)
    if cols != ["x", "re", "im"]:
        raise ValueError(f"unexpected wavestate columns {cols}")
    t = 0.0
    for c in comments:
        if c.startswith("t ="):
            t = float(c.split("=", 1)[1])
    x = np.array([float(r[0]) for r in rows])
    amp = np.array([float(r[1]) + 1j * float(r[2]) for r in rows])
    grid = Grid1D(float(x[0]), float(x[-1]), len(x))
    return WaveState(grid=grid, amplitudes=amp, t=t)


MAGIC = b"WPS1"


def save_state_binary(coeffs: np.ndarray, path) -> None:
    """Dump a complex matrix: magic 'WPS1', little-endian uint32 dims,
    then row-major interleaved re/im float64."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<II", c.shape[0], c.shape[1]))
        inter = np.empty((c.shape[0], c.shape[1], 2))
        inter[..., 0] = c.real
        inter[..., 1] = c.imag
        f.write(inter.astype("<f8").tobytes())


def load_state_binary(path) -> np.ndarray:
    with open(path, "rb") as f:
        if f.read(4) != MAGIC:
            raise ValueError("bad magic; not a WPS1 state dump")
        nx, ny = struct.unpack("<II", f.read(8))
        raw = np.frombuffer(f.read(), dtype="<f8").reshape(nx, ny, 2)
    return (raw[..., 0] + 1j * raw[..., 1]).astype(np.complex128)


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()
