"""CSV serialization of trajectory records.

Floats are written with ``repr``, Python's shortest round-trip decimal form,
so reading a file back reproduces every sample bit for bit.  Matrix blocks
are flattened row-major with 1-based ``_i_j`` suffixes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dynamics import HagedornState, HellerState
from .integrate import TrajectoryRecord

__all__ = ["csv_columns", "write_csv", "read_csv", "CsvTrajectory"]

HAGEDORN_TAIL = ("energy", "momentum_residual", "onshell_residual", "argdetQ")
HELLER_TAIL = ("energy",)


def _vec_names(sym, d):
    return [f"{sym}_{i + 1}" for i in range(d)]


def _mat_names(sym, d):
    return [f"{sym}_{i + 1}_{j + 1}" for i in range(d) for j in range(d)]


def csv_columns(kind: str, d: int) -> list:
    """Exact header for a trajectory of ``kind`` ('hagedorn' or 'heller') in dimension ``d``."""
    head = ["t", *_vec_names("q", d), *_vec_names("p", d)]
    if kind == "hagedorn":
        mats = [*_mat_names("ReQ", d), *_mat_names("ImQ", d), *_mat_names("ReP", d), *_mat_names("ImP", d)]
        return [*head, *mats, "S", *HAGEDORN_TAIL, *_mat_names("J", d)]
    if kind == "heller":
        mats = [*_mat_names("A", d), *_mat_names("B", d)]
        return [*head, *mats, "phi", *HELLER_TAIL, *_mat_names("J", d)]
    raise ValueError(f"unknown trajectory kind {kind!r}")


def _row(kind, t, s, obs, i):
    vals = [t, *s.q, *s.p]
    if kind == "hagedorn":
        vals += [*s.Q.real.ravel(), *s.Q.imag.ravel(), *s.P.real.ravel(), *s.P.imag.ravel(), s.S]
        vals += [obs[k][i] for k in HAGEDORN_TAIL]
    else:
        vals += [*s.A.ravel(), *s.B.ravel(), s.phi]
        vals += [obs[k][i] for k in HELLER_TAIL]
    vals += list(np.asarray(obs["J"][i]).ravel())
    return [repr(float(v)) for v in vals]


def write_csv(rec: TrajectoryRecord, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(csv_columns(rec.kind, rec.d))
        for i, (t, s) in enumerate(zip(rec.times, rec.states)):
            w.writerow(_row(rec.kind, t, s, rec.observables, i))
    return path


@dataclass(frozen=True)
class CsvTrajectory:
    kind: str
    d: int
    times: np.ndarray
    states: tuple
    columns: dict

    def __len__(self) -> int:
        return len(self.times)


def read_csv(path) -> CsvTrajectory:
    """Parse a file written by :func:`write_csv` back into validated states.

    Heller rows go through the Siegel-point checks (A symmetric, B positive
    definite); Hagedorn rows are rebuilt as-is, their on-shell residual is
    one of the stored columns.
    """
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        data = np.array([[float(x) for x in row] for row in r], dtype=float).reshape(-1, len(header))
    kind = "hagedorn" if "S" in header else "heller"
    d = sum(1 for h in header if h.startswith("q_"))
    if header != csv_columns(kind, d):
        raise ValueError(f"{path}: header does not match the {kind} layout for d={d}")
    cols = {h: data[:, k] for k, h in enumerate(header)}

    def block(sym):
        return np.stack([cols[n] for n in _mat_names(sym, d)], axis=-1).reshape(-1, d, d)

    def vec(sym):
        return np.stack([cols[n] for n in _vec_names(sym, d)], axis=-1)

    q, p = vec("q"), vec("p")
    if kind == "hagedorn":
        Q = block("ReQ") + 1j * block("ImQ")
        P = block("ReP") + 1j * block("ImP")
        states = tuple(HagedornState(q[i], p[i], Q[i], P[i], cols["S"][i]) for i in range(len(data)))
    else:
        A, B = block("A"), block("B")
        states = tuple(HellerState.from_AB(q[i], p[i], A[i], B[i], cols["phi"][i])
                       for i in range(len(data)))
    return CsvTrajectory(kind, d, cols["t"], states, cols)
