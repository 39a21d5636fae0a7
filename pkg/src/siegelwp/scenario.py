"""Scenario files: TOML batch configurations for the command line front end.

A scenario names a potential, the simulation parameters, a step
specification, one initial state and optional sweep axes.  Every validation
failure raises :class:`ConfigError` carrying the dotted key at fault.
"""

from __future__ import annotations

import itertools
import os
import sys
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .dynamics import HagedornState, HellerState, SimParams, lift_state, project_state
from .errors import ConfigError, NotPositiveDefinite, NonSymmetric, SiegelWPError
from .integrate import StepSpec
from .potentials import PotentialModel, make_potential
from .spgroup import ComplexQP, SP_TOL

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = [
    "Scenario",
    "RunPoint",
    "load_scenario",
    "parse_scenario",
    "bundled_scenarios",
    "resolve_scenario_path",
    "SWEEP_AXES",
    "default_out_dir",
    "OUT_ENV",
]

FORMULATIONS = ("hagedorn", "heller", "both")
SWEEP_AXES = ("hbar", "dt", "lam")
OUT_ENV = "SIEGELWP_OUT"
TOP_KEYS = {"name", "formulation", "potential", "params", "step", "initial", "sweep", "output",
            "compare", "report"}


@dataclass(frozen=True)
class RunPoint:
    """One fully resolved run of a (possibly swept) scenario."""

    label: dict
    potential: PotentialModel
    prm: SimParams
    step: StepSpec

    @property
    def tag(self) -> str:
        if not self.label:
            return ""
        return "__" + "_".join(f"{k}={v!r}" for k, v in self.label.items())


@dataclass(frozen=True)
class Scenario:
    name: str
    formulation: str
    potential_name: str
    potential_params: dict
    prm: SimParams
    step: StepSpec
    initial_kind: str
    initial: dict
    sweep: dict = field(default_factory=dict)
    out_dir: str | None = None
    compare_tol: float = 1e-6
    residual: bool = False
    source: str | None = None

    @property
    def d(self) -> int:
        return len(self.initial["q"])

    def points(self) -> list:
        """Cartesian product of the sweep axes, in the fixed order hbar, dt, lam."""
        axes = [(k, self.sweep[k]) for k in SWEEP_AXES if k in self.sweep]
        out = []
        for combo in itertools.product(*(v for _, v in axes)):
            label = dict(zip((k for k, _ in axes), combo))
            prm = replace(self.prm, hbar=label["hbar"]) if "hbar" in label else self.prm
            step = replace(self.step, dt=label["dt"]) if "dt" in label else self.step
            params = dict(self.potential_params)
            if "lam" in label:
                params["lam"] = label["lam"]
            V = _build_potential(self.potential_name, params, "sweep.lam" if "lam" in label else None)
            out.append(RunPoint(label, V, prm, step))
        return out

    def hagedorn_initial(self, prm: SimParams):
        """(HagedornState, argdet) for this scenario's initial data under ``prm``."""
        q, p = self.initial["q"], self.initial["p"]
        if self.initial_kind == "coherent":
            return HagedornState.coherent(q, p), 0.0
        if self.initial_kind == "hagedorn":
            s = HagedornState(q, p, self.initial["Q"], self.initial["P"], self.initial["S"])
            return s, float(np.angle(np.linalg.det(s.Q)))
        return lift_state(HellerState.from_AB(q, p, self.initial["A"], self.initial["B"],
                                              self.initial["phi"]), prm)

    def heller_initial(self, prm: SimParams) -> HellerState:
        q, p = self.initial["q"], self.initial["p"]
        if self.initial_kind == "coherent":
            return HellerState.coherent(q, p)
        if self.initial_kind == "heller":
            return HellerState.from_AB(q, p, self.initial["A"], self.initial["B"], self.initial["phi"])
        s, argdet = self.hagedorn_initial(prm)
        return project_state(s, prm, argdet)


def _build_potential(name, params, key=None) -> PotentialModel:
    try:
        return make_potential(name, **params)
    except ConfigError as exc:
        if key is None:
            raise
        raise ConfigError(str(exc), key=key) from None


def _table(doc, key, required=False) -> dict:
    val = doc.get(key)
    if val is None:
        if required:
            raise ConfigError(f"missing table [{key}]", key=key)
        return {}
    if not isinstance(val, dict):
        raise ConfigError(f"[{key}] must be a table", key=key)
    return val


def _number(tab, key, full, default=None, positive=False):
    val = tab.get(key, default)
    if val is None:
        raise ConfigError(f"missing value {full}", key=full)
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{full} must be a number, got {val!r}", key=full)
    if positive and not val > 0:
        raise ConfigError(f"{full} must be positive, got {val!r}", key=full)
    return float(val)


def _vector(tab, key, full):
    if key not in tab:
        raise ConfigError(f"missing value {full}", key=full)
    try:
        v = np.asarray(tab[key], dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"{full} must be a list of numbers", key=full) from None
    if v.ndim != 1 or v.size == 0:
        raise ConfigError(f"{full} must be a non-empty list of numbers", key=full)
    return v


def _matrix(tab, key, full, d, default=None):
    if key not in tab:
        if default is None:
            raise ConfigError(f"missing value {full}", key=full)
        return default
    try:
        M = np.asarray(tab[key], dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"{full} must be a {d}x{d} array of numbers", key=full) from None
    if M.shape != (d, d):
        raise ConfigError(f"{full} must have shape ({d}, {d}), got {M.shape}", key=full)
    return M


def _parse_initial(doc, V: PotentialModel):
    tab = _table(doc, "initial", required=True)
    q = _vector(tab, "q", "initial.q")
    p = _vector(tab, "p", "initial.p")
    d = q.size
    if p.size != d:
        raise ConfigError(f"initial.p has length {p.size} but initial.q has length {d}",
                          key="initial.p")
    if V.dim != d:
        raise ConfigError(f"initial state has d={d} but potential {V.name!r} has d={V.dim}",
                          key="initial")
    given = [k for k in ("coherent", "heller", "hagedorn") if k in tab]
    if "coherent" in given and tab["coherent"] is not True:
        raise ConfigError("initial.coherent must be true when present", key="initial.coherent")
    if len(given) != 1:
        raise ConfigError("give exactly one of initial.coherent, [initial.heller], "
                          f"[initial.hagedorn]; got {given or 'none'}", key="initial")
    kind = given[0]
    data = {"q": q, "p": p}
    if kind == "heller":
        h = _table(tab, "heller")
        data["A"] = _matrix(h, "A", "initial.heller.A", d, np.zeros((d, d)))
        data["B"] = _matrix(h, "B", "initial.heller.B", d)
        data["phi"] = _number(h, "phi", "initial.heller.phi", 0.0)
        try:
            HellerState.from_AB(q, p, data["A"], data["B"], data["phi"])
        except NonSymmetric as exc:
            raise ConfigError(str(exc), key="initial.heller") from None
        except NotPositiveDefinite as exc:
            raise ConfigError(str(exc), key="initial.heller.B") from None
    elif kind == "hagedorn":
        h = _table(tab, "hagedorn")
        zero = np.zeros((d, d))
        Q = _matrix(h, "Q_re", "initial.hagedorn.Q_re", d) + 1j * _matrix(h, "Q_im", "initial.hagedorn.Q_im", d, zero)
        P = _matrix(h, "P_re", "initial.hagedorn.P_re", d, zero) + 1j * _matrix(h, "P_im", "initial.hagedorn.P_im", d)
        res = ComplexQP(Q, P).onshell_residual()
        if res > SP_TOL:
            raise ConfigError(f"initial (Q, P) is off-shell (residual {res:.3e})",
                              key="initial.hagedorn")
        data["Q"], data["P"] = Q, P
        data["S"] = _number(h, "S", "initial.hagedorn.S", 0.0)
    return kind, data


def _parse_sweep(doc, name, params):
    tab = _table(doc, "sweep")
    out = {}
    for k, v in tab.items():
        full = f"sweep.{k}"
        if k not in SWEEP_AXES:
            raise ConfigError(f"unknown sweep axis {k!r}; allowed: {SWEEP_AXES}", key=full)
        if not isinstance(v, list) or not v:
            raise ConfigError(f"{full} must be a non-empty list", key=full)
        vals = []
        for x in v:
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise ConfigError(f"{full} entries must be numbers, got {x!r}", key=full)
            if k != "lam" and not x > 0:
                raise ConfigError(f"{full} entries must be positive, got {x!r}", key=full)
            vals.append(float(x))
        out[k] = vals
    if "lam" in out:
        _build_potential(name, {**params, "lam": out["lam"][0]}, "sweep.lam")
    return out


def parse_scenario(doc: dict, default_name: str = "scenario", source: str | None = None) -> Scenario:
    """Validate a decoded TOML document and build a :class:`Scenario`."""
    unknown = sorted(set(doc) - TOP_KEYS)
    if unknown:
        raise ConfigError(f"unknown top-level key {unknown[0]!r}", key=unknown[0])
    name = doc.get("name", default_name)
    if not isinstance(name, str) or not name:
        raise ConfigError("name must be a non-empty string", key="name")
    formulation = doc.get("formulation", "hagedorn")
    if formulation not in FORMULATIONS:
        raise ConfigError(f"formulation must be one of {FORMULATIONS}, got {formulation!r}",
                          key="formulation")

    pot = dict(_table(doc, "potential"))
    pname = pot.pop("name", None)
    if not isinstance(pname, str) or not pname:
        raise ConfigError("missing potential name", key="potential.name")
    V = _build_potential(pname, pot)

    ptab = _table(doc, "params")
    corrected = ptab.get("corrected", False)
    if not isinstance(corrected, bool):
        raise ConfigError("params.corrected must be true or false", key="params.corrected")
    prm = SimParams(m=_number(ptab, "m", "params.m", 1.0, positive=True),
                    hbar=_number(ptab, "hbar", "params.hbar", 1.0, positive=True),
                    corrected=corrected)

    stab = _table(doc, "step", required=True)
    scheme = stab.get("scheme", "rk4")
    every = stab.get("sample_every", 1)
    if isinstance(every, bool) or not isinstance(every, int) or every < 1:
        raise ConfigError("step.sample_every must be an integer >= 1", key="step.sample_every")
    try:
        step = StepSpec(_number(stab, "dt", "step.dt", positive=True),
                        _number(stab, "t_end", "step.t_end"), scheme, every)
        step.n_steps
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc), key="step") from None
    if scheme == "strang" and formulation != "hagedorn":
        raise ConfigError("the strang scheme integrates Hagedorn states only", key="step.scheme")

    kind, initial = _parse_initial(doc, V)
    sweep = _parse_sweep(doc, pname, pot)

    out_dir = _table(doc, "output").get("dir")
    if out_dir is not None and not isinstance(out_dir, str):
        raise ConfigError("output.dir must be a string", key="output.dir")
    ctab = _table(doc, "compare")
    compare_tol = _number(ctab, "tol", "compare.tol", 1e-6, positive=True)
    residual = _table(doc, "report").get("residual", False)
    if not isinstance(residual, bool):
        raise ConfigError("report.residual must be true or false", key="report.residual")
    if residual and len(initial["q"]) > 2:
        raise ConfigError("report.residual needs d <= 2 (grid quadrature)", key="report.residual")

    return Scenario(name, formulation, pname, pot, prm, step, kind, initial, sweep, out_dir,
                    compare_tol, residual, source)


def bundled_scenarios() -> list:
    """File names of the scenarios shipped with the package."""
    root = resources.files("siegelwp") / "scenarios"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".toml"))


def resolve_scenario_path(path) -> Path:
    """``path`` itself when it exists, otherwise a bundled scenario of that name."""
    p = Path(path)
    if p.exists():
        return p
    name = p.name if p.suffix == ".toml" else p.name + ".toml"
    if name in bundled_scenarios():
        return Path(str(resources.files("siegelwp") / "scenarios" / name))
    raise ConfigError(f"scenario file {str(path)!r} not found (bundled: {bundled_scenarios()})",
                      key="file")


def load_scenario(path) -> Scenario:
    p = resolve_scenario_path(path)
    try:
        with open(p, "rb") as fh:
            doc = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{p}: invalid TOML: {exc}", key="file") from None
    try:
        return parse_scenario(doc, default_name=p.stem, source=str(p))
    except SiegelWPError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc), key="initial") from None


def default_out_dir(scenario: Scenario | None = None, flag: str | None = None) -> Path:
    """--out flag, then the scenario's output.dir, then $SIEGELWP_OUT, then ./siegelwp-out."""
    if flag:
        return Path(flag)
    if scenario is not None and scenario.out_dir:
        return Path(scenario.out_dir)
    return Path(os.environ.get(OUT_ENV, "siegelwp-out"))
