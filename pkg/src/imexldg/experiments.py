"""Experiment configuration and drivers behind the command line interface."""
from __future__ import annotations

import csv
import json
import math
import re
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Literal, Optional, Union

import numpy as np
import tomli
import tomli_w
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .energy import ENERGY_COLUMNS, check_monotone
from .errors import ConfigurationError
from .limit import LimitSolver, initialize_limit, run_limit
from .materials import MaterialCoefficients, affine, constant, sinusoidal
from .mesh_basis import MAX_DEGREE, DGField, Mesh1D, build_mesh, gauss_rule
from .operators import FluxPair, assemble_ldg
from .stability import (
    auto_mu,
    classify_region,
    dt_stab_combined,
    dt_stab_optimal,
    dt_uniform,
    special_roots,
    stability_params,
)
from .stepper import Imex1Stepper, KineticState, WeightFunction, WeightVariant, initialize, run
from .velocity import VelocitySpace, make_velocity_space

_PI_RE = re.compile(r"^\s*([-+]?[0-9]*\.?[0-9]*(?:[eE][-+]?[0-9]+)?)\s*\*?\s*pi\s*$")


def parse_real(value) -> float:
    """Numbers, or strings such as ``"2pi"``, ``"2*pi"``, ``"pi"``, ``"1e-3"``."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        m = _PI_RE.match(value)
        if m:
            coef = m.group(1)
            return (float(coef) if coef not in ("", "+", "-") else float(coef + "1")) * math.pi
        try:
            return float(value)
        except ValueError:
            pass
    raise ValueError(f"cannot interpret {value!r} as a real number")


# names usable inside custom initial-data expressions
_EXPR_NAMES = {
    name: getattr(np, name)
    for name in ("sin", "cos", "tan", "exp", "log", "sqrt", "abs", "sinh", "cosh", "tanh", "pi", "where", "ones_like", "zeros_like")
}


def compile_expression(expr: str, variables: tuple[str, ...]) -> Callable:
    try:
        code = compile(expr, "<expression>", "eval")
    except SyntaxError as exc:
        raise ConfigurationError(f"bad expression {expr!r}: {exc.msg}") from None
    for name in code.co_names:
        if name not in _EXPR_NAMES and name not in variables:
            raise ConfigurationError(f"unknown name {name!r} in expression {expr!r}")

    def fn(*args):
        scope = dict(_EXPR_NAMES)
        scope.update(zip(variables, args))
        out = eval(code, {"__builtins__": {}}, scope)
        return np.broadcast_to(np.asarray(out, dtype=float), np.shape(args[0])).copy()

    return fn


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class CoefficientSpec(_Model):
    """``constant``: value. ``affine``: a + b x. ``sinusoidal``: mean + amplitude * fn(wavenumber x + phase)."""

    kind: Literal["constant", "affine", "sinusoidal"] = "constant"
    value: float = 1.0
    a: float = 0.0
    b: float = 0.0
    mean: float = 1.0
    amplitude: float = 0.0
    wavenumber: float = 1.0
    phase: float = 0.0
    fn: Literal["sin", "cos"] = "sin"

    def build(self) -> Callable:
        if self.kind == "constant":
            return constant(self.value)
        if self.kind == "affine":
            return affine(self.a, self.b)
        return sinusoidal(self.mean, self.amplitude, self.wavenumber, self.phase, self.fn)


class MeshSpec(_Model):
    x_left: float = 0.0
    x_right: float = 2 * math.pi
    n_elems: int = Field(32, ge=1)

    @field_validator("x_left", "x_right", mode="before")
    @classmethod
    def _real(cls, v):
        return parse_real(v)

    @model_validator(mode="after")
    def _order(self):
        if not self.x_right > self.x_left:
            raise ValueError("x_right must exceed x_left")
        return self

    @property
    def h(self) -> float:
        return (self.x_right - self.x_left) / self.n_elems


class MaterialSpec(_Model):
    sigma_s: CoefficientSpec = CoefficientSpec()
    sigma_a: CoefficientSpec = CoefficientSpec(value=0.0)
    sigma_m: float = Field(1.0, gt=0)
    sigma_M: float = Field(1.0, gt=0)

    def build(self) -> MaterialCoefficients:
        return MaterialCoefficients(self.sigma_s.build(), self.sigma_a.build(), self.sigma_m, self.sigma_M)


class WeightSpec(_Model):
    variant: WeightVariant = WeightVariant.CONSTANT_ONE
    alpha: float = Field(0.25, gt=0)

    def build(self) -> WeightFunction:
        return WeightFunction(self.variant, self.alpha)


class InitialSpec(_Model):
    """``well_prepared_sine``: rho = amplitude sin x, g = -v amplitude cos x / sigma_s.
    ``custom``: expressions in ``x`` (and ``v`` for ``g``)."""

    preset: Literal["well_prepared_sine", "zero", "constant", "custom"] = "well_prepared_sine"
    amplitude: float = 1.0
    value: float = 1.0
    rho: Optional[str] = None
    g: Optional[str] = None
    drho: Optional[str] = None

    @model_validator(mode="after")
    def _custom(self):
        if self.preset == "custom" and self.rho is None:
            raise ValueError("custom initial data needs a 'rho' expression")
        return self


class RegionMapSpec(_Model):
    eps: list[float] = []
    h: list[float] = []


class ApStudySpec(_Model):
    eps: list[float] = [1e-2, 1e-3, 1e-4, 1e-6]

    @field_validator("eps", mode="before")
    @classmethod
    def _reals(cls, v):
        return [parse_real(x) for x in v]


class ConvergenceSpec(_Model):
    """``limit_space``: levels are element counts, dt = dt_coef * h^(k+1).
    ``kinetic_time``: levels are time steps on the configured mesh, compared with
    a run at min(levels) / reference_factor."""

    mode: Literal["limit_space", "kinetic_time"] = "limit_space"
    levels: list[float] = [8, 16, 32, 64]
    dt_coef: float = Field(0.1, gt=0)
    t_final: float = Field(0.1, gt=0)
    reference_factor: int = Field(64, ge=2)
    expected_order: Optional[tuple[float, float]] = None


class ExperimentConfig(_Model):
    model: Literal["telegraph", "slab"] = "telegraph"
    n_nodes: int = 2
    mesh: MeshSpec = MeshSpec()
    k: int = Field(1, ge=0, le=MAX_DEGREE)
    flux: FluxPair = FluxPair.RIGHT_LEFT
    weight: WeightSpec = WeightSpec()
    material: MaterialSpec = MaterialSpec()
    eps: float = Field(1.0, gt=0)
    dt: Union[float, str] = "theorem"
    dt_cap: Optional[float] = Field(None, gt=0)
    n_steps: Optional[int] = Field(None, ge=1)
    t_final: Optional[float] = Field(None, gt=0)
    mu: Union[float, Literal["auto"], None] = "auto"
    initial: InitialSpec = InitialSpec()
    output: str = "out"
    region_map: RegionMapSpec = RegionMapSpec()
    ap_study: ApStudySpec = ApStudySpec()
    convergence: ConvergenceSpec = ConvergenceSpec()

    @field_validator("eps", mode="before")
    @classmethod
    def _eps(cls, v):
        return parse_real(v)

    @field_validator("dt", mode="before")
    @classmethod
    def _dt(cls, v):
        if isinstance(v, str):
            s = v.replace(" ", "")
            if s == "theorem" or re.fullmatch(r"theorem[*x×][0-9.eE+-]+", s):
                return s
            return parse_real(s)
        if not float(v) > 0:
            raise ValueError("dt must be positive")
        return float(v)

    @field_validator("mu")
    @classmethod
    def _mu(cls, v):
        if isinstance(v, float) and not 0.0 <= v <= 1.0:
            raise ValueError("mu must lie in [0, 1]")
        return v

    @model_validator(mode="after")
    def _steps(self):
        if self.n_steps is None and self.t_final is None:
            self.n_steps = 100
        return self

    def velocity_space(self) -> VelocitySpace:
        return make_velocity_space(self.model, self.n_nodes if self.model == "slab" else 2)

    def omega_at(self, eps: float, h: float) -> float:
        return self.weight.build().value(eps, self.material.sigma_m, h)

    def params_at(self, eps: float, h: float):
        return stability_params(self.k, self.omega_at(eps, h), self.velocity_space(), self.material.sigma_m)

    def resolve_dt(self, eps: float | None = None, h: float | None = None) -> float:
        eps = self.eps if eps is None else eps
        h = self.mesh.h if h is None else h
        if isinstance(self.dt, float):
            dt = self.dt
        else:
            factor = float(re.split(r"[*x×]", self.dt, maxsplit=1)[1]) if self.dt != "theorem" else 1.0
            bound = dt_stab_combined(self.params_at(eps, h), eps, h)
            if math.isinf(bound) and self.dt_cap is None:
                raise ConfigurationError("dt = 'theorem' but the bound is infinite; set dt_cap")
            dt = bound * factor
        if self.dt_cap is not None:
            dt = min(dt, self.dt_cap)
        if not (dt > 0 and math.isfinite(dt)):
            raise ConfigurationError(f"resolved dt = {dt} is not a positive finite number")
        return dt

    def resolve_steps(self, dt: float) -> int:
        if self.n_steps is not None:
            return self.n_steps
        return max(1, math.ceil(self.t_final / dt - 1e-12))

    def resolve_mu(self, eps: float | None = None, h: float | None = None) -> float | None:
        if self.mu != "auto":
            return self.mu
        eps = self.eps if eps is None else eps
        h = self.mesh.h if h is None else h
        return auto_mu(self.params_at(eps, h), eps, h)


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomli.load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}") from None
    except tomli.TOMLDecodeError as exc:
        raise ConfigurationError(f"invalid TOML in {path}: {exc}") from None
    return ExperimentConfig.model_validate(data)


def dump_config(cfg: ExperimentConfig) -> str:
    return tomli_w.dumps(cfg.model_dump(mode="json", exclude_none=True))


class Problem:
    """Mesh, operators, material and velocity space built from a configuration."""

    def __init__(self, cfg: ExperimentConfig, n_elems: int | None = None):
        self.cfg = cfg
        self.mesh = build_mesh(cfg.mesh.x_left, cfg.mesh.x_right, n_elems or cfg.mesh.n_elems)
        self.k = cfg.k
        self.vs = cfg.velocity_space()
        self.mat = cfg.material.build()
        self.mat.validate(self.mesh, self.k)
        self.matrices = assemble_ldg(self.mesh, self.k, cfg.flux)
        self.weight = cfg.weight.build()

    def initial_functions(self):
        spec, sig = self.cfg.initial, self.mat.sigma_s
        if spec.preset == "well_prepared_sine":
            a = spec.amplitude
            return (lambda x: a * np.sin(x)), (lambda x, v: -v * a * np.cos(x) / sig(x)), (lambda x: a * np.cos(x))
        if spec.preset in ("zero", "constant"):
            c = 0.0 if spec.preset == "zero" else spec.value
            return (lambda x: np.full(np.shape(x), c)), (lambda x, v: np.zeros(np.shape(x))), None
        rho = compile_expression(spec.rho, ("x",))
        g = compile_expression(spec.g, ("x", "v")) if spec.g else (lambda x, v: np.zeros(np.shape(x)))
        drho = compile_expression(spec.drho, ("x",)) if spec.drho else None
        return rho, g, drho

    def initial_state(self) -> KineticState:
        rho, g, drho = self.initial_functions()
        return initialize(rho, g, self.mat, self.mesh, self.k, self.vs, drho)

    def stepper(self) -> Imex1Stepper:
        return Imex1Stepper(self.matrices, self.mat, self.vs)

    def limit_solver(self) -> LimitSolver:
        return LimitSolver(self.matrices, self.mat, self.vs)


def _fmt(x) -> Any:
    if isinstance(x, float):
        return repr(x)
    return x


def write_csv(path: Path, header, rows) -> None:
    """Rows are dicts keyed by ``header`` or plain sequences."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            values = [row[c] for c in header] if isinstance(row, dict) else row
            w.writerow([_fmt(v) for v in values])


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def write_json(path: Path, data) -> None:
    path.write_text(json.dumps(_json_safe(data), indent=2, sort_keys=True) + "\n")


def final_state_rows(state: KineticState):
    n_elems, p = state.rho.shape
    for name in ("rho", "q", "u"):
        arr = getattr(state, name)
        for i in range(n_elems):
            for m in range(p):
                yield [name, "", i, m, float(arr[i, m])]
    for j in range(state.g.shape[0]):
        for i in range(n_elems):
            for m in range(p):
                yield ["g", j, i, m, float(state.g[j, i, m])]


def _prepare_out(out: str | Path, cfg: ExperimentConfig) -> Path:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.toml").write_text(dump_config(cfg))
    return out


def cmd_run(cfg: ExperimentConfig, out: str | Path) -> dict:
    """Kinetic run with energy monitoring; returns the summary."""
    prob = Problem(cfg)
    out = _prepare_out(out, cfg)
    eps, h = cfg.eps, prob.mesh.h
    dt = cfg.resolve_dt()
    n_steps = cfg.resolve_steps(dt)
    mu = cfg.resolve_mu()
    mu_energy = 1.0 if mu is None else mu
    params = cfg.params_at(eps, h)
    traj = run(prob.stepper(), prob.initial_state(), dt, eps, prob.weight, n_steps, mu=mu_energy)

    write_csv(out / "energy.csv", ENERGY_COLUMNS, [r.as_row() for r in traj.energies])
    write_csv(out / "final_state.csv", ["variable", "node", "cell", "mode", "value"], final_state_rows(traj.final))
    report = check_monotone(traj.energies)
    report_h = check_monotone(traj.energies, attr="E_h")
    summary = {
        "command": "run",
        "model": prob.vs.label,
        "k": cfg.k,
        "n_elems": prob.mesh.n_elems,
        "h": h,
        "eps": eps,
        "ratio": params.ratio(eps, h),
        "omega": params.omega_value,
        "dt": dt,
        "n_steps": n_steps,
        "t_final": traj.final.time,
        "mu": mu_energy,
        "dt_bound": dt_stab_combined(params, eps, h),
        "classification": classify_region(params, eps, h, dt).value,
        "monotone_E_h_mu": report.passed,
        "monotone_E_h": report_h.passed,
        "first_violation": report.violation_n,
        "max_rel_increase": report.max_rel_increase if report.n_checked else None,
        "final_rho_norm": float(np.linalg.norm(traj.final.rho)),
        "final_energy": traj.energies[-1].E_h_mu if traj.energies else None,
    }
    write_json(out / "summary.json", summary)
    return summary


def region_map_rows(cfg: ExperimentConfig, eps_grid, h_grid):
    rows = []
    for eps in eps_grid:
        for h in h_grid:
            eps, h = float(eps), float(h)
            params = cfg.params_at(eps, h)
            bound = dt_stab_combined(params, eps, h)
            if isinstance(cfg.dt, float):
                dt = cfg.dt
            else:
                dt = bound if math.isfinite(bound) else (cfg.dt_cap or 1.0)
            rows.append({
                "eps": eps,
                "h": h,
                "ratio": params.ratio(eps, h),
                "lambda_star": params.lambda_star if params.lambda_star is not None else float("nan"),
                "class": classify_region(params, eps, h, dt).value,
                "dt_bound": bound,
            })
    return rows


REGION_COLUMNS = ("eps", "h", "ratio", "lambda_star", "class", "dt_bound")


def cmd_region_map(cfg: ExperimentConfig, out: str | Path, eps_grid=None, h_grid=None) -> list[dict]:
    out = _prepare_out(out, cfg)
    eps_grid = cfg.region_map.eps if eps_grid is None else eps_grid
    h_grid = cfg.region_map.h if h_grid is None else h_grid
    rows = region_map_rows(cfg, eps_grid, h_grid)
    write_csv(out / "region_map.csv", REGION_COLUMNS, rows)
    return rows


AP_COLUMNS = ("eps", "rho_err", "u_err", "g_eq_err", "rho_rel_err", "rho_limit_norm")


def _field_norm(coeffs: np.ndarray) -> float:
    # orthonormal basis: the L2 norm is the coefficient 2-norm
    return float(np.linalg.norm(coeffs))


def ap_discrepancies(prob: Problem, eps: float, dt: float, n_steps: int, limit_final=None) -> dict:
    """Distance between the kinetic run at ``eps`` and the limit scheme after ``n_steps`` steps."""
    if limit_final is None:
        solver = prob.limit_solver()
        limit_final = run_limit(solver, initialize_limit(prob.initial_functions()[0], solver), dt, n_steps).final
    rho_lim = _field_norm(limit_final.rho)
    if eps == 0:
        # the limit scheme compared with itself
        diff = {"rho": limit_final.rho - limit_final.rho, "u": limit_final.u - limit_final.u}
        g_eq = limit_final.g_eq + prob.vs.nodes[:, None, None] * limit_final.u[None]
    else:
        fin = run(prob.stepper(), prob.initial_state(), dt, eps, prob.weight, n_steps).final
        diff = {"rho": fin.rho - limit_final.rho, "u": fin.u - limit_final.u}
        g_eq = fin.g + prob.vs.nodes[:, None, None] * fin.u[None]
    rho_err = _field_norm(diff["rho"])
    return {
        "eps": float(eps),
        "rho_err": rho_err,
        "u_err": _field_norm(diff["u"]),
        "g_eq_err": max(_field_norm(gj) for gj in g_eq),
        "rho_rel_err": rho_err / rho_lim if rho_lim > 0 else rho_err,
        "rho_limit_norm": rho_lim,
    }


def cmd_ap_study(cfg: ExperimentConfig, out: str | Path, eps_list=None, workers: int = 1) -> list[dict]:
    prob = Problem(cfg)
    out = _prepare_out(out, cfg)
    eps_list = cfg.ap_study.eps if eps_list is None else [parse_real(e) for e in eps_list]
    if isinstance(cfg.dt, float):
        dt = cfg.dt if cfg.dt_cap is None else min(cfg.dt, cfg.dt_cap)
    else:
        positive = [e for e in eps_list if e > 0] or [cfg.eps]
        dt = min(cfg.resolve_dt(eps=e) for e in positive)
    n_steps = cfg.resolve_steps(dt)
    solver = prob.limit_solver()
    lim = run_limit(solver, initialize_limit(prob.initial_functions()[0], solver), dt, n_steps).final
    task = lambda e: ap_discrepancies(prob, e, dt, n_steps, lim)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(task, eps_list))
    else:
        rows = [task(e) for e in eps_list]
    write_csv(out / "ap_study.csv", AP_COLUMNS, rows)
    return rows


def ap_strictly_decreasing(rows: list[dict]) -> bool:
    """All three discrepancy columns strictly decrease as eps decreases (eps > 0 rows only)."""
    pos = sorted((r for r in rows if r["eps"] > 0), key=lambda r: -r["eps"])
    return all(
        b[c] < a[c] for a, b in zip(pos, pos[1:]) for c in ("rho_err", "u_err", "g_eq_err")
    )


def l2_error(coeffs: np.ndarray, mesh: Mesh1D, exact: Callable, n_quad: int | None = None) -> float:
    """``||rho_h - exact||`` by Gauss quadrature."""
    k = coeffs.shape[1] - 1
    xi, w = gauss_rule(n_quad or k + 4)
    diff = DGField(mesh, k, coeffs).cell_values(xi) - exact(mesh.physical_points(xi))
    return float(np.sqrt(np.sum((diff**2) * w[None, :] * mesh.cell_widths[:, None] / 2)))


def fit_order(sizes, errors) -> float | None:
    """Least-squares slope of log(error) against log(size)."""
    if len(sizes) < 2:
        return None
    return float(np.polyfit(np.log(np.asarray(sizes, float)), np.log(np.asarray(errors, float)), 1)[0])


CONVERGENCE_COLUMNS = ("level", "h", "dt", "n_steps", "error")


def _limit_decay_rate(cfg: ExperimentConfig, mean_v2: float) -> float:
    """Decay rate of the sin x mode of the limit equation; needs constant coefficients."""
    mat, mesh = cfg.material, cfg.mesh
    if mat.sigma_s.kind != "constant" or mat.sigma_a.kind != "constant":
        raise ConfigurationError("limit_space convergence needs constant sigma_s and sigma_a")
    periods = (mesh.x_right - mesh.x_left) / (2 * math.pi)
    if abs(periods - round(periods)) > 1e-12 * max(1.0, periods) or round(periods) < 1:
        raise ConfigurationError("limit_space convergence needs a domain length that is a multiple of 2pi")
    return mean_v2 / mat.sigma_s.value + mat.sigma_a.value


def _limit_space_level(cfg: ExperimentConfig, n_elems: int) -> dict:
    prob = Problem(cfg, n_elems=n_elems)
    h, spec = prob.mesh.h, cfg.convergence
    n_steps = max(1, math.ceil(spec.t_final / (spec.dt_coef * h ** (cfg.k + 1)) - 1e-12))
    dt = spec.t_final / n_steps
    solver = prob.limit_solver()
    fin = run_limit(solver, initialize_limit(np.sin, solver), dt, n_steps).final
    decay = math.exp(-_limit_decay_rate(cfg, prob.vs.mean_v2) * spec.t_final)
    err = l2_error(fin.rho, prob.mesh, lambda x: decay * np.sin(x))
    return {"level": n_elems, "h": h, "dt": dt, "n_steps": n_steps, "error": err}


def _kinetic_time_run(prob: Problem, cfg: ExperimentConfig, dt: float):
    n_steps = max(1, round(cfg.convergence.t_final / dt))
    dt = cfg.convergence.t_final / n_steps
    fin = run(prob.stepper(), prob.initial_state(), dt, cfg.eps, prob.weight, n_steps).final
    return dt, n_steps, fin


def cmd_convergence(cfg: ExperimentConfig, out: str | Path, levels=None, workers: int = 1) -> dict:
    out = _prepare_out(out, cfg)
    spec = cfg.convergence
    levels = list(spec.levels if levels is None else levels)
    if spec.mode == "limit_space":
        task = lambda n: _limit_space_level(cfg, int(n))
        sizes_key = "h"
    else:
        prob = Problem(cfg)
        _, _, ref = _kinetic_time_run(prob, cfg, min(levels) / spec.reference_factor)

        def task(dt):
            dt, n_steps, fin = _kinetic_time_run(prob, cfg, float(dt))
            return {"level": dt, "h": prob.mesh.h, "dt": dt, "n_steps": n_steps,
                    "error": _field_norm(fin.rho - ref.rho)}

        sizes_key = "dt"
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(task, levels))
    else:
        rows = [task(lv) for lv in levels]
    write_csv(out / "convergence.csv", CONVERGENCE_COLUMNS, rows)
    order = fit_order([r[sizes_key] for r in rows], [r["error"] for r in rows])
    result = {"command": "convergence", "mode": spec.mode, "k": cfg.k, "order": order, "rows": rows}
    if spec.expected_order is not None and order is not None:
        lo, hi = spec.expected_order
        result["order_ok"] = lo <= order <= hi
    write_json(out / "summary.json", result)
    return result


def stability_report(cfg: ExperimentConfig) -> dict:
    """Every stability constant and bound for the configured (k, model, eps, h, omega)."""
    eps, h = cfg.eps, cfg.mesh.h
    params = cfg.params_at(eps, h)
    report = params.as_dict()
    report.update({
        "model": cfg.velocity_space().label,
        "eps": eps,
        "h": h,
        "ratio": params.ratio(eps, h),
        "dt_uniform": dt_uniform(params, eps, h),
        "dt_stab_optimal": dt_stab_optimal(params, eps, h) if params.theory_applies else None,
        "dt_stab_combined": dt_stab_combined(params, eps, h),
        "mu_auto": auto_mu(params, eps, h),
        "special_roots": special_roots()._asdict(),
    })
    return report
