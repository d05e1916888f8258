"""Discrete energies and monotonicity monitoring."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .materials import MassBlocks, MaterialCoefficients
from .mesh_basis import DGField, Mesh1D
from .operators import weighted_mass_blocks
from .velocity import VelocitySpace, moment

DEFAULT_REL_TOL = 1e-12


def s_norm_sq(coeffs: np.ndarray, scatter_blocks: np.ndarray) -> np.ndarray:
    """``(sigma_s f, f)`` for coefficient arrays of shape (..., n_elems, k+1)."""
    return np.einsum("...ia,iab,...ib->...", coeffs, scatter_blocks, coeffs)


def weighted_norm_s(f, mat: MaterialCoefficients, mesh: Mesh1D | None = None, vs: VelocitySpace | None = None) -> float:
    """``||f||_s = ||sqrt(sigma_s) f||``, or ``|||f|||_s`` when ``f`` has one field per velocity node.

    ``f`` is a :class:`DGField`, a list of them, or a coefficient array
    (then ``mesh`` is required; a 3-D array also needs ``vs``).
    """
    if isinstance(f, DGField):
        mesh, coeffs = f.mesh, f.coeffs
    elif isinstance(f, (list, tuple)) and f and isinstance(f[0], DGField):
        mesh, coeffs = f[0].mesh, np.stack([fi.coeffs for fi in f])
    else:
        coeffs = np.asarray(f, dtype=float)
        if mesh is None:
            raise ValueError("mesh is required for raw coefficient arrays")
    k = coeffs.shape[-1] - 1
    blocks = weighted_mass_blocks(mesh, k, mat.sigma_s)
    sq = s_norm_sq(coeffs, blocks)
    if coeffs.ndim == 3:
        if vs is None:
            raise ValueError("velocity space is required for per-node fields")
        sq = moment(vs, sq)
    return float(np.sqrt(sq))


@dataclass(frozen=True)
class EnergyRecord:
    """Components of ``E_{h,mu}^n``; ``g`` enters at level ``n - 1``."""

    n: int
    t: float
    rho_sq: float
    eps2_g_sq: float
    dt_u_s_sq: float
    dt_g_s_sq: float

    @property
    def E_h(self) -> float:
        return self.rho_sq + self.eps2_g_sq + self.dt_u_s_sq

    @property
    def E_h_mu(self) -> float:
        return self.E_h + self.dt_g_s_sq

    def as_row(self) -> dict:
        return {
            "n": self.n,
            "t": self.t,
            "E_h": self.E_h,
            "E_h_mu": self.E_h_mu,
            "rho_sq": self.rho_sq,
            "eps2_g_sq": self.eps2_g_sq,
            "dt_u_s_sq": self.dt_u_s_sq,
            "dt_g_s_sq": self.dt_g_s_sq,
        }


ENERGY_COLUMNS = ("n", "t", "E_h", "E_h_mu", "rho_sq", "eps2_g_sq", "dt_u_s_sq", "dt_g_s_sq")


def energy(
    g_prev: np.ndarray,
    rho: np.ndarray,
    u: np.ndarray,
    *,
    eps: float,
    dt: float,
    omega_value: float,
    mu: float,
    vs: VelocitySpace,
    blocks: MassBlocks,
    n: int = 1,
    t: float = 0.0,
) -> EnergyRecord:
    """``||rho^n||^2 + eps^2 |||g^{n-1}|||^2 + omega dt <v^2> ||u^n||_s^2 + dt (1-mu) |||g^{n-1}|||_s^2``."""
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mu must lie in [0, 1], got {mu}")
    g_prev = np.asarray(g_prev, dtype=float)
    g_sq = moment(vs, np.sum(g_prev.reshape(vs.n_nodes, -1) ** 2, axis=1))
    g_s_sq = moment(vs, s_norm_sq(g_prev, blocks.scatter))
    return EnergyRecord(
        n=n,
        t=t,
        rho_sq=float(np.sum(np.asarray(rho) ** 2)),
        eps2_g_sq=eps**2 * g_sq,
        dt_u_s_sq=omega_value * dt * vs.mean_v2 * float(s_norm_sq(np.asarray(u), blocks.scatter)),
        dt_g_s_sq=dt * (1.0 - mu) * g_s_sq,
    )


class EnergyRecorder:
    """Step observer that records ``E^{n+1}`` from (g^n, rho^{n+1}, u^{n+1})."""

    def __init__(self, vs: VelocitySpace, blocks: MassBlocks, eps: float, dt: float, omega_value: float, mu: float):
        self.vs, self.blocks = vs, blocks
        self.eps, self.dt, self.omega_value, self.mu = eps, dt, omega_value, mu
        self.records: list[EnergyRecord] = []

    def __call__(self, n: int, prev, new) -> None:
        self.records.append(
            energy(
                prev.g, new.rho, new.u,
                eps=self.eps, dt=self.dt, omega_value=self.omega_value, mu=self.mu,
                vs=self.vs, blocks=self.blocks, n=new.level, t=new.time,
            )
        )


@dataclass
class MonotoneReport:
    passed: bool
    n_checked: int
    first_violation: int | None = None
    violation_n: int | None = None
    overshoot: float = 0.0
    max_rel_increase: float = field(default=-np.inf)

    def __bool__(self) -> bool:
        return self.passed


def check_monotone(series: Sequence, rel_tol: float = DEFAULT_REL_TOL, attr: str = "E_h_mu") -> MonotoneReport:
    """Pass iff ``E[i+1] <= E[i] * (1 + rel_tol)`` for all consecutive entries.

    ``series`` holds :class:`EnergyRecord` objects (``attr`` selects the
    energy) or plain numbers. ``first_violation`` is the list index of the
    first entry that grew too much; ``overshoot`` its relative increase.
    """
    values = np.array([getattr(s, attr) if isinstance(s, EnergyRecord) else float(s) for s in series])
    levels = [s.n if isinstance(s, EnergyRecord) else i for i, s in enumerate(series)]
    report = MonotoneReport(passed=True, n_checked=max(len(values) - 1, 0))
    for i in range(1, len(values)):
        prev, cur = values[i - 1], values[i]
        rel = (cur - prev) / abs(prev) if prev != 0 else (np.inf if cur > 0 else 0.0)
        report.max_rel_increase = max(report.max_rel_increase, rel)
        if not np.isfinite(cur) or cur > prev + rel_tol * abs(prev):
            if report.passed:
                report.passed = False
                report.first_violation = i
                report.violation_n = levels[i]
                report.overshoot = float(rel)
    return report
