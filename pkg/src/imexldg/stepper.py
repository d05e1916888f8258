"""First-order IMEX time stepping of the LDG micro-macro system.

One step, given (rho^n, g^n, u^n):

1. rho^{n+1} from the global system
   (I + dt M_a + dt w <v^2> D^T M_s^{-1} D) rho = rho^n - dt L (<v g^n> + w <v^2> u^n),
2. q^{n+1} = -D rho^{n+1} and u^{n+1} = M_s^{-1} q^{n+1},
3. g^{n+1} node by node from the cell-local systems
   (I + dt/eps^2 M_s + dt M_a) g = g^n - dt/eps b_h(g^n) + dt v/eps^2 D rho^{n+1}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .energy import EnergyRecord, EnergyRecorder
from .errors import ConfigurationError, NumericalError
from .materials import MassBlocks, MaterialCoefficients
from .mesh_basis import DGField, Mesh1D, l2_project
from .operators import LdgMatrices, apply_bhv, apply_blocks, block_diag_sparse
from .velocity import VelocitySpace, moment


class WeightVariant(str, Enum):
    CONSTANT_ONE = "constant_one"
    EXPONENTIAL = "exponential"
    INDICATOR = "indicator"


@dataclass(frozen=True)
class WeightFunction:
    """Weight ``omega(eps / (sigma_m h))`` of the added and subtracted diffusion term."""

    variant: WeightVariant = WeightVariant.CONSTANT_ONE
    alpha: float = 0.25

    def __post_init__(self):
        object.__setattr__(self, "variant", WeightVariant(self.variant))
        if self.variant is WeightVariant.INDICATOR and not self.alpha > 0:
            raise ConfigurationError("indicator weight needs a positive threshold alpha")

    def __call__(self, ratio: float) -> float:
        if self.variant is WeightVariant.CONSTANT_ONE:
            return 1.0
        if self.variant is WeightVariant.EXPONENTIAL:
            return math.exp(-ratio)
        return 1.0 if ratio <= self.alpha else 0.0

    def value(self, eps: float, sigma_m: float, h: float) -> float:
        return self(eps / (sigma_m * h))


def resolve_omega(omega, eps: float, sigma_m: float, h: float) -> float:
    if isinstance(omega, WeightFunction):
        return omega.value(eps, sigma_m, h)
    value = float(omega)
    if value < 0 or not math.isfinite(value):
        raise ConfigurationError(f"omega must be finite and nonnegative, got {omega}")
    return value


@dataclass(eq=False)
class KineticState:
    """Coefficient arrays at one time level: rho, q, u of shape (n_elems, k+1), g of shape (n_nodes, n_elems, k+1)."""

    rho: np.ndarray
    g: np.ndarray
    q: np.ndarray
    u: np.ndarray
    time: float = 0.0
    level: int = 0

    def field(self, name: str, mesh: Mesh1D) -> DGField:
        return DGField(mesh, self.rho.shape[1] - 1, getattr(self, name))

    def g_field(self, j: int, mesh: Mesh1D) -> DGField:
        return DGField(mesh, self.rho.shape[1] - 1, self.g[j])

    def copy(self) -> "KineticState":
        return KineticState(self.rho.copy(), self.g.copy(), self.q.copy(), self.u.copy(), self.time, self.level)

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in (self.rho, self.g, self.q, self.u))

    @staticmethod
    def combine(a: float, s1: "KineticState", b: float, s2: "KineticState") -> "KineticState":
        return KineticState(
            a * s1.rho + b * s2.rho, a * s1.g + b * s2.g, a * s1.q + b * s2.q, a * s1.u + b * s2.u,
            s1.time, s1.level,
        )


def zero_state(mesh: Mesh1D, k: int, vs: VelocitySpace) -> KineticState:
    shape = (mesh.n_elems, k + 1)
    return KineticState(np.zeros(shape), np.zeros((vs.n_nodes,) + shape), np.zeros(shape), np.zeros(shape))


def initialize(
    rho0: Callable,
    g0: Callable,
    mat: MaterialCoefficients,
    mesh: Mesh1D,
    k: int,
    vs: VelocitySpace,
    drho0: Callable | None = None,
) -> KineticState:
    """L2-project the initial data.

    ``g0(x, v)`` is sampled at every velocity node. ``u^0`` is the projection
    of ``drho0 / sigma_s`` and ``q^0`` the projection of ``drho0`` (``q^0`` is
    diagnostic only; the step never reads it). Without ``drho0``, u and q
    start at zero. Any velocity mean left in ``g`` is removed once.
    """
    mat.validate(mesh, k)
    rho = l2_project(rho0, mesh, k).coeffs
    g = np.stack([l2_project(lambda x, v=v: g0(x, v), mesh, k).coeffs for v in vs.nodes])
    g = g - moment(vs, g)[None]
    if drho0 is None:
        q = np.zeros_like(rho)
        u = np.zeros_like(rho)
    else:
        q = l2_project(drho0, mesh, k).coeffs
        u = l2_project(lambda x: np.asarray(drho0(x)) / mat.sigma_s(x), mesh, k).coeffs
    return KineticState(rho, g, q, u)


class ImplicitDiffusionSolver:
    """Factorized ``I + dt M_a + dt c D^T M_s^{-1} D`` shared by the kinetic and limit steppers."""

    def __init__(self, matrices: LdgMatrices, blocks: MassBlocks):
        self.matrices = matrices
        self.blocks = blocks
        self._ms_inv = block_diag_sparse(blocks.scatter_inv)
        self._ma = block_diag_sparse(blocks.absorb)
        self._stiff = (matrices.D.T @ self._ms_inv @ matrices.D).tocsc()
        self._cache: dict[tuple[float, float], Callable] = {}

    def system(self, dt: float, coef: float) -> sp.csc_matrix:
        eye = sp.identity(self.matrices.n_dof, format="csc")
        return (eye + dt * self._ma + (dt * coef) * self._stiff).tocsc()

    def solve(self, dt: float, coef: float, rhs: np.ndarray) -> np.ndarray:
        key = (float(dt), float(coef))
        solve = self._cache.get(key)
        if solve is None:
            solve = spla.factorized(self.system(dt, coef))
            if len(self._cache) > 16:
                self._cache.clear()
            self._cache[key] = solve
        out = solve(rhs)
        if not np.all(np.isfinite(out)):
            raise NumericalError("implicit rho solve produced non-finite values")
        return out

    def advance(self, dt: float, coef: float, rho: np.ndarray, source: np.ndarray | None = None) -> np.ndarray:
        """``rho^{n+1}`` from ``A rho^{n+1} = rho^n - dt L source``.

        Solved for the increment with the residual built term by term, so the
        solve's round-off scales with the change over the step rather than
        with ``rho^n`` itself (this keeps the mass drift at round-off level
        even when ``A`` is badly conditioned).
        """
        shape = rho.shape
        flat = rho.ravel()
        m = self.matrices
        su = apply_blocks(self.blocks.scatter_inv, (m.D @ flat).reshape(shape))
        resid = -dt * (self._ma @ flat) - (dt * coef) * (m.D.T @ su.ravel())
        if source is not None:
            resid -= dt * (m.L @ np.asarray(source).ravel())
        return (flat + self.solve(dt, coef, resid)).reshape(shape)

    def recover_q_u(self, rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        q = -(self.matrices.D @ rho.ravel()).reshape(rho.shape)
        u = apply_blocks(self.blocks.scatter_inv, q)
        return q, u


class Imex1Stepper:
    """IMEX1-LDG stepper bound to one mesh, degree, flux, material and velocity space."""

    def __init__(self, matrices: LdgMatrices, mat: MaterialCoefficients, vs: VelocitySpace):
        self.matrices = matrices
        self.mat = mat
        self.vs = vs
        self.blocks = mat.mass_blocks(matrices.mesh, matrices.k)
        self.diffusion = ImplicitDiffusionSolver(matrices, self.blocks)
        self._g_cache: dict[tuple[float, float], np.ndarray] = {}

    @property
    def mesh(self) -> Mesh1D:
        return self.matrices.mesh

    @property
    def k(self) -> int:
        return self.matrices.k

    def omega_value(self, omega, eps: float) -> float:
        return resolve_omega(omega, eps, self.mat.sigma_m, self.mesh.h)

    def _g_inverse(self, dt: float, eps: float) -> np.ndarray:
        key = (float(dt), float(eps))
        inv = self._g_cache.get(key)
        if inv is None:
            eye = np.eye(self.k + 1)[None]
            a = eye + (dt / eps**2) * self.blocks.scatter + dt * self.blocks.absorb
            inv = np.linalg.inv(a)
            if len(self._g_cache) > 16:
                self._g_cache.clear()
            self._g_cache[key] = inv
        return inv

    def step(self, state: KineticState, dt: float, eps: float, omega) -> KineticState:
        if not eps > 0:
            raise ConfigurationError("eps must be positive; use the limit solver for eps = 0")
        if not dt > 0:
            raise ConfigurationError("dt must be positive")
        w = self.omega_value(omega, eps)
        vs, m = self.vs, self.matrices
        shape = state.rho.shape
        mean_v2 = vs.mean_v2

        flux_arg = moment(vs, vs.nodes[:, None, None] * state.g) + w * mean_v2 * state.u
        rho = self.diffusion.advance(dt, w * mean_v2, state.rho, flux_arg)
        q, u = self.diffusion.recover_q_u(rho)

        d_rho = (m.D @ rho.ravel()).reshape(shape)
        g_rhs = (
            state.g
            - (dt / eps) * apply_bhv(state.g, vs, m)
            + (dt / eps**2) * vs.nodes[:, None, None] * d_rho[None]
        )
        g = apply_blocks(self._g_inverse(dt, eps), g_rhs)
        return KineticState(rho, g, q, u, state.time + dt, state.level + 1)


def step(
    state: KineticState,
    dt: float,
    eps: float,
    omega,
    matrices: LdgMatrices,
    mat: MaterialCoefficients,
    vs: VelocitySpace,
) -> KineticState:
    """Single step without a reusable stepper (assembles the mass blocks each call)."""
    return Imex1Stepper(matrices, mat, vs).step(state, dt, eps, omega)


Observer = Callable[[int, KineticState, KineticState], None]


@dataclass
class Trajectory:
    final: KineticState
    n_steps: int
    energies: list[EnergyRecord] = field(default_factory=list)
    states: list[KineticState] = field(default_factory=list)


def run(
    stepper: Imex1Stepper,
    state0: KineticState,
    dt: float,
    eps: float,
    omega,
    n_steps: int,
    observers: Iterable[Observer] = (),
    mu: float | None = None,
    keep_states: bool = False,
) -> Trajectory:
    """Advance ``n_steps`` steps, calling each observer as ``obs(n, previous, new)``.

    With ``mu`` given, ``E_{h,mu}^n`` is recorded for n = 1..n_steps.
    """
    if int(n_steps) != n_steps or n_steps < 1:
        raise ConfigurationError(f"n_steps must be a positive integer, got {n_steps!r}")
    observers = list(observers)
    recorder = None
    if mu is not None:
        recorder = EnergyRecorder(stepper.vs, stepper.blocks, eps, dt, stepper.omega_value(omega, eps), mu)
        observers.append(recorder)
    traj = Trajectory(final=state0, n_steps=int(n_steps))
    state = state0
    if keep_states:
        traj.states.append(state0)
    # overflow is reported below as a NumericalError naming the step
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(int(n_steps)):
            try:
                new = stepper.step(state, dt, eps, omega)
            except NumericalError as exc:
                raise NumericalError(f"step {n + 1} (t={state.time + dt:.6g}): {exc}") from None
            if not new.is_finite():
                raise NumericalError(f"non-finite values produced at step {n + 1} (t={new.time:.6g})")
            for obs in observers:
                obs(n + 1, state, new)
            if keep_states:
                traj.states.append(new)
            state = new
    traj.final = state
    if recorder is not None:
        traj.energies = recorder.records
    return traj
