"""Backward Euler LDG scheme for the diffusion limit ``rho_t = <v^2> (rho_x / sigma_s)_x - sigma_a rho``."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .errors import ConfigurationError, NumericalError
from .materials import MaterialCoefficients
from .mesh_basis import DGField, Mesh1D, l2_project
from .operators import LdgMatrices
from .stepper import ImplicitDiffusionSolver
from .velocity import VelocitySpace


@dataclass(eq=False)
class LimitState:
    rho: np.ndarray
    q: np.ndarray
    u: np.ndarray
    g_eq: np.ndarray
    time: float = 0.0
    level: int = 0

    def field(self, name: str, mesh: Mesh1D) -> DGField:
        return DGField(mesh, self.rho.shape[1] - 1, getattr(self, name))


def equilibrium_g(u: np.ndarray, vs: VelocitySpace) -> np.ndarray:
    """``g(., v_j) = -v_j u``."""
    return -vs.nodes[:, None, None] * np.asarray(u)[None]


class LimitSolver:
    """Implicit diffusion stepper sharing the kinetic scheme's ``d_h``/``l_h`` (omega fixed to 1)."""

    def __init__(self, matrices: LdgMatrices, mat: MaterialCoefficients, vs: VelocitySpace):
        self.matrices = matrices
        self.mat = mat
        self.vs = vs
        self.blocks = mat.mass_blocks(matrices.mesh, matrices.k)
        self.diffusion = ImplicitDiffusionSolver(matrices, self.blocks)

    def state_from_rho(self, rho: np.ndarray, time: float = 0.0, level: int = 0) -> LimitState:
        q, u = self.diffusion.recover_q_u(rho)
        return LimitState(np.asarray(rho, dtype=float), q, u, equilibrium_g(u, self.vs), time, level)

    def step(self, state: LimitState, dt: float) -> LimitState:
        if not dt > 0:
            raise ConfigurationError("dt must be positive")
        rho = self.diffusion.advance(dt, self.vs.mean_v2, state.rho)
        return self.state_from_rho(rho, state.time + dt, state.level + 1)


def limit_step(
    state: LimitState, dt: float, matrices: LdgMatrices, mat: MaterialCoefficients, vs: VelocitySpace
) -> LimitState:
    return LimitSolver(matrices, mat, vs).step(state, dt)


def initialize_limit(rho0: Callable, solver: LimitSolver) -> LimitState:
    """Project ``rho0``; q, u and g_eq follow from the projected density."""
    m = solver.matrices
    return solver.state_from_rho(l2_project(rho0, m.mesh, m.k).coeffs)


@dataclass
class LimitTrajectory:
    final: LimitState
    n_steps: int
    rho_norms: list[float] = field(default_factory=list)


def run_limit(
    solver: LimitSolver,
    state0: LimitState,
    dt: float,
    n_steps: int,
    observers: Iterable[Callable] = (),
) -> LimitTrajectory:
    """Advance ``n_steps`` steps; ``rho_norms`` holds ``||rho^n||`` for n = 0..n_steps."""
    if int(n_steps) != n_steps or n_steps < 0:
        raise ConfigurationError(f"n_steps must be a nonnegative integer, got {n_steps!r}")
    observers = list(observers)
    state = state0
    traj = LimitTrajectory(final=state0, n_steps=int(n_steps), rho_norms=[float(np.linalg.norm(state0.rho))])
    for n in range(int(n_steps)):
        new = solver.step(state, dt)
        if not np.all(np.isfinite(new.rho)):
            raise NumericalError(f"non-finite values produced at step {n + 1}")
        for obs in observers:
            obs(n + 1, state, new)
        traj.rho_norms.append(float(np.linalg.norm(new.rho)))
        state = new
    traj.final = state
    return traj
