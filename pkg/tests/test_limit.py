import math

import numpy as np
import pytest

import oracles
from conftest import MATERIALS
from imexldg.errors import ConfigurationError
from imexldg.experiments import l2_error
from imexldg.limit import LimitSolver, equilibrium_g, initialize_limit, limit_step, run_limit
from imexldg.mesh_basis import build_mesh
from imexldg.operators import assemble_ldg
from imexldg.stepper import Imex1Stepper, initialize, run
from imexldg.velocity import make_velocity_space


def _solver(k=1, n=16, mat="ssin_acos", flux="right_left", model="telegraph"):
    mesh = build_mesh(0, 2 * math.pi, n)
    vs = make_velocity_space(model, 4)
    return LimitSolver(assemble_ldg(mesh, k, flux), MATERIALS[mat], vs)


@pytest.mark.parametrize("flux", ["right_left", "left_right"])
def test_step_satisfies_limit_scheme(rng, flux):
    solver = _solver(k=2, flux=flux, model="slab")
    mesh, mat = solver.matrices.mesh, solver.mat
    prev = solver.state_from_rho(rng.standard_normal(solver.matrices.shape))
    new = solver.step(prev, 0.2)
    res = oracles.limit_residuals(
        prev, new, edges=mesh.edges, flux=flux, dt=0.2, mean_v2=solver.vs.mean_v2,
        sigma_s=mat.sigma_s, sigma_a=mat.sigma_a, n_quad=6,
    )
    assert max(res.values()) < 1e-10, res
    np.testing.assert_array_equal(new.g_eq, equilibrium_g(new.u, solver.vs))


def test_constant_is_steady():
    solver = _solver(mat="ssin_a0")
    s0 = initialize_limit(lambda x: np.full_like(x, 1.7), solver)
    out = run_limit(solver, s0, 0.5, 10).final
    np.testing.assert_allclose(out.rho, s0.rho, atol=1e-13)


def test_zero_state():
    solver = _solver()
    out = run_limit(solver, initialize_limit(lambda x: 0 * x, solver), 0.1, 5)
    assert np.abs(out.final.rho).max() == 0.0
    assert out.rho_norms == [0.0] * 6


def test_norm_non_increasing(rng):
    solver = _solver()
    s0 = solver.state_from_rho(rng.standard_normal(solver.matrices.shape))
    norms = run_limit(solver, s0, 0.05, 40).rho_norms
    assert all(b <= a * (1 + 1e-12) for a, b in zip(norms, norms[1:]))


def test_tracks_exact_decay():
    solver = _solver(k=2, n=32, mat="s1_a0")
    s0 = initialize_limit(np.sin, solver)
    dt, n = 1e-3, 100
    out = run_limit(solver, s0, dt, n).final
    err = l2_error(out.rho, solver.matrices.mesh, lambda x: math.exp(-n * dt) * np.sin(x))
    assert err < 2e-4


def test_functional_step_and_errors():
    solver = _solver()
    s0 = initialize_limit(np.sin, solver)
    a = limit_step(s0, 0.1, solver.matrices, solver.mat, solver.vs)
    b = solver.step(s0, 0.1)
    np.testing.assert_allclose(a.rho, b.rho)
    with pytest.raises(ConfigurationError):
        solver.step(s0, 0.0)
    with pytest.raises(ConfigurationError):
        run_limit(solver, s0, 0.1, -1)


def test_kinetic_approaches_limit():
    mesh = build_mesh(0, 2 * math.pi, 16)
    vs = make_velocity_space("telegraph")
    mat = MATERIALS["ssin_a0"]
    m = assemble_ldg(mesh, 1)
    solver = LimitSolver(m, mat, vs)
    lim = run_limit(solver, initialize_limit(np.sin, solver), 0.05, 10).final
    errs = []
    for eps in (1e-2, 1e-4):
        s0 = initialize(np.sin, lambda x, v: -v * np.cos(x) / mat.sigma_s(x), mat, mesh, 1, vs, np.cos)
        fin = run(Imex1Stepper(m, mat, vs), s0, 0.05, eps, 1.0, 10).final
        errs.append(np.linalg.norm(fin.rho - lim.rho))
    assert errs[1] < errs[0] < 1e-2
