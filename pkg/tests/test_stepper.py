import math

import numpy as np
import pytest

import oracles
from conftest import MATERIALS, random_state
from imexldg.errors import ConfigurationError, NumericalError
from imexldg.materials import MaterialCoefficients
from imexldg.mesh_basis import build_mesh, l2_project, mesh_from_edges
from imexldg.operators import assemble_ldg
from imexldg.stepper import (
    Imex1Stepper,
    KineticState,
    WeightFunction,
    initialize,
    resolve_omega,
    run,
    step,
    zero_state,
)
from imexldg.velocity import make_velocity_space, moment


def test_weight_variants():
    assert WeightFunction("constant_one")(3.0) == 1.0
    assert WeightFunction("exponential")(math.log(2)) == pytest.approx(0.5)
    ind = WeightFunction("indicator", alpha=0.25)
    assert ind(0.25) == 1.0 and ind(0.26) == 0.0
    assert WeightFunction("exponential").value(1.0, 2.0, 0.5) == pytest.approx(math.exp(-1.0))
    with pytest.raises(ConfigurationError):
        WeightFunction("indicator", alpha=0.0)
    with pytest.raises(ConfigurationError):
        resolve_omega(-1.0, 1.0, 1.0, 1.0)


def _setup(k=1, flux="right_left", model="telegraph", n_nodes=2, mat="ssin_acos", n=8):
    mesh = build_mesh(0, 2 * math.pi, n)
    vs = make_velocity_space(model, n_nodes)
    return mesh, vs, MATERIALS[mat], assemble_ldg(mesh, k, flux)


@pytest.mark.parametrize("flux", ["right_left", "left_right"])
@pytest.mark.parametrize("eps", [1.0, 1e-2, 1e-6])
@pytest.mark.parametrize("omega", [0.0, 0.6, WeightFunction("exponential")])
def test_step_satisfies_scheme(rng, flux, eps, omega):
    mesh, vs, mat, m = _setup(k=2, flux=flux, model="slab", n_nodes=4)
    stepper = Imex1Stepper(m, mat, vs)
    state = random_state(rng, mesh, 2, vs)
    dt = 0.07
    new = stepper.step(state, dt, eps, omega)
    res = oracles.kinetic_residuals(
        state, new, edges=mesh.edges, flux=flux, dt=dt, eps=eps, omega=stepper.omega_value(omega, eps),
        nodes=vs.nodes, weights=vs.weights, sigma_s=mat.sigma_s, sigma_a=mat.sigma_a, n_quad=6,
    )
    assert max(res.values()) < 1e-11, res
    assert np.abs(moment(vs, new.g)).max() < 1e-12
    assert new.level == 1 and new.time == pytest.approx(dt)


def test_nonuniform_mesh_step(rng):
    mesh = mesh_from_edges([0.0, 0.5, 0.7, 1.6, 2.0, 3.1])
    vs = make_velocity_space("telegraph")
    mat = MaterialCoefficients.uniform(1.5, 0.2)
    m = assemble_ldg(mesh, 1)
    state = random_state(rng, mesh, 1, vs)
    new = step(state, 0.01, 0.5, 1.0, m, mat, vs)
    res = oracles.kinetic_residuals(
        state, new, edges=mesh.edges, flux="right_left", dt=0.01, eps=0.5, omega=1.0,
        nodes=vs.nodes, weights=vs.weights, sigma_s=mat.sigma_s, sigma_a=mat.sigma_a, n_quad=4,
    )
    assert max(res.values()) < 1e-11


def test_zero_eps_rejected(rng):
    mesh, vs, mat, m = _setup()
    with pytest.raises(ConfigurationError):
        Imex1Stepper(m, mat, vs).step(zero_state(mesh, 1, vs), 0.1, 0.0, 1.0)
    with pytest.raises(ConfigurationError):
        Imex1Stepper(m, mat, vs).step(zero_state(mesh, 1, vs), -0.1, 1.0, 1.0)


def test_constant_density_is_steady():
    mesh, vs, _, m = _setup()
    mat = MATERIALS["ssin_a0"]
    state = initialize(lambda x: np.full_like(x, 2.0), lambda x, v: 0 * x, mat, mesh, 1, vs)
    out = run(Imex1Stepper(m, mat, vs), state, 0.5, 1e-3, 1.0, 10).final
    np.testing.assert_allclose(out.rho, state.rho, atol=1e-13)
    assert np.abs(out.g).max() < 1e-13


def test_mass_conserved_without_absorption(rng):
    mesh, vs, _, m = _setup(k=2)
    mat = MATERIALS["ssin_a0"]
    state = random_state(rng, mesh, 2, vs)
    # eps / (sigma_m h) is below lambda* for k = 2, so any dt is stable
    out = run(Imex1Stepper(m, mat, vs), state, 0.3, 1e-3, 1.0, 30).final
    mass = lambda s: np.sum(s.rho[:, 0] * np.sqrt(mesh.cell_widths))
    assert mass(out) == pytest.approx(mass(state), abs=1e-12)


def test_initialize_well_prepared():
    mesh, vs, mat, _ = _setup(k=1)
    s = initialize(np.sin, lambda x, v: -v * np.cos(x) / mat.sigma_s(x), mat, mesh, 1, vs, np.cos)
    np.testing.assert_allclose(s.q, l2_project(np.cos, mesh, 1).coeffs)
    assert np.abs(moment(vs, s.g)).max() < 1e-15


def test_initialize_removes_mean():
    mesh, vs, mat, _ = _setup(k=0)
    s = initialize(np.sin, lambda x, v: 1.0 + v * np.sin(x), mat, mesh, 0, vs)
    assert np.abs(moment(vs, s.g)).max() < 1e-15
    assert np.abs(s.u).max() == 0.0


def test_run_records_energy_from_step_one(rng):
    mesh, vs, mat, m = _setup()
    traj = run(Imex1Stepper(m, mat, vs), random_state(rng, mesh, 1, vs), 0.01, 1.0, 1.0, 5, mu=1.0, keep_states=True)
    assert [e.n for e in traj.energies] == [1, 2, 3, 4, 5]
    assert len(traj.states) == 6
    with pytest.raises(ConfigurationError):
        run(Imex1Stepper(m, mat, vs), traj.final, 0.01, 1.0, 1.0, 0)


def test_run_reports_nan_step(rng):
    mesh, vs, mat, m = _setup()
    stepper = Imex1Stepper(m, mat, vs)
    state = random_state(rng, mesh, 1, vs)
    calls = []

    def observer(n, prev, new):
        calls.append(n)
        if n == 3:
            new.rho[0, 0] = np.nan

    with pytest.raises(NumericalError, match="step 4"):
        run(stepper, state, 0.01, 1.0, 1.0, 10, observers=[observer])
    assert calls == [1, 2, 3]


def test_state_helpers(rng):
    mesh, vs, _, _ = _setup()
    s = random_state(rng, mesh, 1, vs)
    c = s.copy()
    c.rho[0, 0] += 1
    assert s.rho[0, 0] != c.rho[0, 0]
    both = KineticState.combine(1.0, s, -1.0, s)
    assert np.abs(both.g).max() == 0.0
    assert s.field("rho", mesh).coeffs is s.rho
    assert s.g_field(1, mesh).coeffs.shape == s.rho.shape
