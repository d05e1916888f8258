"""Scattering and absorption coefficients."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import ConfigurationError
from .mesh_basis import Mesh1D, gauss_rule
from .operators import weighted_mass_blocks


def constant(c: float) -> Callable:
    return lambda x: np.full(np.shape(x), float(c))


def affine(a: float, b: float) -> Callable:
    """``a + b x``."""
    return lambda x: a + b * np.asarray(x, dtype=float)


def sinusoidal(mean: float, amplitude: float, wavenumber: float = 1.0, phase: float = 0.0, kind: str = "sin") -> Callable:
    """``mean + amplitude * sin(wavenumber x + phase)`` (or ``cos``)."""
    fn = np.sin if kind == "sin" else np.cos
    return lambda x: mean + amplitude * fn(wavenumber * np.asarray(x, dtype=float) + phase)


@dataclass(frozen=True, eq=False)
class MaterialCoefficients:
    """``sigma_M >= sigma_s(x) >= sigma_m > 0`` and ``sigma_a(x) >= 0``."""

    sigma_s: Callable
    sigma_a: Callable
    sigma_m: float
    sigma_M: float

    @classmethod
    def uniform(cls, sigma_s: float = 1.0, sigma_a: float = 0.0) -> "MaterialCoefficients":
        return cls(constant(sigma_s), constant(sigma_a), float(sigma_s), float(sigma_s))

    def validate(self, mesh: Mesh1D, k: int, rtol: float = 1e-12) -> None:
        """Check the bounds at every quadrature point the scheme uses."""
        if not self.sigma_m > 0:
            raise ConfigurationError(f"sigma_m must be positive, got {self.sigma_m}")
        if self.sigma_M < self.sigma_m:
            raise ConfigurationError("sigma_M must be >= sigma_m")
        xi, _ = gauss_rule(2 * (k + 1))
        x = mesh.physical_points(xi)
        s = np.broadcast_to(np.asarray(self.sigma_s(x), dtype=float), x.shape)
        a = np.broadcast_to(np.asarray(self.sigma_a(x), dtype=float), x.shape)
        if not (np.all(np.isfinite(s)) and np.all(np.isfinite(a))):
            raise ConfigurationError("material coefficients must be finite")
        tol = rtol * max(1.0, self.sigma_M)
        if np.min(s) < self.sigma_m - tol:
            raise ConfigurationError(f"sigma_s drops to {np.min(s):.6g} below declared sigma_m={self.sigma_m}")
        if np.max(s) > self.sigma_M + tol:
            raise ConfigurationError(f"sigma_s reaches {np.max(s):.6g} above declared sigma_M={self.sigma_M}")
        if np.min(a) < -tol:
            raise ConfigurationError(f"sigma_a must be nonnegative, min is {np.min(a):.6g}")

    def mass_blocks(self, mesh: Mesh1D, k: int) -> "MassBlocks":
        self.validate(mesh, k)
        return MassBlocks(weighted_mass_blocks(mesh, k, self.sigma_s), weighted_mass_blocks(mesh, k, self.sigma_a))


@dataclass(frozen=True, eq=False)
class MassBlocks:
    """Per-cell sigma_s- and sigma_a-weighted mass matrices."""

    scatter: np.ndarray
    absorb: np.ndarray

    @cached_property
    def scatter_inv(self) -> np.ndarray:
        return np.linalg.inv(self.scatter)
