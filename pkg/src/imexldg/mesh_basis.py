"""Periodic 1D mesh, per-cell orthonormal Legendre basis and L2 projection.

On a cell of width ``h`` the modal basis is

    phi_m(x) = sqrt((2m + 1) / h) * P_m(xi),    xi = 2 (x - x_c) / h,

so the cell mass matrix is the identity and the L2 norm of a field is the
Euclidean norm of its coefficient array.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial import legendre

from .errors import ConfigurationError, UnsupportedDegreeError

MAX_DEGREE = 9


@dataclass(frozen=True, eq=False)
class Mesh1D:
    """Periodic partition of ``[x_left, x_right]``.

    Element ``i`` is ``[edges[i], edges[i + 1]]``; interface ``i`` is the
    left edge of element ``i`` and couples it with element ``i - 1``
    (element ``n_elems - 1`` for ``i = 0``).
    """

    x_left: float
    x_right: float
    edges: np.ndarray
    cell_widths: np.ndarray

    @property
    def n_elems(self) -> int:
        return len(self.cell_widths)

    @property
    def cell_centers(self) -> np.ndarray:
        return self.edges[:-1] + 0.5 * self.cell_widths

    @property
    def h(self) -> float:
        return float(np.max(self.cell_widths))

    @property
    def length(self) -> float:
        return self.x_right - self.x_left

    def left_neighbor(self, i: int) -> int:
        return (i - 1) % self.n_elems

    def right_neighbor(self, i: int) -> int:
        return (i + 1) % self.n_elems

    def locate(self, x) -> np.ndarray:
        """Element index of each point, after periodic wrapping."""
        x = np.asarray(x, dtype=float)
        xw = self.x_left + np.mod(x - self.x_left, self.length)
        idx = np.searchsorted(self.edges, xw, side="right") - 1
        return np.clip(idx, 0, self.n_elems - 1)

    def physical_points(self, xi: np.ndarray) -> np.ndarray:
        """Map reference points ``xi`` in [-1, 1] into every cell, shape (n_elems, len(xi))."""
        return self.cell_centers[:, None] + 0.5 * self.cell_widths[:, None] * np.asarray(xi)[None, :]


def build_mesh(x_left: float, x_right: float, n_elems: int) -> Mesh1D:
    """Uniform periodic mesh with ``n_elems`` cells."""
    if int(n_elems) != n_elems or n_elems < 1:
        raise ConfigurationError(f"n_elems must be a positive integer, got {n_elems!r}")
    if not (math.isfinite(x_left) and math.isfinite(x_right)) or x_right <= x_left:
        raise ConfigurationError(f"empty or invalid interval [{x_left}, {x_right}]")
    n = int(n_elems)
    width = (x_right - x_left) / n
    edges = x_left + width * np.arange(n + 1, dtype=float)
    edges[-1] = x_right
    return Mesh1D(float(x_left), float(x_right), edges, np.full(n, width))


def mesh_from_edges(edges) -> Mesh1D:
    """Periodic mesh with arbitrary strictly increasing ``edges``."""
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or not np.all(np.isfinite(edges)):
        raise ConfigurationError("edges must be a finite 1-D array with at least two entries")
    widths = np.diff(edges)
    if np.any(widths <= 0):
        raise ConfigurationError("edges must be strictly increasing")
    return Mesh1D(float(edges[0]), float(edges[-1]), edges.copy(), widths)


def check_degree(k: int) -> int:
    if int(k) != k or not 0 <= k <= MAX_DEGREE:
        raise UnsupportedDegreeError(f"polynomial degree must be an integer in [0, {MAX_DEGREE}], got {k!r}")
    return int(k)


def gauss_rule(n_points: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    return legendre.leggauss(n_points)


def reference_basis(k: int, xi) -> np.ndarray:
    """``sqrt(2m+1) P_m(xi)`` for m = 0..k, shape (k+1, len(xi))."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    scale = np.sqrt(2.0 * np.arange(k + 1) + 1.0)
    return scale[:, None] * legendre.legvander(xi, k).T


def reference_basis_derivative(k: int, xi) -> np.ndarray:
    """d/dxi of :func:`reference_basis`, shape (k+1, len(xi))."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    out = np.empty((k + 1, len(xi)))
    for m in range(k + 1):
        c = np.zeros(m + 1)
        c[m] = math.sqrt(2 * m + 1)
        out[m] = legendre.legval(xi, legendre.legder(c)) if m > 0 else 0.0
    return out


def endpoint_values(k: int) -> tuple[np.ndarray, np.ndarray]:
    """Reference basis values at xi = -1 and xi = +1."""
    m = np.arange(k + 1)
    s = np.sqrt(2.0 * m + 1.0)
    return s * (-1.0) ** m, s


def _evaluate_function(f: Callable, x: np.ndarray) -> np.ndarray:
    return np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)


@dataclass(eq=False)
class DGField:
    """Piecewise polynomial of degree ``k`` stored as modal coefficients, shape (n_elems, k+1)."""

    mesh: Mesh1D
    k: int
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        expected = (self.mesh.n_elems, self.k + 1)
        if self.coeffs.shape != expected:
            raise ValueError(f"coefficient array has shape {self.coeffs.shape}, expected {expected}")

    @classmethod
    def zeros(cls, mesh: Mesh1D, k: int) -> "DGField":
        return cls(mesh, k, np.zeros((mesh.n_elems, k + 1)))

    def cell_values(self, xi) -> np.ndarray:
        """Values at reference points ``xi`` in every cell, shape (n_elems, len(xi))."""
        phi = reference_basis(self.k, xi)
        return (self.coeffs @ phi) / np.sqrt(self.mesh.cell_widths)[:, None]

    def evaluate(self, x) -> np.ndarray:
        """Point values; points on an interface take the value from the cell to their right."""
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        cells = self.mesh.locate(flat)
        xw = self.mesh.x_left + np.mod(flat - self.mesh.x_left, self.mesh.length)
        xi = 2.0 * (xw - self.mesh.cell_centers[cells]) / self.mesh.cell_widths[cells]
        phi = reference_basis(self.k, np.clip(xi, -1.0, 1.0))
        vals = np.einsum("pm,mp->p", self.coeffs[cells], phi) / np.sqrt(self.mesh.cell_widths[cells])
        return vals.reshape(x.shape)

    def traces(self) -> tuple[np.ndarray, np.ndarray]:
        """One-sided traces (minus, plus) at interface ``i`` (left edge of cell ``i``)."""
        left, right = endpoint_values(self.k)
        scale = 1.0 / np.sqrt(self.mesh.cell_widths)
        at_left = (self.coeffs @ left) * scale
        at_right = (self.coeffs @ right) * scale
        return np.roll(at_right, 1), at_left

    def jumps(self) -> np.ndarray:
        minus, plus = self.traces()
        return plus - minus

    def averages(self) -> np.ndarray:
        minus, plus = self.traces()
        return 0.5 * (plus + minus)

    def l2_norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def quadrature_l2_norm(self, n_points: int | None = None) -> float:
        xi, w = gauss_rule(n_points or self.k + 1)
        vals = self.cell_values(xi)
        return float(np.sqrt(np.sum(0.5 * self.mesh.cell_widths[:, None] * w[None, :] * vals**2)))

    def __add__(self, other: "DGField") -> "DGField":
        return DGField(self.mesh, self.k, self.coeffs + other.coeffs)

    def __sub__(self, other: "DGField") -> "DGField":
        return DGField(self.mesh, self.k, self.coeffs - other.coeffs)

    def __mul__(self, scalar: float) -> "DGField":
        return DGField(self.mesh, self.k, scalar * self.coeffs)

    __rmul__ = __mul__


def default_projection_points(k: int) -> int:
    return 2 * k + 3


def l2_project(f: Callable, mesh: Mesh1D, k: int, n_quad: int | None = None) -> DGField:
    """L2 projection of a vectorized scalar function onto the degree-``k`` DG space."""
    k = check_degree(k)
    n_quad = n_quad or default_projection_points(k)
    if n_quad < k + 1:
        raise ConfigurationError("projection quadrature must use at least k+1 points")
    xi, w = gauss_rule(n_quad)
    vals = _evaluate_function(f, mesh.physical_points(xi))
    phi = reference_basis(k, xi)
    # (f, phi_m) = h/2 * sum_q w_q f(x_q) sqrt(2m+1) P_m(xi_q) / sqrt(h)
    coeffs = 0.5 * np.sqrt(mesh.cell_widths)[:, None] * ((vals * w[None, :]) @ phi.T)
    return DGField(mesh, k, coeffs)


@dataclass(frozen=True)
class InverseConstants:
    """Trace and derivative inverse-inequality constants for degree ``k``."""

    k: int
    c_inv: float
    c_inv_hat: float
    kappa: float


def inverse_constants(k: int, v_inf: float = 1.0, v2_inf: float = 1.0) -> InverseConstants:
    """``C_inv = (k+1)^2``, ``C^_inv = 12 k^4`` and ``kappa = 8 C_inv^2 |v|^2 / (C^_inv |v^2|)``.

    ``kappa`` is infinite at ``k = 0``.
    """
    k = check_degree(k)
    c_inv = float((k + 1) ** 2)
    c_inv_hat = 12.0 * k**4
    kappa = math.inf if k == 0 else 8.0 * (c_inv * v_inf) ** 2 / (c_inv_hat * v2_inf)
    return InverseConstants(k, c_inv, c_inv_hat, kappa)
