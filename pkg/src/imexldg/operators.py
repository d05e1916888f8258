"""Sparse LDG operators: the alternating-flux forms d_h, l_h and upwind transport.

Global unknown ``i * (k + 1) + m`` is mode ``m`` of cell ``i``. With the
orthonormal basis, a bilinear form ``a(w, phi)`` is realized by a matrix
``A`` with ``A[test, trial]`` so that ``a(w, phi) = phi^T A w``.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .mesh_basis import (
    Mesh1D,
    check_degree,
    endpoint_values,
    gauss_rule,
    reference_basis,
    reference_basis_derivative,
)
from .velocity import VelocitySpace


class FluxPair(str, Enum):
    """Alternating flux pair for (rho, u).

    ``right_left``: rho-flux from the right (rho^+), u-flux from the left (u^-).
    ``left_right``: rho^- and u^+.
    """

    RIGHT_LEFT = "right_left"
    LEFT_RIGHT = "left_right"


def _reference_stiffness(k: int) -> np.ndarray:
    """``S[a, b] = int_{-1}^{1} psi_b psi_a' dxi`` for the reference basis."""
    xi, w = gauss_rule(k + 1)
    phi = reference_basis(k, xi)
    dphi = reference_basis_derivative(k, xi)
    return (dphi * w) @ phi.T


class _Assembler:
    """Collects dense (k+1)x(k+1) blocks into a sparse periodic matrix."""

    def __init__(self, n: int, k: int):
        self.n, self.p = n, k + 1
        self.rows, self.cols, self.vals = [], [], []
        self._local_r, self._local_c = np.meshgrid(np.arange(self.p), np.arange(self.p), indexing="ij")

    def add(self, test_cell: int, trial_cell: int, block: np.ndarray):
        self.rows.append((test_cell * self.p + self._local_r).ravel())
        self.cols.append((trial_cell * self.p + self._local_c).ravel())
        self.vals.append(np.asarray(block, dtype=float).ravel())

    def tocsr(self) -> sp.csr_matrix:
        size = self.n * self.p
        if not self.vals:
            return sp.csr_matrix((size, size))
        m = sp.coo_matrix(
            (np.concatenate(self.vals), (np.concatenate(self.rows), np.concatenate(self.cols))),
            shape=(size, size),
        )
        return m.tocsr()


def _interfaces(mesh: Mesh1D, k: int):
    """Yield (left cell, right cell, traces of left cell at its right end, traces of right cell at its left end)."""
    left_ref, right_ref = endpoint_values(k)
    scale = 1.0 / np.sqrt(mesh.cell_widths)
    for j in range(mesh.n_elems):
        jm = mesh.left_neighbor(j)
        yield jm, j, right_ref * scale[jm], left_ref * scale[j]


def assemble_dh(mesh: Mesh1D, k: int, flux: FluxPair | str) -> sp.csr_matrix:
    """Matrix of ``d_h(rho, phi) = sum_i int rho phi_x + sum rho_breve [phi]``."""
    k = check_degree(k)
    flux = FluxPair(flux)
    stiff = _reference_stiffness(k)
    asm = _Assembler(mesh.n_elems, k)
    for i in range(mesh.n_elems):
        asm.add(i, i, stiff / mesh.cell_widths[i])
    for jm, j, r_minus, l_plus in _interfaces(mesh, k):
        src, tr = (j, l_plus) if flux is FluxPair.RIGHT_LEFT else (jm, r_minus)
        asm.add(j, src, np.outer(l_plus, tr))
        asm.add(jm, src, -np.outer(r_minus, tr))
    return asm.tocsr()


def assemble_lh(mesh: Mesh1D, k: int, flux: FluxPair | str) -> sp.csr_matrix:
    """Matrix of ``l_h(u, phi) = -sum_i int u phi_x - sum u_hat [phi]``."""
    k = check_degree(k)
    flux = FluxPair(flux)
    stiff = _reference_stiffness(k)
    asm = _Assembler(mesh.n_elems, k)
    for i in range(mesh.n_elems):
        asm.add(i, i, -stiff / mesh.cell_widths[i])
    for jm, j, r_minus, l_plus in _interfaces(mesh, k):
        src, tr = (jm, r_minus) if flux is FluxPair.RIGHT_LEFT else (j, l_plus)
        asm.add(j, src, -np.outer(l_plus, tr))
        asm.add(jm, src, np.outer(r_minus, tr))
    return asm.tocsr()


def assemble_transport_parts(mesh: Mesh1D, k: int) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """Central and jump parts of the upwind transport form.

    With the flux ``v{g} - |v|/2 [g]``, the matrix of ``(D_h(g; v), psi)``
    is ``v * central + |v| * jump``.
    """
    k = check_degree(k)
    stiff = _reference_stiffness(k)
    central = _Assembler(mesh.n_elems, k)
    jump = _Assembler(mesh.n_elems, k)
    for i in range(mesh.n_elems):
        central.add(i, i, -stiff / mesh.cell_widths[i])
    for jm, j, r_minus, l_plus in _interfaces(mesh, k):
        # -{g}[psi]
        central.add(j, j, -0.5 * np.outer(l_plus, l_plus))
        central.add(j, jm, -0.5 * np.outer(l_plus, r_minus))
        central.add(jm, j, 0.5 * np.outer(r_minus, l_plus))
        central.add(jm, jm, 0.5 * np.outer(r_minus, r_minus))
        # +1/2 [g][psi]
        jump.add(j, j, 0.5 * np.outer(l_plus, l_plus))
        jump.add(j, jm, -0.5 * np.outer(l_plus, r_minus))
        jump.add(jm, j, -0.5 * np.outer(r_minus, l_plus))
        jump.add(jm, jm, 0.5 * np.outer(r_minus, r_minus))
    return central.tocsr(), jump.tocsr()


@dataclass(frozen=True, eq=False)
class LdgMatrices:
    mesh: Mesh1D
    k: int
    flux: FluxPair
    D: sp.csr_matrix
    L: sp.csr_matrix
    central: sp.csr_matrix
    jump: sp.csr_matrix

    @property
    def n_dof(self) -> int:
        return self.mesh.n_elems * (self.k + 1)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.mesh.n_elems, self.k + 1)

    def transport(self, v: float) -> sp.csr_matrix:
        return (v * self.central + abs(v) * self.jump).tocsr()


def assemble_ldg(mesh: Mesh1D, k: int, flux: FluxPair | str = FluxPair.RIGHT_LEFT) -> LdgMatrices:
    flux = FluxPair(flux)
    central, jump = assemble_transport_parts(mesh, k)
    return LdgMatrices(mesh, k, flux, assemble_dh(mesh, k, flux), assemble_lh(mesh, k, flux), central, jump)


def apply_upwind_transport(g: np.ndarray, vs: VelocitySpace, matrices: LdgMatrices) -> np.ndarray:
    """Coefficients of ``D_h(g_j; v_j)`` for each velocity node; ``g`` has shape (n_nodes, n_elems, k+1)."""
    g = np.asarray(g, dtype=float)
    if g.shape[0] != vs.n_nodes:
        raise ValueError(f"expected {vs.n_nodes} velocity components, got {g.shape[0]}")
    flat = g.reshape(vs.n_nodes, -1).T
    out = (matrices.central @ flat) * vs.nodes + (matrices.jump @ flat) * np.abs(vs.nodes)
    return out.T.reshape(g.shape)


def apply_bhv(g: np.ndarray, vs: VelocitySpace, matrices: LdgMatrices) -> np.ndarray:
    """``(I - Pi) D_h(g; v)`` per velocity node; its velocity mean vanishes."""
    t = apply_upwind_transport(g, vs, matrices)
    return t - np.tensordot(vs.weights, t, axes=1)[None]


def weighted_mass_blocks(mesh: Mesh1D, k: int, coeff: Callable, n_quad: int | None = None) -> np.ndarray:
    """Per-cell matrices ``int coeff(x) phi_a phi_b dx``, shape (n_elems, k+1, k+1).

    Uses ``2(k+1)`` Gauss points by default; ``coeff`` is sampled pointwise.
    """
    n_quad = n_quad or 2 * (k + 1)
    xi, w = gauss_rule(n_quad)
    phi = reference_basis(k, xi)
    c = np.broadcast_to(np.asarray(coeff(mesh.physical_points(xi)), dtype=float), (mesh.n_elems, n_quad))
    # h/2 * (1/h) from the two basis scalings
    return 0.5 * np.einsum("iq,aq,bq->iab", c * w[None, :], phi, phi)


def block_diag_sparse(blocks: np.ndarray) -> sp.csr_matrix:
    return sp.block_diag(list(blocks), format="csr")


def apply_blocks(blocks: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """Apply per-cell blocks to coefficient arrays of shape (..., n_elems, k+1)."""
    return np.einsum("iab,...ib->...ia", blocks, coeffs)
