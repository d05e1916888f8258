"""Velocity measures with unit mass: the telegraph model and discrete-ordinates slab geometry."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.polynomial import legendre

from .errors import ConfigurationError


class VelocityKind(str, Enum):
    TELEGRAPH = "telegraph"
    SLAB = "slab"


@dataclass(frozen=True, eq=False)
class VelocitySpace:
    """Nodes ``v_j`` and weights ``w_j`` realizing <f> = sum_j w_j f(v_j).

    ``mean_v2`` and ``mean_abs_v`` are the quadrature moments used by the
    solver. ``theory_mean_v2`` and ``theory_mean_abs_v`` are the moments of the
    continuous model, used by the stability formulas.
    """

    kind: VelocityKind
    nodes: np.ndarray
    weights: np.ndarray
    v_inf: float
    v2_inf: float
    mean_v2: float
    mean_abs_v: float

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def theory_mean_v2(self) -> float:
        return 1.0 if self.kind is VelocityKind.TELEGRAPH else 1.0 / 3.0

    @property
    def theory_mean_abs_v(self) -> float:
        return 1.0 if self.kind is VelocityKind.TELEGRAPH else 0.5

    @property
    def label(self) -> str:
        if self.kind is VelocityKind.TELEGRAPH:
            return "telegraph"
        return f"slab({self.n_nodes})"


def make_velocity_space(kind: str | VelocityKind, n_nodes: int = 2) -> VelocitySpace:
    kind = VelocityKind(kind)
    if kind is VelocityKind.TELEGRAPH:
        nodes = np.array([-1.0, 1.0])
        weights = np.array([0.5, 0.5])
    else:
        if int(n_nodes) != n_nodes or n_nodes < 2 or n_nodes % 2:
            raise ConfigurationError(f"slab geometry needs an even number of nodes >= 2, got {n_nodes!r}")
        x, w = legendre.leggauss(int(n_nodes))
        # mirror the positive half so the rule is exactly symmetric
        half = int(n_nodes) // 2
        pos, wpos = x[half:], w[half:]
        nodes = np.concatenate([-pos[::-1], pos])
        weights = 0.5 * np.concatenate([wpos[::-1], wpos])
    return VelocitySpace(
        kind=kind,
        nodes=nodes,
        weights=weights,
        v_inf=float(np.max(np.abs(nodes))) if kind is VelocityKind.TELEGRAPH else 1.0,
        v2_inf=float(np.max(nodes**2)) if kind is VelocityKind.TELEGRAPH else 1.0,
        mean_v2=float(weights @ nodes**2),
        mean_abs_v=float(weights @ np.abs(nodes)),
    )


def moment(vs: VelocitySpace, values) -> np.ndarray | float:
    """Weighted sum over the leading (velocity) axis."""
    values = np.asarray(values, dtype=float)
    if values.ndim == 0 or values.shape[0] != vs.n_nodes:
        raise ValueError(f"expected one value per velocity node ({vs.n_nodes}), got shape {values.shape}")
    out = np.tensordot(vs.weights, values, axes=1)
    return float(out) if np.ndim(out) == 0 else out
