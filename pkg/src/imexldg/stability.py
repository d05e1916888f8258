"""Analytic time step bounds and mu-stability thresholds.

All bounds are extended reals: ``math.inf`` means unconditional stability.
Thresholds are compared with ``<=`` (a ratio sitting exactly on the threshold
is unconditionally stable). The velocity moments used here are those of the
continuous model (telegraph: <v^2> = <|v|> = 1; slab: <v^2> = 1/3, <|v|> = 1/2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from scipy.optimize import bisect

from .errors import DomainError, TheoryInapplicableError
from .mesh_basis import InverseConstants, inverse_constants
from .velocity import VelocitySpace

INF = math.inf


@dataclass(frozen=True)
class StabilityParams:
    """Constants entering the stability bounds for one (k, omega, velocity model, sigma_m).

    ``lambda_star``, ``mu_star`` and ``lambda_hat_star`` are ``None`` when
    ``omega <= 1/2``. At ``k = 0`` they hold the ``mu = 1/(2 omega)`` values of
    the single threshold ``lambda_0`` and ``lambda_hat_star`` is ``None``.
    """

    k: int
    omega_value: float
    inv: InverseConstants
    v_inf: float
    v2_inf: float
    mean_v2: float
    mean_abs_v: float
    sigma_m: float
    alpha1: float
    alpha2: float
    alpha3: float
    lambda_star: float | None
    mu_star: float | None
    lambda_hat_star: float | None

    @property
    def theory_applies(self) -> bool:
        return self.omega_value > 0.5

    @property
    def mu_min(self) -> float:
        return 1.0 / (2.0 * self.omega_value) if self.omega_value > 0 else INF

    @property
    def cv(self) -> float:
        return self.inv.c_inv * self.v_inf

    @property
    def chv2(self) -> float:
        return self.inv.c_inv_hat * self.v2_inf

    def ratio(self, eps: float, h: float) -> float:
        return eps / (self.sigma_m * h)

    def mu_S(self, lam: float) -> float:
        """Line through (lambda*, mu*) along which tau_1 = tau_2 (k >= 1)."""
        self._need_high_order()
        return self.mu_min + 0.5 * lam * self.chv2 / self.cv

    def lambda_S(self, mu: float) -> float:
        self._need_high_order()
        return 2.0 * (mu - self.mu_min) * self.cv / self.chv2

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "omega": self.omega_value,
            "C_inv": self.inv.c_inv,
            "C_inv_hat": self.inv.c_inv_hat,
            "kappa": self.inv.kappa,
            "v_inf": self.v_inf,
            "v2_inf": self.v2_inf,
            "mean_v2": self.mean_v2,
            "mean_abs_v": self.mean_abs_v,
            "sigma_m": self.sigma_m,
            "alpha1": self.alpha1,
            "alpha2": self.alpha2,
            "alpha3": self.alpha3,
            "lambda_star": self.lambda_star,
            "mu_star": self.mu_star,
            "lambda_hat_star": self.lambda_hat_star,
        }

    def _need_high_order(self):
        if self.k == 0:
            raise DomainError("mu_S and lambda_S are defined for k >= 1 only")
        if not self.theory_applies:
            raise TheoryInapplicableError(f"omega = {self.omega_value} <= 1/2")


def stability_params(
    k: int,
    omega_value: float,
    vs: VelocitySpace | None = None,
    sigma_m: float = 1.0,
    *,
    v_inf: float | None = None,
    v2_inf: float | None = None,
    mean_v2: float | None = None,
    mean_abs_v: float | None = None,
) -> StabilityParams:
    """Build the constants; moments default to the continuous model of ``vs`` (telegraph if ``vs`` is None)."""
    if vs is not None:
        v_inf = vs.v_inf if v_inf is None else v_inf
        v2_inf = vs.v2_inf if v2_inf is None else v2_inf
        mean_v2 = vs.theory_mean_v2 if mean_v2 is None else mean_v2
        mean_abs_v = vs.theory_mean_abs_v if mean_abs_v is None else mean_abs_v
    v_inf = 1.0 if v_inf is None else float(v_inf)
    v2_inf = 1.0 if v2_inf is None else float(v2_inf)
    mean_v2 = 1.0 if mean_v2 is None else float(mean_v2)
    mean_abs_v = 1.0 if mean_abs_v is None else float(mean_abs_v)
    if not sigma_m > 0:
        raise DomainError("sigma_m must be positive")
    omega_value = float(omega_value)
    if omega_value < 0:
        raise DomainError("omega must be nonnegative")

    inv = inverse_constants(k, v_inf, v2_inf)
    c, ch = inv.c_inv, inv.c_inv_hat
    alpha1 = (v_inf**2 + mean_v2) * ch
    alpha2 = 2.0 * (v_inf + mean_abs_v) * c
    alpha3 = 2.0 * v_inf * c

    lambda_star = mu_star = lambda_hat_star = None
    if omega_value > 0.5:
        defect = 1.0 - 1.0 / (2.0 * omega_value)
        cv, chv2 = c * v_inf, ch * v2_inf
        if k == 0:
            lambda_star = defect / (2.0 * cv)
            mu_star = 1.0 / (2.0 * omega_value)
        else:
            lambda_star = 2.0 * defect * cv / (chv2 + 8.0 * cv**2)
            mu_star = (1.0 + inv.kappa / (2.0 * omega_value)) / (1.0 + inv.kappa)
            lambda_hat_star = 2.0 * defect * cv / chv2

    return StabilityParams(
        k=inv.k, omega_value=omega_value, inv=inv, v_inf=v_inf, v2_inf=v2_inf,
        mean_v2=mean_v2, mean_abs_v=mean_abs_v, sigma_m=float(sigma_m),
        alpha1=alpha1, alpha2=alpha2, alpha3=alpha3,
        lambda_star=lambda_star, mu_star=mu_star, lambda_hat_star=lambda_hat_star,
    )


def dt_uniform(params: StabilityParams, eps: float, h: float) -> float:
    """Time step bound that holds for every omega (finite for all eps, h)."""
    if eps < 0 or not h > 0:
        raise DomainError("need eps >= 0 and h > 0")
    p, s = params, params.sigma_m
    if p.k == 0:
        return 2.0 * h / (p.alpha2 * p.alpha3) * (s * h + p.alpha3 * eps)
    return h / (p.alpha1 + p.alpha2 * p.alpha3) * (s * h + min(eps, p.alpha2 * h / p.alpha1) * p.alpha3)


def _check_mu(params: StabilityParams, mu: float) -> None:
    if not params.theory_applies:
        raise TheoryInapplicableError(f"mu-stability theory needs omega > 1/2, got {params.omega_value}")
    lo = params.mu_min
    ok = (lo <= mu <= 1.0) if params.k == 0 else (lo < mu <= 1.0)
    if not ok:
        bracket = "[" if params.k == 0 else "("
        raise DomainError(f"mu = {mu} outside {bracket}{lo:.6g}, 1] for k = {params.k}")


class KZeroThreshold(NamedTuple):
    lambda0: float


class HighOrderThresholds(NamedTuple):
    lambda1: float
    lambda2: float


def mu_thresholds(params: StabilityParams, mu: float):
    """``lambda_0(mu)`` at k = 0, ``(lambda_1(mu), lambda_2(mu))`` at k >= 1."""
    _check_mu(params, mu)
    cv, chv2 = params.cv, params.chv2
    if params.k == 0:
        return KZeroThreshold((1.0 - mu) / (2.0 * cv))
    lam1 = math.sqrt(max((1.0 - mu) * (mu - params.mu_min), 0.0) / (2.0 * chv2))
    lam2 = (1.0 - mu) / (4.0 * cv)
    return HighOrderThresholds(lam1, lam2)


def tau_bounds(params: StabilityParams, mu: float, eps: float, h: float) -> tuple[float, ...]:
    """``(tau_0,)`` at k = 0 or ``(tau_1, tau_2)`` at k >= 1, each possibly infinite."""
    th = mu_thresholds(params, mu)
    s, cv, chv2 = params.sigma_m, params.cv, params.chv2
    ratio = params.ratio(eps, h)
    if params.k == 0:
        if ratio <= th.lambda0:
            return (INF,)
        return (2.0 * eps**2 * h / (2.0 * cv * eps - (1.0 - mu) * s * h),)
    d = mu - params.mu_min
    if ratio <= th.lambda1:
        tau1 = INF
    else:
        tau1 = 2.0 * eps**2 * d * h**2 * s / (2.0 * eps**2 * chv2 - (1.0 - mu) * d * s**2 * h**2)
    if ratio <= th.lambda2:
        tau2 = INF
    else:
        tau2 = 2.0 * eps**2 * h / (4.0 * cv * eps - (1.0 - mu) * s * h)
    return (tau1, tau2)


def mu_step_bounds(params: StabilityParams, mu: float, eps: float, h: float) -> float:
    """Largest step for which ``E_{h,mu}`` is proven non-increasing."""
    return min(tau_bounds(params, mu, eps, h))


def dt_stab_optimal(params: StabilityParams, eps: float, h: float) -> float:
    """Supremum over admissible mu of :func:`mu_step_bounds`."""
    if not params.theory_applies:
        raise TheoryInapplicableError(f"optimized bound needs omega > 1/2, got {params.omega_value}")
    s, cv, chv2 = params.sigma_m, params.cv, params.chv2
    defect = 1.0 - params.mu_min
    ratio = params.ratio(eps, h)
    if params.k == 0:
        if ratio <= defect / (2.0 * params.v_inf):
            return INF
        return 2.0 * eps**2 * h / (2.0 * params.v_inf * eps - defect * s * h)
    if ratio <= params.lambda_star:
        return INF
    if ratio <= params.lambda_hat_star:
        return 4.0 * cv * eps**2 * h / ((8.0 * cv**2 + chv2) * eps - 2.0 * cv * defect * s * h)
    return defect * s * h**2 / chv2


def dt_stab_combined(params: StabilityParams, eps: float, h: float) -> float:
    """``max(dt_uniform, [omega > 1/2] dt_stab_optimal)``."""
    base = dt_uniform(params, eps, h)
    if not params.theory_applies:
        return base
    return max(base, dt_stab_optimal(params, eps, h))


class Region(str, Enum):
    UNCONDITIONAL = "unconditional"
    CONDITIONAL_OK = "conditional_ok"
    OUTSIDE_PROVEN = "outside_proven"


def classify_region(params: StabilityParams, eps: float, h: float, dt: float) -> Region:
    """Where ``dt`` sits relative to the proven bound (outside does not mean unstable)."""
    bound = dt_stab_combined(params, eps, h)
    if math.isinf(bound):
        return Region.UNCONDITIONAL
    return Region.CONDITIONAL_OK if dt <= bound else Region.OUTSIDE_PROVEN


def auto_mu(params: StabilityParams, eps: float, h: float) -> float:
    """The mu that realizes the optimized bound (1 when the theory does not apply)."""
    if not params.theory_applies:
        return 1.0
    if params.k == 0:
        return params.mu_min
    ratio = params.ratio(eps, h)
    if ratio <= params.lambda_star:
        return params.mu_star
    return min(params.mu_S(ratio), 1.0)


class SpecialRoots(NamedTuple):
    r_star: float
    r_dagger: float
    r_circle: float


def special_roots(xtol: float = 1e-14) -> SpecialRoots:
    """Switching ratios for the weight ``omega = exp(-eps/(sigma_m h))`` at k = 0.

    ``r_star`` is where omega crosses 1/2, ``r_dagger`` solves ``x = (2 - e^x)/4``
    and ``r_circle`` solves ``(2x + 1)/3 = 2x^2/(2x - 1 + e^x/2)``.
    """
    r_dagger = bisect(lambda x: x - (2.0 - math.exp(x)) / 4.0, 0.1, 0.3, xtol=xtol)
    r_circle = bisect(
        lambda x: (2.0 * x + 1.0) / 3.0 - 2.0 * x**2 / (2.0 * x - 1.0 + math.exp(x) / 2.0),
        0.3, 0.5, xtol=xtol,
    )
    return SpecialRoots(math.log(2.0), r_dagger, r_circle)


remark36_roots = special_roots
