"""
decay-preserving error bounds and convergence-order predictions.

Every bound has the two-scale form

    |e^n| <= e^{-r0 mu t_n} |e^0|
             + P C_{u,alpha} (C_odd e^{-r1 mu t_n} tau^alpha + C_even t^{alpha-k} tau^k)

with mu = -kappa for the scalar problem and mu = lambda1 - kappa on (0, L).
The competition between the exponentially weighted tau^alpha term and the
algebraic tau^k term is what makes observed orders depend on mu T.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict

import numpy as np
from scipy.special import expit

from .core_model import ModelParams, TimeGrid, regularity_constant
from .errors import HypothesisViolation, ParameterError
from .schemes.l1_subdiffusion import mittag_leffler


class BoundForm(str, Enum):
    IE_ODE = "ie-ode"
    CN_ODE = "cn-ode"
    BDF2_ODE = "bdf2-ode"
    IE_DIFFUSION = "ie-diffusion"
    CN_DIFFUSION = "cn-diffusion"
    BDF2_DIFFUSION = "bdf2-diffusion"

    @property
    def is_diffusion(self):
        return self.value.endswith("diffusion")

    @classmethod
    def for_scheme(cls, scheme, diffusion):
        return cls(f"{str(getattr(scheme, 'value', scheme)).lower()}-{'diffusion' if diffusion else 'ode'}")


@dataclass(frozen=True)
class _Shape:
    k: int
    init_rate: float
    odd_a: float
    odd_b: float
    odd_rate: float
    exp_rate: float
    even_rate: float
    previous_node: bool
    prefactor: float


_SHAPES = {
    BoundForm.IE_ODE: _Shape(1, 0.5, 2.0, 3.0, 0.25, 0.25, 0.25, True, 1.0),
    BoundForm.CN_ODE: _Shape(2, 1.0, 9.0, 12.0, 0.5, 0.5, 7.0 / 12.0, False, 1.0),
    BoundForm.BDF2_ODE: _Shape(2, 0.5, 2.0, 4.0, 0.25, 0.5, 0.5, True, 2.0),
    BoundForm.IE_DIFFUSION: _Shape(1, 0.5, 2.0, 3.0, 0.25, 0.25, 0.25, True, 1.0),
    BoundForm.CN_DIFFUSION: _Shape(2, 1.0, 9.0, 12.0, 0.5, 0.5, 7.0 / 12.0, False, 1.0),
    BoundForm.BDF2_DIFFUSION: _Shape(2, 0.5, 2.0, 4.0, 0.25, 0.5, 0.5, False, 2.0),
}


@dataclass(frozen=True)
class BoundTerms:
    form: BoundForm
    k: int
    init_term: float
    exp_term: float
    alg_term: float
    c_u_alpha: float
    prefactor: float
    threshold_time: float
    constants: Dict[str, float] = field(default_factory=dict)

    @property
    def total(self):
        return self.init_term + self.prefactor * self.c_u_alpha * (self.exp_term + self.alg_term)


def decay_rate(form: BoundForm, params: ModelParams):
    """mu of the bound: -kappa for the scalar forms, lambda1 - kappa on (0, L)"""
    return params.lambda1 - params.kappa if form.is_diffusion else -params.kappa


def check_hypothesis(form: BoundForm, params: ModelParams, grid: TimeGrid):
    """raise HypothesisViolation naming the first failed inequality"""
    tau = grid.tau
    kappa = params.kappa
    lam = params.lambda1
    if not form.is_diffusion:
        if not kappa < 0:
            raise HypothesisViolation(f"{form.value}: needs kappa < 0, got kappa = {kappa:g}")
        if form is BoundForm.BDF2_ODE:
            if not -4 * kappa * tau < 1:
                raise HypothesisViolation(f"{form.value}: needs -4 kappa tau < 1, got {-4 * kappa * tau:g}")
        elif not -kappa * tau < 1:
            raise HypothesisViolation(f"{form.value}: needs -kappa tau < 1, got {-kappa * tau:g}")
        return

    if not kappa < lam:
        raise HypothesisViolation(f"{form.value}: needs kappa < lambda1, got kappa = {kappa:g}, lambda1 = {lam:g}")
    if form is BoundForm.BDF2_DIFFUSION:
        if not tau * (4 * lam - kappa) < 1:
            raise HypothesisViolation(
                f"{form.value}: needs tau < 1/(4 lambda1 - kappa), got tau (4 lambda1 - kappa) = {tau * (4 * lam - kappa):g}")
    elif not tau * (lam - kappa) < 1:
        raise HypothesisViolation(
            f"{form.value}: needs tau < 1/(lambda1 - kappa), got tau (lambda1 - kappa) = {tau * (lam - kappa):g}")


def in_hypothesis(form, params, grid):
    try:
        check_hypothesis(form, params, grid)
    except HypothesisViolation:
        return False
    return True


def threshold_time(form: BoundForm, params: ModelParams):
    """t_n at or below which the algebraic constant vanishes"""
    shape = _SHAPES[BoundForm(form)]
    mu = decay_rate(BoundForm(form), params)
    if mu <= 0:
        return math.inf
    return -math.log(1 - 2.0 ** (params.alpha - shape.k)) / (mu * shape.even_rate)


def bound_rhs(form, params: ModelParams, grid: TimeGrid, n, e0=0.0) -> BoundTerms:
    """the bound on |e^n| with its constants"""
    form = BoundForm(form)
    check_hypothesis(form, params, grid)
    if not 1 <= n <= grid.N:
        raise ParameterError(f"n must lie in 1..{grid.N}, got {n}")

    shape = _SHAPES[form]
    alpha, k, tau = params.alpha, shape.k, grid.tau
    mu = decay_rate(form, params)
    t_n = grid.node(n)
    t_alg = grid.node(n - 1) if shape.previous_node else t_n

    c_odd = shape.odd_a / (k - alpha) + shape.odd_b * math.exp(-mu * shape.odd_rate * t_n)
    t_star = threshold_time(form, params)
    if t_n > t_star:
        c_even = (2.0 ** (k - alpha) * (1 - math.exp(-mu * shape.even_rate * t_n)) - 1) / (k - alpha)
    else:
        c_even = 0.0

    exp_term = c_odd * math.exp(-mu * shape.exp_rate * t_n) * tau ** alpha
    if c_even == 0.0:
        alg_term = 0.0
    elif t_alg == 0.0:
        alg_term = math.inf
    else:
        alg_term = c_even * t_alg ** (alpha - k) * tau ** k

    return BoundTerms(
        form=form,
        k=k,
        init_term=math.exp(-mu * shape.init_rate * t_n) * abs(e0),
        exp_term=exp_term,
        alg_term=alg_term,
        c_u_alpha=regularity_constant(alpha, params.L),
        prefactor=shape.prefactor,
        threshold_time=t_star,
        constants={"odd": c_odd, "even": c_even},
    )


def bound_history(form, params: ModelParams, grid: TimeGrid, e0=0.0):
    """total bound for n = 1..N"""
    return np.array([bound_rhs(form, params, grid, n, e0).total for n in range(1, grid.N + 1)])


def unified_estimate(params: ModelParams, N, k, C=1.0):
    """e^{-C mu T} tau^alpha + T^{alpha-k} tau^k at the final time"""
    tau = params.T / N
    mu = params.decay_rate
    return math.exp(-C * mu * params.T) * tau ** params.alpha + params.T ** (params.alpha - k) * tau ** k


def predicted_order(params: ModelParams, N, k, C=1.0):
    """
    log2 of the halving ratio of the unified estimate:
    log2(2^k / (1 + (2^{k-a} - 1) / (1 + 2^{k-a} e^{C mu T} / N^{k-a})))
    """
    if k not in (1, 2):
        raise ParameterError(f"k must be 1 or 2, got {k}")
    if N % 2:
        raise ParameterError(f"N must be even, got {N}")
    gap = k - params.alpha
    log_q = gap * math.log(2) + C * params.decay_rate * params.T - gap * math.log(N)
    return math.log2(2.0 ** k / (1 + (2.0 ** gap - 1) * expit(-log_q)))


def conjecture_rhs(params: ModelParams, grid: TimeGrid, n, fitted_C=1.0):
    """C_{u,alpha} t_n^{alpha-1} (E_alpha'(-C mu t_n^alpha) tau + tau^{2-alpha}) for the L1 scheme"""
    if params.kappa > params.lambda1:
        raise HypothesisViolation(
            f"needs kappa <= lambda1, got kappa = {params.kappa:g}, lambda1 = {params.lambda1:g}")
    if not 1 <= n <= grid.N:
        raise ParameterError(f"n must lie in 1..{grid.N}, got {n}")
    alpha, tau = params.alpha, grid.tau
    t_n = grid.node(n)
    slope = mittag_leffler(alpha, -fitted_C * params.decay_rate * t_n ** alpha).derivative
    return regularity_constant(alpha, params.L) * t_n ** (alpha - 1) * (slope * tau + tau ** (2 - alpha))


def conjecture_history(params: ModelParams, grid: TimeGrid, fitted_C=1.0):
    return np.array([conjecture_rhs(params, grid, n, fitted_C) for n in range(1, grid.N + 1)])


# inequality probes

@dataclass(frozen=True)
class LemmaReport:
    name: str
    samples: int
    violations: int
    worst_margin: float
    lower: np.ndarray
    middle: np.ndarray
    upper: np.ndarray

    @property
    def passed(self):
        return self.violations == 0


def _two_scale_sum(rho, beta, tau, n):
    """sum_{k=2}^{n-1} tau rho^{-(n-k-1)} t_k^beta and its closed-form majorant"""
    k = np.arange(2, n)
    total = float(np.sum(tau * np.power(rho, -(n - k - 1.0)) * np.power(k * tau, beta)))
    t_prev = (n - 1) * tau
    bound = -1.0 / (beta + 1) * (
        (2.0 ** (-(beta + 1)) * (1 - rho ** (-(n / 2 - 1))) - 1) * t_prev ** (beta + 1)
        + rho ** (-(n / 2 - 2)) * tau ** (beta + 1)
    )
    return total, bound


def lemma_probe(which, **params) -> LemmaReport:
    """
    check one of the auxiliary inequalities on broadcast samples.

    two-scale-sum     rho, beta, tau, n
    ie-amplification  kappa, tau, upsilon:  e^{k u t} <= (1 - k t)^{-u} <= e^{k u t / 2}
    cn-amplification  kappa, tau, upsilon:  e^{7 k u t / 6} <= psi^{-u} <= e^{k u t}
    """
    if which == "two-scale-sum":
        rho, beta, tau, n = (a.ravel() for a in np.broadcast_arrays(
            *(np.asarray(params[key], dtype=float) for key in ("rho", "beta", "tau", "n"))))
        if np.any(rho <= 1) or np.any(beta >= -1) or np.any(n < 4) or np.any(tau <= 0):
            raise HypothesisViolation("two-scale-sum needs rho > 1, beta < -1, tau > 0 and n >= 4")
        middle = np.empty(rho.size)
        upper = np.empty(rho.size)
        for i in range(rho.size):
            middle[i], upper[i] = _two_scale_sum(rho[i], beta[i], tau[i], int(n[i]))
        lower = np.zeros_like(middle)
        margin = (upper - middle) / np.abs(upper)
        violations = int(np.sum(middle > upper * (1 + 1e-12)))
        return LemmaReport(which, rho.size, violations, float(margin.min()), lower, middle, upper)

    if which not in ("ie-amplification", "cn-amplification"):
        raise ParameterError(f"unknown probe '{which}'")

    kappa, tau, upsilon = (a.ravel() for a in np.broadcast_arrays(
        *(np.asarray(params[key], dtype=float) for key in ("kappa", "tau", "upsilon"))))
    x = -kappa * tau
    if np.any(kappa >= 0) or np.any(tau <= 0) or np.any(upsilon < 0) or np.any(x > 1):
        raise HypothesisViolation(f"{which} needs kappa < 0, upsilon >= 0 and 0 < -kappa tau <= 1")

    # compare exponents; the values themselves underflow for large upsilon
    if which == "ie-amplification":
        lower_exp = -upsilon * x
        middle_exp = -upsilon * np.log1p(x)
        upper_exp = -upsilon * x / 2
    else:
        lower_exp = -7.0 * upsilon * x / 6
        middle_exp = -upsilon * 2 * np.arctanh(x / 2)
        upper_exp = -upsilon * x

    margin = np.minimum(middle_exp - lower_exp, upper_exp - middle_exp)
    violations = int(np.sum(margin < 0))
    return LemmaReport(
        which, x.size, violations, float(margin.min()),
        np.exp(lower_exp), np.exp(middle_exp), np.exp(upper_exp),
    )
