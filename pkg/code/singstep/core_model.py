"""
grids, model parameters and the manufactured benchmark problems.

The benchmarks have the weakly singular solutions u = 10 + t^alpha (scalar
problem) and u = t^alpha sin(pi x / L) (diffusion / subdiffusion on (0, L)),
so every time derivative blows up like t^(alpha - k) at the initial time.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.special import gamma

from .errors import ParameterError


class SchemeId(str, Enum):
    IE = "IE"
    CN = "CN"
    BDF2 = "BDF2"
    L1 = "L1"

    @property
    def order(self):
        """classical order k of the scheme (None for the L1 scheme)"""
        return {"IE": 1, "CN": 2, "BDF2": 2}.get(self.value)

    @property
    def is_fractional(self):
        return self is SchemeId.L1

    @classmethod
    def parse(cls, name):
        try:
            return cls(str(name).strip().upper())
        except ValueError:
            valid = ", ".join(s.value for s in cls)
            raise ParameterError(f"unknown scheme '{name}', expected one of {valid}") from None


@dataclass(frozen=True)
class TimeGrid:
    """uniform time mesh t_n = n * tau on [0, T]"""

    N: int
    T: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ParameterError(f"N must be an integer >= 2, got {self.N}")
        if not self.T > 0:
            raise ParameterError(f"T must be positive, got {self.T}")

    @property
    def tau(self):
        return self.T / self.N

    def node(self, n):
        if n == self.N:
            return float(self.T)
        return n * self.tau

    def half_node(self, n):
        """t_{n - 1/2}"""
        return (n - 0.5) * self.tau

    @property
    def nodes(self):
        t = np.arange(self.N + 1) * self.tau
        t[-1] = self.T
        return t

    @property
    def half_nodes(self):
        """t_{n - 1/2} for n = 1..N"""
        return (np.arange(1, self.N + 1) - 0.5) * self.tau


def min_eigenvalue(L):
    """smallest Dirichlet eigenvalue of -d^2/dx^2 on (0, L)"""
    if not L > 0:
        raise ParameterError(f"L must be positive, got {L}")
    return (math.pi / L) ** 2


def _check_alpha(alpha):
    if not 0 < alpha < 1:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")


@dataclass(frozen=True)
class ModelParams:
    """
    one experiment: singularity exponent, reaction coefficient, final time and
    an optional interval length (None means the scalar ODE)
    """

    alpha: float
    kappa: float
    T: float
    L: Optional[float] = None

    def __post_init__(self):
        _check_alpha(self.alpha)
        if not self.T > 0:
            raise ParameterError(f"T must be positive, got {self.T}")
        if self.L is not None and not self.L > 0:
            raise ParameterError(f"L must be positive, got {self.L}")

    @property
    def is_ode(self):
        return self.L is None

    @property
    def lambda1(self):
        return 0.0 if self.L is None else min_eigenvalue(self.L)

    @property
    def decay_rate(self):
        """lambda1 - kappa, positive in the decaying regime"""
        return self.lambda1 - self.kappa


def regularity_constant(alpha, L=None):
    """
    C_{u,alpha} with |d^k u/dt^k| <= C t^(alpha - k), k = 1, 2, 3.
    on (0, L) the constant also covers the L2(0, L) norm of sin(pi x / L)
    """
    _check_alpha(alpha)
    c = max(alpha, alpha * (1 - alpha), alpha * (1 - alpha) * (2 - alpha))
    if L is not None:
        c *= max(1.0, math.sqrt(L / 2))
    return c


@dataclass(frozen=True)
class ManufacturedProblem:
    """
    exact solution, forcing and initial data of a benchmark.

    scalar problems use callables of t only, interval problems callables of
    (t, x); all of them broadcast over numpy arrays.
    """

    exact: Callable
    forcing: Callable
    u0: Callable
    c_u_alpha: float
    time_derivatives: Tuple[Callable, ...] = field(default_factory=tuple)
    alpha: Optional[float] = None
    kappa: float = 0.0
    L: Optional[float] = None
    fractional: bool = False
    name: str = ""

    @property
    def is_ode(self):
        return self.L is None


def make_ode_benchmark(alpha, kappa, T):
    """u = 10 + t^alpha for u' = kappa u + f"""
    _check_alpha(alpha)
    if not T > 0:
        raise ParameterError(f"T must be positive, got {T}")

    def exact(t):
        return 10.0 + np.power(t, alpha)

    def forcing(t):
        return alpha * np.power(t, alpha - 1) - kappa * (10.0 + np.power(t, alpha))

    derivatives = (
        lambda t: alpha * np.power(t, alpha - 1),
        lambda t: alpha * (alpha - 1) * np.power(t, alpha - 2),
        lambda t: alpha * (alpha - 1) * (alpha - 2) * np.power(t, alpha - 3),
    )

    return ManufacturedProblem(
        exact=exact,
        forcing=forcing,
        u0=lambda: 10.0,
        c_u_alpha=regularity_constant(alpha),
        time_derivatives=derivatives,
        alpha=alpha,
        kappa=kappa,
        name="ode",
    )


def make_pde_benchmark(alpha, kappa, L, T, fractional=False):
    """
    u = t^alpha sin(pi x / L) for u_t = u_xx + kappa u + f (classical) or
    for the Caputo equation of order alpha (fractional)
    """
    _check_alpha(alpha)
    lam = min_eigenvalue(L)
    if not T > 0:
        raise ParameterError(f"T must be positive, got {T}")

    def mode(x):
        return np.sin(math.pi * np.asarray(x) / L)

    def exact(t, x):
        return np.power(t, alpha) * mode(x)

    if fractional:
        # Caputo derivative of t^alpha is Gamma(alpha + 1)
        g = gamma(alpha + 1)

        def forcing(t, x):
            return (g + (lam - kappa) * np.power(t, alpha)) * mode(x)
    else:
        def forcing(t, x):
            return (alpha * np.power(t, alpha - 1) + (lam - kappa) * np.power(t, alpha)) * mode(x)

    derivatives = (
        lambda t, x: alpha * np.power(t, alpha - 1) * mode(x),
        lambda t, x: alpha * (alpha - 1) * np.power(t, alpha - 2) * mode(x),
        lambda t, x: alpha * (alpha - 1) * (alpha - 2) * np.power(t, alpha - 3) * mode(x),
    )

    return ManufacturedProblem(
        exact=exact,
        forcing=forcing,
        u0=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        c_u_alpha=regularity_constant(alpha, L),
        time_derivatives=derivatives,
        alpha=alpha,
        kappa=kappa,
        L=L,
        fractional=fractional,
        name="subdiffusion" if fractional else "diffusion",
    )


def make_benchmark(params: ModelParams, fractional=False):
    """benchmark matching the domain of params"""
    if params.is_ode:
        if fractional:
            raise ParameterError("the fractional benchmark needs an interval domain")
        return make_ode_benchmark(params.alpha, params.kappa, params.T)
    return make_pde_benchmark(params.alpha, params.kappa, params.L, params.T, fractional)


def sample(func, *args):
    """evaluate func and broadcast the result to float64 of the arguments' shape"""
    arrays = [np.asarray(a, dtype=float) for a in args]
    shape = np.broadcast_shapes(*(a.shape for a in arrays))
    return np.broadcast_to(np.asarray(func(*arrays), dtype=float), shape).copy()
