"""
L1 scheme for the Caputo subdiffusion equation

    D_t^alpha u = u_xx + kappa u + f  on (0, L),  u = 0 on the boundary,

and the Mittag-Leffler function E_alpha with its derivative.
"""
import math
import warnings
from dataclasses import dataclass

import mpmath as mp
import numpy as np
import scipy.sparse as sp
from scipy.special import gamma, gammaln, rgamma

from ..core_model import ManufacturedProblem, SchemeId, TimeGrid, sample
from ..errors import AccuracyWarning, DomainError, ParameterError, StepSizeViolation
from .pde_solver import FieldTrace, SpaceGrid, _Recorder, assemble_operator, factorize


@dataclass(frozen=True)
class L1Weights:
    alpha: float
    tau: float
    A: np.ndarray

    @property
    def prefactor(self):
        """tau^{-alpha} / Gamma(2 - alpha)"""
        return self.tau ** (-self.alpha) / gamma(2 - self.alpha)


def l1_weights(alpha, N, tau) -> L1Weights:
    """A_i = (i+1)^{1-alpha} - i^{1-alpha} for i = 0..N-1"""
    if not 0 < alpha < 1:
        raise ParameterError(f"alpha must lie in (0, 1), got {alpha}")
    i = np.arange(1, N, dtype=float)
    # i^{1-a} ((1 + 1/i)^{1-a} - 1) without cancellation
    tail = np.power(i, 1 - alpha) * np.expm1((1 - alpha) * np.log1p(1.0 / i))
    return L1Weights(alpha, tau, np.concatenate(([1.0], tail)))


def l1_caputo_apply(history, weights: L1Weights):
    """
    L1 approximation of the Caputo derivative at t_n from U^0..U^n.
    history may hold scalars or spatial vectors along axis 0
    """
    history = np.asarray(history, dtype=float)
    n = history.shape[0] - 1
    if n < 1:
        raise ParameterError("the L1 formula needs at least U^0 and U^1")
    diffs = np.diff(history, axis=0)
    # A_{n-j} for j = 1..n
    coeffs = weights.A[:n][::-1]
    return weights.prefactor * np.tensordot(coeffs, diffs, axes=(0, 0))


def solve_l1(
        problem: ManufacturedProblem,
        space: SpaceGrid,
        time: TimeGrid,
        kappa=None,
        keep_history=True,
) -> FieldTrace:
    """
    (I - tau^a Gamma(2-a) (Delta_h + kappa I)) U^n
        = U^{n-1} - sum_{j=1}^{n-1} A_{n-j} (U^j - U^{j-1}) + tau^a Gamma(2-a) f^n
    """
    if problem.alpha is None or not problem.fractional:
        raise ParameterError("the L1 scheme needs a fractional benchmark problem")
    alpha = problem.alpha
    kappa = problem.kappa if kappa is None else kappa
    tau = time.tau

    scale = tau ** alpha * gamma(2 - alpha)
    if (kappa - space.discrete_lambda1) * scale >= 1:
        raise StepSizeViolation(
            f"L1 step matrix is singular or indefinite: (kappa - lambda1_h) tau^alpha Gamma(2-alpha) = "
            f"{(kappa - space.discrete_lambda1) * scale:g} >= 1"
        )

    weights = l1_weights(alpha, time.N, tau)
    x = space.nodes
    solve = factorize(sp.identity(space.M - 1, format="csc") - scale * assemble_operator(space, kappa))

    values = sample(problem.u0, x)
    recorder = _Recorder(values, time.N, keep_history)
    diffs = np.empty((time.N, space.M - 1))

    for n in range(1, time.N + 1):
        rhs = values + scale * sample(problem.forcing, time.node(n), x)
        if n > 1:
            # A_{n-j} for j = 1..n-1
            rhs -= weights.A[1:n][::-1] @ diffs[:n - 1]
        new = solve(rhs)
        diffs[n - 1] = new - values
        values = new
        recorder.store(n, values)

    return recorder.trace(space, time, SchemeId.L1)


# Mittag-Leffler function

SERIES_RADIUS = 40.0
MAX_EXPONENT = 700.0
TARGET = 1e-10


@dataclass(frozen=True)
class MittagLefflerEval:
    alpha: float
    z: float
    value: float
    derivative: float
    method: str
    error_estimate: float  # relative for the series, absolute for the asymptotic expansion


def _series(alpha, z, r):
    """defining series summed in extended precision"""
    guard = int(math.ceil(r / math.log(10))) + 20
    with mp.workdps(guard):
        za = mp.mpf(z)
        a = mp.mpf(alpha)
        value = mp.mpf(0)
        deriv = mp.mpf(0)
        tol = mp.mpf(10) ** (-20)
        j = 0
        while True:
            term = za ** j * mp.rgamma(j * a + 1)
            value += term
            if j >= 1:
                deriv += j * za ** (j - 1) * mp.rgamma(j * a + 1)
            # stop once past the largest term and below tolerance
            if j * alpha > r + 1 and abs(term) <= tol * max(abs(value), mp.mpf(10) ** (-300)):
                break
            j += 1
            if j > 100000:
                break
        return float(value), float(deriv), float(abs(term) / max(abs(value), mp.mpf(10) ** (-300)))


def _asymptotic(alpha, z):
    """-sum_k z^{-k} / Gamma(1 - k alpha), truncated at the smallest term"""
    value = 0.0
    deriv = 0.0
    log_abs_z = math.log(abs(z))
    previous = math.inf
    envelope = math.inf
    for k in range(1, 2000):
        # |1/Gamma(1 - x)| <= Gamma(x) / pi
        envelope = math.exp(-k * log_abs_z + gammaln(k * alpha) - math.log(math.pi))
        if envelope > previous:
            break
        value -= z ** (-k) * rgamma(1 - k * alpha)
        deriv += k * z ** (-k - 1) * rgamma(1 - k * alpha)
        previous = envelope
        if envelope <= 1e-17 * max(abs(value), 1e-300):
            break
    return value, deriv, min(envelope, previous)


def mittag_leffler(alpha, z) -> MittagLefflerEval:
    """E_alpha(z) and dE_alpha/dz for real z <= 10"""
    if not 0 < alpha <= 1:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    if z > 10:
        raise DomainError(f"z must be <= 10, got {z}")

    r = abs(z) ** (1.0 / alpha)
    if z > 0 and r > MAX_EXPONENT:
        raise DomainError(f"E_{alpha:g}({z:g}) overflows double precision")

    if z >= 0 or r <= SERIES_RADIUS:
        value, deriv, err = _series(alpha, z, r)
        method = "series"
    else:
        value, deriv, err = _asymptotic(alpha, z)
        method = "asymptotic"

    if err > TARGET:
        warnings.warn(
            f"E_{alpha:g}({z:g}) accuracy estimate {err:.1e} misses the {TARGET:g} target",
            AccuracyWarning,
        )

    return MittagLefflerEval(alpha, float(z), value, deriv, method, err)
