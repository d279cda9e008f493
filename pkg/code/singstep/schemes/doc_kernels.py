"""
BDF2 convolution kernels and their discrete orthogonal convolution (DOC) inverses.

For a step n the kernels theta^{(n)}_{n-k}, k = 1..n, satisfy

    sum_{j=k}^{n} theta^{(n)}_{n-j} A^{(j)}_{j-k} = delta_{nk}

where A^{(1)}_0 = 1 - kappa tau and, for l >= 2, A^{(l)} = (3/2 - kappa tau, -2, 1/2).
"""
import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, ParameterError, SingularKernel


def bdf2_kernel(l, j, kappa_tau):
    """A^{(l)}_j"""
    if l == 1:
        return 1.0 - kappa_tau if j == 0 else 0.0
    if j == 0:
        return 1.5 - kappa_tau
    if j == 1:
        return -2.0
    if j == 2:
        return 0.5
    return 0.0


@dataclass(frozen=True)
class DocKernelSet:
    """
    theta[k - 1] holds theta^{(n)}_{n-k}, so theta[-1] is theta^{(n)}_0, the
    kernel acting on the newest step
    """

    n: int
    kappa_tau: float
    theta: np.ndarray

    def kernel(self, k):
        """theta^{(n)}_{n-k}"""
        return float(self.theta[k - 1])

    def orthogonality_residual(self):
        """max_k |sum_j theta^{(n)}_{n-j} A^{(j)}_{j-k} - delta_{nk}|"""
        worst = 0.0
        for k in range(1, self.n + 1):
            total = 0.0
            for j in range(k, min(self.n, k + 2) + 1):
                total += self.theta[j - 1] * bdf2_kernel(j, j - k, self.kappa_tau)
            worst = max(worst, abs(total - (1.0 if k == self.n else 0.0)))
        return worst


def _check_n(n):
    if int(n) != n or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n}")


def doc_closed_form(n, kappa_tau) -> DocKernelSet:
    """explicit DOC kernels, valid for 0 < -kappa tau < 1/2"""
    _check_n(n)
    if not 0 < -kappa_tau < 0.5:
        raise DomainError(f"closed form needs 0 < -kappa*tau < 1/2, got kappa*tau = {kappa_tau:g}")

    s = math.sqrt(1 + 2 * kappa_tau)
    m = n - np.arange(1, n + 1) + 1
    theta = (np.power(2 - s, -m.astype(float)) - np.power(2 + s, -m.astype(float))) / s
    # the first kernel carries the IE starting step
    theta[0] *= (3 - 2 * kappa_tau) / (2 - 2 * kappa_tau)

    return DocKernelSet(n, kappa_tau, theta)


def doc_recursive_oracle(n, kappa_tau) -> DocKernelSet:
    """DOC kernels by back substitution in the defining triangular system"""
    _check_n(n)
    if 1 - kappa_tau == 0 or (n >= 2 and 1.5 - kappa_tau == 0):
        raise SingularKernel(f"A^(l)_0 vanishes at kappa*tau = {kappa_tau:g}")

    theta = np.zeros(n)
    theta[n - 1] = 1.0 / bdf2_kernel(n, 0, kappa_tau)
    for k in range(n - 1, 0, -1):
        rest = 0.0
        for j in range(k + 1, min(n, k + 2) + 1):
            rest += theta[j - 1] * bdf2_kernel(j, j - k, kappa_tau)
        theta[k - 1] = -rest / bdf2_kernel(k, 0, kappa_tau)

    return DocKernelSet(n, kappa_tau, theta)


@dataclass(frozen=True)
class DocBoundReport:
    n: int
    kappa_tau: float
    max_ratio: float
    all_positive: bool
    in_hypothesis: bool

    @property
    def passed(self):
        return self.in_hypothesis and self.all_positive and self.max_ratio <= 2.0


def doc_bound_check(kernels: DocKernelSet) -> DocBoundReport:
    """0 < theta^{(n)}_{n-k} <= 2 (1 - kappa tau)^{-(n-k+1)} for 0 < -kappa tau < 1/4"""
    kt = kernels.kappa_tau
    m = kernels.n - np.arange(1, kernels.n + 1) + 1
    ratio = kernels.theta * np.power(1 - kt, m.astype(float))

    return DocBoundReport(
        n=kernels.n,
        kappa_tau=kt,
        max_ratio=float(ratio.max()),
        all_positive=bool(np.all(kernels.theta > 0)),
        in_hypothesis=0 < -kt < 0.25,
    )
