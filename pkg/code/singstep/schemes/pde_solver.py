"""
fully discrete solvers for u_t = u_xx + kappa u + f on (0, L) with homogeneous
Dirichlet boundaries: 3-point finite differences in space, IE / CN / BDF2 in time
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from ..core_model import ManufacturedProblem, SchemeId, TimeGrid, min_eigenvalue, sample
from ..errors import LinearSolveFailure, ParameterError, StepSizeViolation


@dataclass(frozen=True)
class SpaceGrid:
    M: int
    L: float

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 4:
            raise ParameterError(f"M must be an integer >= 4, got {self.M}")
        if not self.L > 0:
            raise ParameterError(f"L must be positive, got {self.L}")

    @property
    def h(self):
        return self.L / self.M

    @property
    def nodes(self):
        """interior nodes x_1..x_{M-1}"""
        return np.arange(1, self.M) * self.h

    @property
    def discrete_lambda1(self):
        """smallest eigenvalue of the discrete Dirichlet operator -Delta_h"""
        return 4.0 / self.h ** 2 * np.sin(np.pi * self.h / (2 * self.L)) ** 2


@dataclass(frozen=True)
class FieldTrace:
    """
    interior values at the stored steps. frames[i] is the solution at
    step steps[i]; a full history stores every step 0..N
    """

    space: SpaceGrid
    time: TimeGrid
    frames: np.ndarray
    scheme: SchemeId
    steps: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.steps is None:
            object.__setattr__(self, "steps", np.arange(self.frames.shape[0]))

    @property
    def final(self):
        return self.frames[-1]


def assemble_operator(space: SpaceGrid, kappa=0.0):
    """Delta_h + kappa I as a sparse (M-1) x (M-1) tridiagonal matrix"""
    size = space.M - 1
    inv_h2 = 1.0 / space.h ** 2
    return sp.diags(
        [np.full(size - 1, inv_h2), np.full(size, -2.0 * inv_h2 + kappa), np.full(size - 1, inv_h2)],
        [-1, 0, 1],
        format="csc",
    )


def factorize(matrix):
    """sparse LU of a step matrix, returned as its solve function"""
    try:
        lu = splu(sp.csc_matrix(matrix))
    except RuntimeError as e:
        raise LinearSolveFailure(f"step matrix factorization failed: {e}") from e
    return lu.solve


def _check_step(scheme, kappa_eff, tau):
    """kappa_eff = kappa - lambda1"""
    kt = kappa_eff * tau
    if scheme is SchemeId.IE and kt >= 1:
        raise StepSizeViolation(f"implicit Euler needs (kappa - lambda1)*tau < 1, got {kt:g}")
    if scheme is SchemeId.CN and kt / 2 >= 1:
        raise StepSizeViolation(f"Crank-Nicolson needs (kappa - lambda1)*tau/2 < 1, got {kt / 2:g}")
    if scheme is SchemeId.BDF2 and (kt >= 1.5 or kt == 1):
        raise StepSizeViolation(f"BDF2 needs (kappa - lambda1)*tau < 3/2 and != 1, got {kt:g}")


class _Recorder:
    """keeps every frame, or only the first and the last one"""

    def __init__(self, first, N, keep_history):
        self.keep_history = keep_history
        if keep_history:
            self.frames = np.empty((N + 1, first.size))
            self.frames[0] = first
        else:
            self.frames = [first.copy(), first.copy()]
        self.N = N

    def store(self, n, values):
        if self.keep_history:
            self.frames[n] = values
        elif n == self.N:
            self.frames[1] = values

    def trace(self, space, time, scheme):
        if self.keep_history:
            return FieldTrace(space, time, self.frames, scheme)
        return FieldTrace(space, time, np.stack(self.frames), scheme, np.array([0, self.N]))


def solve_pde(
        problem: ManufacturedProblem,
        space: SpaceGrid,
        time: TimeGrid,
        kappa=None,
        scheme=SchemeId.IE,
        keep_history=True,
) -> FieldTrace:
    """
    march the semi-discrete system U' = (Delta_h + kappa I) U + f in time.
    every step solves one tridiagonal system with a matrix factored once
    """
    scheme = SchemeId(scheme)
    if scheme is SchemeId.L1:
        raise ParameterError("use solve_l1 for the fractional equation")
    kappa = problem.kappa if kappa is None else kappa
    tau = time.tau
    _check_step(scheme, kappa - min_eigenvalue(space.L), tau)

    x = space.nodes
    A = assemble_operator(space, kappa)
    eye = sp.identity(space.M - 1, format="csc")

    values = sample(problem.u0, x)
    recorder = _Recorder(values, time.N, keep_history)

    if scheme is SchemeId.CN:
        solve = factorize(eye - 0.5 * tau * A)
        explicit = (eye + 0.5 * tau * A).tocsr()
        for n in range(1, time.N + 1):
            rhs = explicit @ values + tau * sample(problem.forcing, time.half_node(n), x)
            values = solve(rhs)
            recorder.store(n, values)
        return recorder.trace(space, time, scheme)

    solve_ie = factorize(eye - tau * A)
    previous = values
    values = solve_ie(values + tau * sample(problem.forcing, time.node(1), x))
    recorder.store(1, values)

    if scheme is SchemeId.IE:
        for n in range(2, time.N + 1):
            values = solve_ie(values + tau * sample(problem.forcing, time.node(n), x))
            recorder.store(n, values)
        return recorder.trace(space, time, scheme)

    solve_bdf2 = factorize(1.5 * eye - tau * A)
    for n in range(2, time.N + 1):
        rhs = 2.0 * values - 0.5 * previous + tau * sample(problem.forcing, time.node(n), x)
        previous, values = values, solve_bdf2(rhs)
        recorder.store(n, values)

    return recorder.trace(space, time, scheme)


def discrete_l2_error(trace: FieldTrace, problem: ManufacturedProblem):
    """e_n = sqrt(h sum_i (U^n_i - u(t_n, x_i))^2) for every stored frame"""
    t = trace.time.nodes[trace.steps]
    exact = sample(problem.exact, t[:, None], trace.space.nodes[None, :])
    return np.sqrt(trace.space.h * np.sum((trace.frames - exact) ** 2, axis=1))
