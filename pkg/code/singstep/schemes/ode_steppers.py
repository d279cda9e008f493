"""implicit Euler, Crank-Nicolson and BDF2 for the scalar equation u' = kappa u + f"""
from dataclasses import dataclass

import numpy as np

from ..core_model import ManufacturedProblem, SchemeId, TimeGrid, sample
from ..errors import ParameterError, StepSizeViolation


@dataclass(frozen=True)
class SolutionTrace:
    grid: TimeGrid
    values: np.ndarray
    scheme: SchemeId

    @property
    def final(self):
        return float(self.values[-1])

    def errors(self, problem: ManufacturedProblem):
        """|U^n - u(t_n)| for n = 0..N"""
        return np.abs(self.values - sample(problem.exact, self.grid.nodes))


def _kappa(problem, kappa):
    return problem.kappa if kappa is None else kappa


def _start(problem, grid):
    values = np.empty(grid.N + 1)
    values[0] = problem.u0()
    return values


def step_ie(problem: ManufacturedProblem, grid: TimeGrid, kappa=None) -> SolutionTrace:
    """U^n = (U^{n-1} + tau f(t_n)) / (1 - kappa tau)"""
    kappa = _kappa(problem, kappa)
    tau = grid.tau
    if kappa * tau >= 1:
        raise StepSizeViolation(f"implicit Euler needs kappa*tau < 1, got {kappa * tau:g}")

    f = sample(problem.forcing, grid.nodes[1:])
    values = _start(problem, grid)
    denom = 1 - kappa * tau
    for n in range(1, grid.N + 1):
        values[n] = (values[n - 1] + tau * f[n - 1]) / denom

    return SolutionTrace(grid, values, SchemeId.IE)


def step_cn(problem: ManufacturedProblem, grid: TimeGrid, kappa=None) -> SolutionTrace:
    """Crank-Nicolson with the forcing sampled at the half nodes"""
    kappa = _kappa(problem, kappa)
    tau = grid.tau
    if kappa * tau / 2 >= 1:
        raise StepSizeViolation(f"Crank-Nicolson needs kappa*tau/2 < 1, got {kappa * tau / 2:g}")

    f = sample(problem.forcing, grid.half_nodes)
    values = _start(problem, grid)
    gain = 1 + kappa * tau / 2
    denom = 1 - kappa * tau / 2
    for n in range(1, grid.N + 1):
        values[n] = (gain * values[n - 1] + tau * f[n - 1]) / denom

    return SolutionTrace(grid, values, SchemeId.CN)


def step_bdf2(problem: ManufacturedProblem, grid: TimeGrid, kappa=None) -> SolutionTrace:
    """BDF2, started by one implicit Euler step"""
    kappa = _kappa(problem, kappa)
    tau = grid.tau
    if kappa * tau >= 1.5:
        raise StepSizeViolation(f"BDF2 needs kappa*tau < 3/2, got {kappa * tau:g}")
    if kappa * tau == 1:
        raise StepSizeViolation("the implicit Euler starting step is singular at kappa*tau = 1")

    f = sample(problem.forcing, grid.nodes[1:])
    values = _start(problem, grid)
    values[1] = (values[0] + tau * f[0]) / (1 - kappa * tau)
    denom = 1.5 - kappa * tau
    for n in range(2, grid.N + 1):
        values[n] = (2 * values[n - 1] - 0.5 * values[n - 2] + tau * f[n - 1]) / denom

    return SolutionTrace(grid, values, SchemeId.BDF2)


STEPPERS = {
    SchemeId.IE: step_ie,
    SchemeId.CN: step_cn,
    SchemeId.BDF2: step_bdf2,
}


def solve_ode(problem, grid, scheme, kappa=None) -> SolutionTrace:
    try:
        stepper = STEPPERS[SchemeId(scheme)]
    except KeyError:
        raise ParameterError(f"{scheme} is not a classical time stepper") from None
    return stepper(problem, grid, kappa)
