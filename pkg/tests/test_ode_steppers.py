
import numpy as np
import pytest

from singstep.core_model import ManufacturedProblem, SchemeId, TimeGrid, make_ode_benchmark
from singstep.errors import ParameterError, StepSizeViolation
from singstep.metrics import empirical_order
from singstep.schemes import solve_ode, step_bdf2, step_cn, step_ie


def scalar_problem(exact, forcing, kappa=0.0):
    return ManufacturedProblem(exact=exact, forcing=forcing, u0=lambda: float(exact(0.0)), c_u_alpha=0.0, kappa=kappa)


def final_error(stepper, alpha, kappa, T, N):
    problem = make_ode_benchmark(alpha, kappa, T)
    return stepper(problem, TimeGrid(N, T)).errors(problem)[-1]


def order_at(stepper, kappa, N, alpha=0.5, T=1.0):
    return empirical_order(final_error(stepper, alpha, kappa, T, N // 2), final_error(stepper, alpha, kappa, T, N))


@pytest.mark.parametrize("stepper", [step_ie, step_cn, step_bdf2])
def test_zero_dynamics(stepper):
    problem = scalar_problem(lambda t: 0.0 * t, lambda t: 0.0)
    trace = stepper(problem, TimeGrid(10, 1.0))
    assert len(trace.values) == 11
    np.testing.assert_array_equal(trace.values, np.zeros(11))


def test_ie_geometric_decay():
    problem = scalar_problem(lambda t: np.exp(-t), lambda t: 0.0, kappa=-1.0)
    trace = step_ie(problem, TimeGrid(2, 1.0))
    assert trace.values[0] == 1.0
    assert trace.final == pytest.approx(4.0 / 9.0, rel=1e-15)


def test_ie_matches_closed_form():
    kappa, T, N = -3.0, 2.0, 64
    problem = make_ode_benchmark(0.4, kappa, T)
    grid = TimeGrid(N, T)
    trace = step_ie(problem, grid)
    r = 1.0 / (1 - kappa * grid.tau)
    for n in (1, 7, 32, N):
        k = np.arange(1, n + 1)
        closed = r ** n * 10.0 + grid.tau * np.sum(r ** (n + 1 - k) * problem.forcing(grid.nodes[k]))
        assert trace.values[n] == pytest.approx(closed, rel=1e-12)


def test_cn_exact_for_constant_slope():
    c, u0, T = 2.5, 1.0, 3.0
    problem = scalar_problem(lambda t: u0 + c * t, lambda t: c)
    assert step_cn(problem, TimeGrid(7, T)).final == pytest.approx(u0 + c * T, rel=1e-14)


@pytest.mark.parametrize("stepper", [step_ie, step_cn])
def test_linear_solution_reproduced(stepper):
    a, b, kappa = 2.0, -0.5, -1.5
    exact = lambda t: a + b * t  # noqa: E731
    problem = scalar_problem(exact, lambda t: b - kappa * (a + b * t), kappa)
    grid = TimeGrid(16, 2.0)
    trace = stepper(problem, grid)
    np.testing.assert_allclose(trace.values, exact(grid.nodes), rtol=1e-12)


def test_cn_quadratic_exactness_without_reaction():
    exact = lambda t: 1.0 + 0.3 * t + 0.7 * t ** 2  # noqa: E731
    problem = scalar_problem(exact, lambda t: 0.3 + 1.4 * t)
    grid = TimeGrid(20, 1.0)
    trace = step_cn(problem, grid)
    np.testing.assert_allclose(trace.values, exact(grid.nodes), rtol=1e-12)


def test_bdf2_reproduces_linear_data():
    a, b, kappa = 2.0, -0.5, -1.5
    exact = lambda t: a + b * t  # noqa: E731
    problem = scalar_problem(exact, lambda t: b - kappa * (a + b * t), kappa)
    grid = TimeGrid(20, 1.0)
    np.testing.assert_allclose(step_bdf2(problem, grid).values, exact(grid.nodes), rtol=1e-12)


def test_bdf2_constant_in_kernel():
    problem = scalar_problem(lambda t: 1.0 + 0 * t, lambda t: 0.0)
    np.testing.assert_allclose(step_bdf2(problem, TimeGrid(12, 1.0)).values, 1.0, rtol=0, atol=1e-15)


def test_unconditional_decay(rng):
    for _ in range(20):
        kappa = -rng.uniform(0.1, 100.0)
        grid = TimeGrid(int(rng.integers(2, 200)), rng.uniform(0.1, 5.0))
        problem = scalar_problem(lambda t: 0 * t + 1.0, lambda t: 0.0, kappa)
        ie = np.abs(step_ie(problem, grid).values)
        assert np.all(np.diff(ie) <= 0)
        if -kappa * grid.tau <= 2:
            cn = np.abs(step_cn(problem, grid).values)
            assert np.all(np.diff(cn) <= 1e-15)
        assert np.all(np.abs(step_bdf2(problem, grid).values) <= 3.0)


def test_step_size_guards():
    problem = make_ode_benchmark(0.5, 4.0, 1.0)
    with pytest.raises(StepSizeViolation):
        step_ie(problem, TimeGrid(4, 1.0))
    with pytest.raises(StepSizeViolation):
        step_cn(problem, TimeGrid(2, 1.0))
    with pytest.raises(StepSizeViolation):
        step_bdf2(problem, TimeGrid(2, 1.0))
    assert step_cn(problem, TimeGrid(4, 1.0)).scheme is SchemeId.CN


def test_kappa_argument_overrides_problem():
    problem = make_ode_benchmark(0.5, -1.0, 1.0)
    grid = TimeGrid(8, 1.0)
    a = step_ie(problem, grid, kappa=-1.0).values
    b = step_ie(problem, grid).values
    np.testing.assert_array_equal(a, b)


def test_solve_ode_rejects_l1():
    with pytest.raises(ParameterError):
        solve_ode(make_ode_benchmark(0.5, -1.0, 1.0), TimeGrid(8, 1.0), SchemeId.L1)


@pytest.mark.parametrize("N", [256, 512, 1024, 2048])
def test_ie_first_order_in_strong_decay(N):
    assert order_at(step_ie, -20.0, N) == pytest.approx(1.00, abs=0.02)


@pytest.mark.parametrize("N", [256, 512, 1024, 2048])
def test_ie_alpha_order_in_weak_decay(N):
    assert order_at(step_ie, -1.0, N) == pytest.approx(0.50, abs=0.02)


def test_ie_orders_drift_down_for_moderate_decay():
    orders = [order_at(step_ie, -5.0, N) for N in (256, 512, 1024, 2048)]
    assert orders[-1] == pytest.approx(0.59, abs=0.03)
    assert all(later <= earlier + 0.01 for earlier, later in zip(orders, orders[1:]))


def test_cn_regimes():
    assert order_at(step_cn, -20.0, 2048) == pytest.approx(2.00, abs=0.03)
    assert order_at(step_cn, -5.0, 2048) == pytest.approx(0.50, abs=0.02)
    assert order_at(step_cn, -10.0, 512) == pytest.approx(-0.63, abs=0.2)


def test_bdf2_regimes():
    assert order_at(step_bdf2, -20.0, 512) == pytest.approx(2.01, abs=0.05)
    assert order_at(step_bdf2, -10.0, 256) == pytest.approx(-0.55, abs=0.2)


@pytest.mark.parametrize("stepper", [step_ie, step_cn, step_bdf2])
@pytest.mark.parametrize("kappa", [0.0, 0.5])
def test_growth_regime_alpha_order(stepper, kappa):
    for N in (512, 1024, 2048):
        assert order_at(stepper, kappa, N) == pytest.approx(0.5, abs=0.05)
