"""
convergence tables: run every (scheme, parameters, N) cell, measure the
final-time error and attach empirical orders, bound terms and predicted orders
"""
import math
import time as _time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd
from tqdm import tqdm

from .bounds import (BoundForm, bound_history, bound_rhs, conjecture_history,
                     in_hypothesis, predicted_order)
from .core_model import ModelParams, SchemeId, TimeGrid, make_benchmark, min_eigenvalue
from .errors import DegenerateError, SingstepError
from .schemes import SpaceGrid, discrete_l2_error, solve_l1, solve_ode, solve_pde

TABLE_COLUMNS = [
    "scheme", "alpha", "kappa", "L", "lambda1", "T", "M", "N",
    "final_error", "order", "exp_term", "alg_term", "predicted_order", "status",
]

BOUND_COLUMNS = [
    "scheme", "alpha", "kappa", "L", "lambda1", "T", "M", "N",
    "bound", "C", "in_hypothesis", "init_term", "exp_term", "alg_term",
    "odd_constant", "even_constant", "threshold_time", "total", "final_error", "multiplier",
]

SCAN_COLUMNS = [
    "scheme", "alpha", "kappa", "L", "lambda1", "T", "M", "N", "final_error", "local_order", "status",
]

SCHEME_RANK = {scheme: i for i, scheme in enumerate(SchemeId)}


def empirical_order(e_half, e_full):
    """log2(e_{N/2} / e_N); negative values are legal"""
    for e in (e_half, e_full):
        if not np.isfinite(e) or e <= 0 or e < np.finfo(float).tiny:
            raise DegenerateError(f"cannot form an order from error {e!r}")
    return math.log2(e_half / e_full)


def local_order(e_prev, e_cur, n_prev, n_cur):
    """order between two arbitrary step counts"""
    for e in (e_prev, e_cur):
        if not np.isfinite(e) or e <= 0 or e < np.finfo(float).tiny:
            raise DegenerateError(f"cannot form an order from error {e!r}")
    return math.log(e_prev / e_cur) / math.log(n_cur / n_prev)


def safety_multiplier(errors, rhs):
    """smallest lambda with lambda * rhs >= |e| wherever rhs is finite and positive"""
    errors = np.abs(np.asarray(errors, dtype=float))
    rhs = np.asarray(rhs, dtype=float)
    usable = np.isfinite(rhs) & (rhs > 0)
    if not usable.any():
        return math.nan
    return float(np.max(errors[usable] / rhs[usable]))


@dataclass(frozen=True)
class Cell:
    scheme: SchemeId
    alpha: float
    kappa: float
    T: float
    N: int
    L: Optional[float] = None
    M: Optional[int] = None

    @property
    def params(self):
        return ModelParams(self.alpha, self.kappa, self.T, self.L)

    @property
    def grid(self):
        return TimeGrid(self.N, self.T)

    def sort_key(self):
        return (SCHEME_RANK[self.scheme], self.alpha, self.kappa,
                -1.0 if self.L is None else self.L, self.T, self.N)


@dataclass
class CellResult:
    cell: Cell
    final_error: float = math.nan
    status: str = "ok"
    history: Optional[np.ndarray] = None
    seconds: float = 0.0

    @property
    def ok(self):
        return self.status == "ok"


def run_cell(cell: Cell, history=False) -> CellResult:
    """solve one benchmark; failures come back in the status field"""
    start = _time.perf_counter()
    try:
        params = cell.params
        problem = make_benchmark(params, fractional=cell.scheme.is_fractional)
        grid = cell.grid
        if params.is_ode:
            errors = solve_ode(problem, grid, cell.scheme).errors(problem)
        else:
            space = SpaceGrid(cell.M, cell.L)
            if cell.scheme is SchemeId.L1:
                trace = solve_l1(problem, space, grid, keep_history=history)
            else:
                trace = solve_pde(problem, space, grid, scheme=cell.scheme, keep_history=history)
            errors = discrete_l2_error(trace, problem)
        result = CellResult(cell, float(errors[-1]), history=errors if history else None)
    except SingstepError as e:
        result = CellResult(cell, status=f"{type(e).__name__}: {e}")
    result.seconds = _time.perf_counter() - start
    return result


def _run_cell_with_history(cell):
    return run_cell(cell, history=True)


def expand_cells(config):
    """every cell of an experiment grid, in table order"""
    lengths = [None] if config.domain == "ode" else list(config.lengths)
    cells = [
        Cell(scheme, config.alpha, kappa, T, N, L, None if L is None else config.M)
        for scheme in config.schemes
        for kappa in config.kappas
        for L in lengths
        for T in config.final_times
        for N in config.steps
    ]
    return sorted(cells, key=Cell.sort_key)


def run_cells(cells, jobs=1, history=False, progress=False, desc="cells"):
    """results in the order of cells, whatever the number of workers"""
    worker = _run_cell_with_history if history else run_cell
    if jobs is not None and jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            mapped = executor.map(worker, cells)
            return list(tqdm(mapped, total=len(cells), desc=desc, disable=not progress))
    return [worker(cell) for cell in tqdm(cells, desc=desc, disable=not progress)]


@dataclass
class ConvergenceTable:
    rows: pd.DataFrame
    metadata: dict = field(default_factory=dict)
    bounds: Optional[pd.DataFrame] = None

    @property
    def failed(self):
        return int((self.rows["status"] != "ok").sum()) if len(self.rows) else 0


def _group_key(cell):
    return (cell.scheme, cell.alpha, cell.kappa, cell.L, cell.T, cell.M)


def _base_row(cell):
    return {
        "scheme": cell.scheme.value,
        "alpha": cell.alpha,
        "kappa": cell.kappa,
        "L": math.nan if cell.L is None else cell.L,
        "lambda1": 0.0 if cell.L is None else min_eigenvalue(cell.L),
        "T": cell.T,
        "M": math.nan if cell.M is None else cell.M,
        "N": cell.N,
    }


def _bound_form(cell):
    return BoundForm.for_scheme(cell.scheme, diffusion=cell.L is not None)


def _table_rows(results, conjecture_C):
    by_group = defaultdict(dict)
    for result in results:
        by_group[_group_key(result.cell)][result.cell.N] = result

    rows = []
    for result in results:
        cell = result.cell
        row = _base_row(cell)
        row.update(final_error=result.final_error, order=math.nan, exp_term=math.nan,
                   alg_term=math.nan, predicted_order=math.nan, status=result.status)

        half = by_group[_group_key(cell)].get(cell.N // 2) if cell.N % 2 == 0 else None
        if result.ok and half is not None and half.ok:
            try:
                row["order"] = empirical_order(half.final_error, result.final_error)
            except DegenerateError as e:
                row["status"] = f"DegenerateError: {e}"

        if cell.scheme.order is not None and result.ok:
            params = cell.params
            form = _bound_form(cell)
            if in_hypothesis(form, params, cell.grid):
                terms = bound_rhs(form, params, cell.grid, cell.N)
                row["exp_term"] = terms.exp_term
                row["alg_term"] = terms.alg_term
            row["predicted_order"] = predicted_order(params, cell.N, cell.scheme.order, conjecture_C)
        rows.append(row)
    return rows


def conjecture_sensitivity(result: CellResult, C_values=(0.5, 1.0, 2.0)):
    """final envelope and fitted multiplier of the L1 error history for each C"""
    cell = result.cell
    records = []
    for C in C_values:
        rhs = conjecture_history(cell.params, cell.grid, C)
        records.append({"C": C, "total": rhs[-1], "multiplier": safety_multiplier(result.history[1:], rhs)})
    return pd.DataFrame(records, columns=["C", "total", "multiplier"])


def _bound_rows(results, conjecture_C):
    rows = []
    for result in results:
        cell = result.cell
        if not result.ok or result.history is None:
            continue
        params, grid = cell.params, cell.grid

        if cell.scheme is SchemeId.L1:
            if params.kappa > params.lambda1:
                continue
            sweep = conjecture_sensitivity(result, sorted({0.5, 1.0, 2.0, conjecture_C}))
            for C, total, multiplier in sweep.itertuples(index=False):
                row = _base_row(cell)
                row.update(bound="conjecture", C=C, in_hypothesis=True, init_term=0.0,
                           exp_term=math.nan, alg_term=math.nan, odd_constant=math.nan,
                           even_constant=math.nan, threshold_time=math.nan, total=total,
                           final_error=result.final_error, multiplier=multiplier)
                rows.append(row)
            continue

        form = _bound_form(cell)
        row = _base_row(cell)
        row.update(bound=form.value, C=math.nan, final_error=result.final_error)
        if not in_hypothesis(form, params, grid):
            row.update(in_hypothesis=False, init_term=math.nan, exp_term=math.nan, alg_term=math.nan,
                       odd_constant=math.nan, even_constant=math.nan, threshold_time=math.nan,
                       total=math.nan, multiplier=math.nan)
            rows.append(row)
            continue

        terms = bound_rhs(form, params, grid, cell.N)
        # n = 1 involves t_0^{alpha-k}; the multiplier is taken over n >= 2
        totals = bound_history(form, params, grid)
        row.update(in_hypothesis=True, init_term=terms.init_term, exp_term=terms.exp_term,
                   alg_term=terms.alg_term, odd_constant=terms.constants["odd"],
                   even_constant=terms.constants["even"], threshold_time=terms.threshold_time,
                   total=terms.total, multiplier=safety_multiplier(result.history[2:], totals[1:]))
        rows.append(row)
    return rows


def build_table(config, jobs=1, progress=False) -> ConvergenceTable:
    """deterministic convergence table of an experiment grid"""
    cells = expand_cells(config)
    results = run_cells(cells, jobs=jobs, history=config.bounds, progress=progress)

    rows = pd.DataFrame(_table_rows(results, config.conjecture_C), columns=TABLE_COLUMNS)
    bounds = None
    if config.bounds:
        bounds = pd.DataFrame(_bound_rows(results, config.conjecture_C), columns=BOUND_COLUMNS)

    metadata = {
        "alpha": config.alpha,
        "M": config.M,
        "cells": len(cells),
        "failed": sum(not r.ok for r in results),
        "seconds": round(sum(r.seconds for r in results), 3),
        "created": _time.strftime("%Y-%m-%d %H:%M:%S"),
    }
    return ConvergenceTable(rows, metadata, bounds)


def kink_scan(config, jobs=1, progress=False) -> pd.DataFrame:
    """final-time errors over a dense N grid with local orders between neighbours"""
    cells = expand_cells(config)
    results = run_cells(cells, jobs=jobs, progress=progress, desc="scan")

    rows = []
    previous = {}
    for result in results:
        cell = result.cell
        row = _base_row(cell)
        row.update(final_error=result.final_error, local_order=math.nan, status=result.status)
        key = _group_key(cell)
        before = previous.get(key)
        if result.ok and before is not None and before.ok:
            try:
                row["local_order"] = local_order(before.final_error, result.final_error, before.cell.N, cell.N)
            except DegenerateError as e:
                row["status"] = f"DegenerateError: {e}"
        previous[key] = result
        rows.append(row)

    return pd.DataFrame(rows, columns=SCAN_COLUMNS)
