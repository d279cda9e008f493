import math
from dataclasses import replace

import numpy as np
import pandas as pd
import pytest

from singstep.core_model import SchemeId
from singstep.errors import DegenerateError
from singstep.experiments import ExperimentConfig, preset
from singstep.metrics import (BOUND_COLUMNS, SCAN_COLUMNS, TABLE_COLUMNS, Cell, build_table,
                              conjecture_sensitivity, empirical_order, expand_cells, kink_scan,
                              local_order, run_cell, safety_multiplier)


def small_ode_config(**changes):
    config = ExperimentConfig(
        schemes=(SchemeId.BDF2, SchemeId.IE),
        kappas=(-5.0, -1.0),
        final_times=(1.0,),
        steps=(128, 32, 64),
    )
    return replace(config, **changes).validate()


def test_empirical_order_examples():
    assert empirical_order(0.2, 0.1) == pytest.approx(1.0)
    assert empirical_order(0.1, 0.2) == pytest.approx(-1.0)


@pytest.mark.parametrize("errors", [(0.0, 0.1), (0.1, 0.0), (math.nan, 0.1), (0.1, math.inf), (-0.1, 0.1)])
def test_empirical_order_degenerate(errors):
    with pytest.raises(DegenerateError):
        empirical_order(*errors)


def test_local_order():
    assert local_order(0.2, 0.1, 64, 128) == pytest.approx(1.0)
    assert local_order(1.0, 0.25, 100, 200) == pytest.approx(2.0)


def test_safety_multiplier():
    assert safety_multiplier([1.0, -2.0, 3.0], [2.0, 1.0, math.inf]) == pytest.approx(2.0)
    assert math.isnan(safety_multiplier([1.0], [0.0]))


def test_cells_are_sorted():
    cells = expand_cells(small_ode_config())
    assert len(cells) == 2 * 2 * 3
    assert [c.scheme for c in cells[:6]] == [SchemeId.IE] * 6
    assert [c.N for c in cells[:3]] == [32, 64, 128]
    assert [c.kappa for c in cells[::3]] == [-5.0, -1.0, -5.0, -1.0]
    assert all(c.L is None and c.M is None for c in cells)


def test_run_cell_reports_failures_in_status():
    result = run_cell(Cell(SchemeId.IE, 0.5, 64.0, 1.0, 64))
    assert not result.ok
    assert result.status.startswith("StepSizeViolation")
    assert math.isnan(result.final_error)


def test_run_cell_history():
    result = run_cell(Cell(SchemeId.IE, 0.5, -5.0, 1.0, 32), history=True)
    assert result.ok
    assert result.history.shape == (33,)
    assert result.history[0] == 0.0
    assert result.final_error == result.history[-1]


def test_empty_grid_gives_empty_table():
    table = build_table(ExperimentConfig())
    assert list(table.rows.columns) == TABLE_COLUMNS
    assert len(table.rows) == 0
    assert table.failed == 0


def test_table_rows_and_orders():
    table = build_table(small_ode_config())
    rows = table.rows
    assert list(rows.columns) == TABLE_COLUMNS
    assert len(rows) == 12
    assert table.failed == 0
    assert list(rows["scheme"][:3]) == ["IE", "IE", "IE"]
    assert rows["order"][rows["N"] == 32].isna().all()
    assert rows["order"][rows["N"] > 32].notna().all()
    first = rows.iloc[1]
    previous = rows.iloc[0]
    assert first["order"] == pytest.approx(math.log2(previous["final_error"] / first["final_error"]))
    assert (rows["predicted_order"].between(0.5, 2.0)).all()
    assert rows["lambda1"].eq(0.0).all()
    assert table.metadata["cells"] == 12


def test_table_is_deterministic():
    config = small_ode_config()
    serial = build_table(config)
    parallel = build_table(config, jobs=2)
    pd.testing.assert_frame_equal(serial.rows, parallel.rows)


def test_failed_cells_stay_in_table():
    config = ExperimentConfig(schemes=(SchemeId.IE,), kappas=(64.0, -1.0), final_times=(1.0,),
                              steps=(32, 64)).validate()
    table = build_table(config)
    assert len(table.rows) == 4
    assert table.failed == 2
    bad = table.rows[table.rows["kappa"] == 64.0]
    assert bad["status"].str.startswith("StepSizeViolation").all()
    assert bad["order"].isna().all()
    good = table.rows[table.rows["kappa"] == -1.0]
    assert (good["status"] == "ok").all()


def test_bound_rows():
    config = small_ode_config(kappas=(-20.0,), steps=(32, 64, 128), bounds=True)
    table = build_table(config)
    bounds = table.bounds
    assert list(bounds.columns) == BOUND_COLUMNS
    assert len(bounds) == 6
    bdf2 = bounds[bounds["scheme"] == "BDF2"]
    # -4 kappa tau < 1 needs N > 80
    assert list(bdf2["in_hypothesis"]) == [False, False, True]
    ie = bounds[bounds["scheme"] == "IE"]
    assert ie["in_hypothesis"].all()
    assert (ie["bound"] == "ie-ode").all()


def test_conjecture_rows():
    config = ExperimentConfig(schemes=(SchemeId.L1,), kappas=(0.0,), domain="interval", lengths=(math.pi,),
                              final_times=(1.0,), steps=(32, 64), M=64, bounds=True,
                              conjecture_C=3.0).validate()
    table = build_table(config)
    assert len(table.rows) == 2
    assert table.rows["predicted_order"].isna().all()
    bounds = table.bounds
    assert len(bounds) == 8
    assert sorted(set(bounds["C"])) == [0.5, 1.0, 2.0, 3.0]
    assert (bounds["bound"] == "conjecture").all()


def test_conjecture_sensitivity():
    result = run_cell(Cell(SchemeId.L1, 0.5, 0.0, 1.0, 32, L=math.pi, M=64), history=True)
    frame = conjecture_sensitivity(result, (0.5, 1.0, 2.0))
    assert list(frame.columns) == ["C", "total", "multiplier"]
    assert np.all(np.diff(frame["total"]) < 0)
    assert np.all(frame["multiplier"] > 0)


@pytest.mark.slow
def test_kink_scan_has_negative_orders():
    config = replace(preset("kink-ode"), schemes=(SchemeId.CN,))
    scan = kink_scan(config)
    assert list(scan.columns) == SCAN_COLUMNS
    assert (scan["status"] == "ok").all()
    assert (scan["local_order"].dropna() < 0).any()
    assert scan["local_order"].isna().sum() == 1


@pytest.mark.slow
def test_diffusion_growth_orders_stay_at_alpha():
    table = build_table(preset("diffusion-growth"))
    assert table.failed == 0
    orders = table.rows["order"].dropna()
    assert len(orders) == 3 * 2 * 2 * (len(preset("diffusion-growth").steps) - 1)
    assert orders.between(0.45, 0.57).all()


# published two-decimal orders of the L1 scheme, T = 5, keyed by (kappa, L), N = 64..512
L1_GROWTH_ORDERS = {
    (1.0, math.pi): (1.00, 1.00, 1.00, 1.00),
    (1.0, 4.0): (0.94, 0.96, 0.97, 0.98),
    (1.5, math.pi): (0.92, 0.94, 0.96, 0.97),
    (1.5, 4.0): (0.92, 0.92, 0.93, 0.95),
}


@pytest.mark.slow
def test_l1_growth_orders_match_published_table():
    table = build_table(preset("l1-growth"))
    assert table.failed == 0
    rows = table.rows.dropna(subset=["order"])
    assert rows["order"].between(0.91, 1.05).all()
    for (kappa, L), expected in L1_GROWTH_ORDERS.items():
        cells = rows[(rows["kappa"] == kappa) & np.isclose(rows["L"], L)].sort_values("N")
        assert list(cells["N"]) == [64, 128, 256, 512]
        np.testing.assert_allclose(cells["order"], expected, atol=0.02)
