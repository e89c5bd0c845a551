import math

import pytest

from entadd.tables import Cell, TableReport, run_table, table1


def test_cell_relations():
    assert Cell("t", "r", "q", 1.0, 1.00005, 1e-4).passed
    assert not Cell("t", "r", "q", 1.0, 1.001, 1e-4).passed
    assert Cell("t", "r", "q", 1.0, 2.0, 1e-4, "ge").passed
    assert not Cell("t", "r", "q", 1.0, 2.0, 1e-4, "le").passed
    assert not Cell("t", "r", "q", math.inf, math.inf, 1e-4).passed


def test_table3_passes_and_renders():
    rep = run_table("table3")
    assert rep.passed
    text = rep.render()
    assert "cells pass" in text and "FAIL" not in text
    doc = rep.to_json()
    assert doc["units"] == "bits" and doc["n_failed"] == 0


def test_small_table1_subset():
    rep = table1(specs=("bell:0.7,0.1,0.1,0.1", "ghz:N=3"))
    assert rep.passed
    assert {c.quantity for c in rep.cells} >= {"GM", "REE (FW)", "LGR upper"}


def test_unknown_table():
    with pytest.raises(ValueError):
        run_table("table4")


def test_report_fails_with_any_bad_cell():
    rep = TableReport("x", (Cell("x", "a", "q", 0.0, 0.0, 1e-6), Cell("x", "b", "q", 0.0, 1.0, 1e-6)), 0.0)
    assert not rep.passed and rep.to_json()["n_failed"] == 1
