import json
import math

import pytest

from wtlab.report import ERROR, FAIL, PASS, Check, Report, values_csv
from wtlab.tolerances import DEFAULTS, resolve


def test_check_relations():
    assert Check("a", 1e-12, 1e-10).status == PASS
    assert Check("a", 1e-9, 1e-10).status == FAIL
    assert Check("a", 0.5, 1e-3, ">=").status == PASS
    assert Check("a", None, 1.0).status == ERROR
    assert Check("a", math.nan, 1.0).status == ERROR


def test_report_json_is_sorted_and_stable():
    r = Report("x", data={"b": 1, "a": [1.5, 2]})
    r.add(Check("c", 0.1, 1.0))
    doc = json.loads(r.to_json())
    assert doc["passed"] is True and list(doc) == sorted(doc)
    assert r.to_json() == r.to_json()


def test_error_fails_report():
    r = Report("x")
    r.record_error({"stage": "s"}, ValueError("boom"))
    assert not r.passed


def test_values_csv_columns():
    import numpy as np
    text = values_csv(np.array([1j]), np.array([[[1, 2], [3, 4j]]]))
    rows = text.strip().splitlines()
    assert rows[0] == "re_z,im_z,entryindex,re,im"
    assert len(rows) == 5
    assert rows[4].split(",")[2:] == ["3", "0.0", "4.0"]


def test_tolerance_scaling(monkeypatch):
    monkeypatch.setenv("WT_TOL_SCALE", "10")
    assert resolve()["period"] == pytest.approx(10 * DEFAULTS["period"])
    assert resolve(use_env=False)["period"] == DEFAULTS["period"]
    assert resolve({"period": 1e-3})["period"] == 1e-3
    with pytest.raises(KeyError):
        resolve({"nope": 1.0})
    monkeypatch.setenv("WT_TOL_SCALE", "-1")
    with pytest.raises(ValueError):
        resolve()
