import json
import math

import numpy as np

from vlineq.lattice import DEFAULT_GRID, LatticeElement
from vlineq.report import VerificationReport, grid_diagnostics, to_jsonable


def test_record_keeps_worst_failure():
    rep = VerificationReport("x")
    rep.record(True, 0.5, "big pass")
    rep.record(False, 0.1, "small failure")
    rep.record(True, 0.9, "bigger pass")
    assert (rep.instances, rep.passes) == (3, 2)
    assert rep.worst_witness == "small failure"
    assert rep.max_violation == 0.9
    assert not rep.passed


def test_record_clamps_negative_violation():
    rep = VerificationReport("x")
    rep.record(True, -1.0)
    assert rep.max_violation == 0.0


def test_json_is_stable_and_sanitized():
    rep = VerificationReport("x", grid_diagnostics=grid_diagnostics(DEFAULT_GRID), seed=4)
    rep.details = {"elem": LatticeElement.complex([1 + 2j]), "arr": np.array([1.0, math.nan]), "z": 1j, "flag": np.bool_(True)}
    rep.record(True, 0.0)
    rep.add_residual(1e-12)
    text = rep.to_json()
    assert text == rep.to_json() and text.endswith("\n")
    d = json.loads(text)
    assert d["details"]["elem"] == {"field": "complex", "coords": [[1.0, 2.0]]}
    assert d["details"]["arr"] == [1.0, "nan"]
    assert d["details"]["z"] == [0.0, 1.0]
    assert d["grid_diagnostics"]["residuals"] == {"count": 1, "max": 1e-12, "mean": 1e-12}
    assert d["grid_diagnostics"]["theta_points"] == 4096


def test_text_lines():
    rep = VerificationReport("top")
    sub = VerificationReport("child")
    sub.record(False, 2.0)
    rep.subreports.append(sub)
    lines = rep.to_text().splitlines()
    assert lines[0].startswith("[FAIL] top")
    assert lines[1].strip().startswith("[FAIL] child: 0/1 passed")


def test_to_jsonable_passthrough():
    assert to_jsonable({"a": (1, 2.5, "s", None)}) == {"a": [1, 2.5, "s", None]}
    assert to_jsonable(float("-inf")) == "-inf"
