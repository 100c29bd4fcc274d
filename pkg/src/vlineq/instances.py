"""Instance files: named operands plus a list of checks to run on them.

Layout (JSON)::

    {
      "field": "real" | "complex",
      "elements": {"name": [[re, im], ...]},
      "forms": {"name": {"hermitian": true, "matrices": [[[[re, im], ...], ...], ...]}},
      "maps": {"name": [[x, ...], ...]},
      "checks": [{"suite": "...", "params": {...}, "operands": {...}}]
    }

Coordinates are always [re, im] pairs. Validation errors carry a
JSON-pointer path to the offending value.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import InstanceParseError, InstanceValidationError, VlineqError
from .lattice import LatticeElement, ScalarField
from .maps import (
    ExponentVector,
    PositiveLinearMap,
    random_lattice_homomorphism,
    random_positive_map,
)
from .powers import WeightVector
from .sesquilinear import SesquilinearForm, random_psd_form, random_vector

# operand slots per suite: name -> kind, where a trailing "*" marks a list
OPERAND_SLOTS: dict[str, dict[str, str]] = {
    "lattice-axioms": {"f": "element", "g": "element", "h": "element"},
    "modulus": {"f": "element"},
    "square-mean": {"f": "element", "g": "element"},
    "geometric-mean": {"f": "element", "g": "element"},
    "weighted-gm": {"elements": "element*"},
    "powers": {"a": "element"},
    "power-rules": {"a": "element"},
    "cauchy-schwarz": {"form": "form", "u": "element", "v": "element"},
    "cs-corollary": {"form": "form", "u": "element", "v": "element"},
    "cs-equality": {"form": "form", "u": "element", "v": "element"},
    "maligranda": {"map": "map", "elements": "element*"},
    "hom-equality": {"map": "map", "elements": "element*"},
    "holder": {"map": "map", "elements": "element*"},
    "minkowski": {"map": "map", "elements": "element*"},
}

REQUIRED_PARAMS: dict[str, tuple[str, ...]] = {
    "weighted-gm": ("weights",),
    "powers": ("r",),
    "power-rules": ("p", "q"),
    "maligranda": ("weights",),
    "hom-equality": ("weights",),
    "holder": ("exponents",),
    "minkowski": ("p",),
}

REAL_ONLY = {"lattice-axioms", "square-mean", "geometric-mean", "weighted-gm", "powers", "power-rules"}
POSITIVE_ONLY = {"geometric-mean", "powers", "power-rules"}

KINDS = ("psd-form", "positive-map", "lattice-hom", "positive-elements")


@dataclass
class Check:
    suite: str
    operands: dict[str, Any]
    params: dict[str, Any] = field(default_factory=dict)


@dataclass
class InstanceFile:
    field: ScalarField
    elements: dict[str, LatticeElement] = field(default_factory=dict)
    forms: dict[str, SesquilinearForm] = field(default_factory=dict)
    hermitian: dict[str, bool] = field(default_factory=dict)
    maps: dict[str, PositiveLinearMap] = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "field": self.field.value,
            "elements": {k: e.to_pairs() for k, e in self.elements.items()},
            "forms": {
                k: {"hermitian": self.hermitian.get(k, True), "matrices": _matrix_pairs(T.matrices)}
                for k, T in self.forms.items()
            },
            "maps": {k: M.entries.tolist() for k, M in self.maps.items()},
            "checks": [{"suite": c.suite, "params": c.params, "operands": c.operands} for c in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def semantically_equal(self, other: "InstanceFile") -> bool:
        return self.to_dict() == other.to_dict()


def _matrix_pairs(mats: np.ndarray) -> list:
    return np.stack([mats.real, mats.imag], axis=-1).tolist()


# loading


def load_instance(path: str | Path) -> InstanceFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InstanceParseError(f"cannot read {path}: {exc.strerror}") from None
    return parse_instance(text)


def parse_instance(text: str) -> InstanceFile:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceParseError(f"malformed JSON: {exc}") from None
    return instance_from_dict(raw)


def instance_from_dict(raw: Any) -> InstanceFile:
    if not isinstance(raw, dict):
        raise InstanceValidationError("", "instance must be a JSON object")
    unknown = set(raw) - {"field", "elements", "forms", "maps", "checks"}
    if unknown:
        raise InstanceValidationError("/" + sorted(unknown)[0], "unknown key")
    if "field" not in raw:
        raise InstanceValidationError("/field", "missing")
    try:
        fld = ScalarField.parse(raw["field"])
    except VlineqError as exc:
        raise InstanceValidationError("/field", str(exc)) from None

    inst = InstanceFile(fld)
    for name, value in _named(raw, "elements").items():
        inst.elements[name] = _element(value, fld, f"/elements/{_esc(name)}")
    for name, value in _named(raw, "forms").items():
        form, herm = _form(value, fld, f"/forms/{_esc(name)}")
        inst.forms[name] = form
        inst.hermitian[name] = herm
    for name, value in _named(raw, "maps").items():
        inst.maps[name] = _map(value, f"/maps/{_esc(name)}")

    checks = raw.get("checks", [])
    if not isinstance(checks, list):
        raise InstanceValidationError("/checks", "must be a list")
    for i, c in enumerate(checks):
        inst.checks.append(_check(c, inst, f"/checks/{i}"))
    return inst


def _esc(name: str) -> str:
    return name.replace("~", "~0").replace("/", "~1")


def _named(raw: dict, key: str) -> dict:
    value = raw.get(key, {})
    if not isinstance(value, dict):
        raise InstanceValidationError(f"/{key}", "must be an object of named entries")
    return value


def _pairs_array(value: Any, ptr: str, depth: int) -> np.ndarray:
    """Nested lists ending in [re, im] pairs, as a complex array of ``depth`` axes."""
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise InstanceValidationError(ptr, "expected nested numeric [re, im] pairs") from None
    if arr.ndim != depth + 1 or arr.shape[-1] != 2 or 0 in arr.shape:
        raise InstanceValidationError(ptr, f"expected a nonempty {depth}-level array of [re, im] pairs")
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise InstanceValidationError(ptr + "".join(f"/{i}" for i in bad), "non-finite number")
    return arr[..., 0] + 1j * arr[..., 1]


def _check_field(z: np.ndarray, fld: ScalarField, ptr: str) -> None:
    if fld is ScalarField.REAL and np.any(z.imag != 0):
        bad = np.argwhere(z.imag != 0)[0]
        raise InstanceValidationError(ptr + "".join(f"/{i}" for i in bad) + "/1", "imaginary part must be 0 over the real field")


def _element(value: Any, fld: ScalarField, ptr: str) -> LatticeElement:
    z = _pairs_array(value, ptr, 1)
    _check_field(z, fld, ptr)
    return LatticeElement(fld, z)


def _form(value: Any, fld: ScalarField, ptr: str) -> tuple[SesquilinearForm, bool]:
    if not isinstance(value, dict) or "matrices" not in value:
        raise InstanceValidationError(ptr, "form needs a 'matrices' entry")
    herm = value.get("hermitian", True)
    if not isinstance(herm, bool):
        raise InstanceValidationError(ptr + "/hermitian", "must be a boolean")
    mats = _pairs_array(value["matrices"], ptr + "/matrices", 3)
    _check_field(mats, fld, ptr + "/matrices")
    if mats.shape[1] != mats.shape[2]:
        raise InstanceValidationError(ptr + "/matrices", "matrices must be square")
    form = SesquilinearForm(fld, mats)
    if herm:
        if not form.is_hermitian():
            raise InstanceValidationError(ptr + "/matrices", f"tagged Hermitian but defect is {form.hermitian_defect():.3e}")
        if not form.is_psd():
            raise InstanceValidationError(ptr + "/matrices", "tagged Hermitian but not positive semidefinite")
    return form, herm


def _map(value: Any, ptr: str) -> PositiveLinearMap:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise InstanceValidationError(ptr, "expected a numeric matrix") from None
    if arr.ndim != 2 or 0 in arr.shape:
        raise InstanceValidationError(ptr, "expected a nonempty matrix")
    if not np.all(np.isfinite(arr)):
        raise InstanceValidationError(ptr, "non-finite entry")
    if np.any(arr < 0):
        i, j = np.argwhere(arr < 0)[0]
        raise InstanceValidationError(f"{ptr}/{i}/{j}", "positive maps need nonnegative entries")
    return PositiveLinearMap(arr)


def _resolve(inst: InstanceFile, kind: str, name: Any, ptr: str):
    table = {"element": inst.elements, "form": inst.forms, "map": inst.maps}[kind]
    if not isinstance(name, str) or name not in table:
        raise InstanceValidationError(ptr, f"unknown {kind} {name!r}")
    return table[name]


def _check(c: Any, inst: InstanceFile, ptr: str) -> Check:
    if not isinstance(c, dict):
        raise InstanceValidationError(ptr, "check must be an object")
    suite = c.get("suite")
    if suite not in OPERAND_SLOTS:
        raise InstanceValidationError(ptr + "/suite", f"unknown suite {suite!r}")
    ops = c.get("operands", {})
    params = c.get("params", {})
    if not isinstance(ops, dict):
        raise InstanceValidationError(ptr + "/operands", "must be an object")
    if not isinstance(params, dict):
        raise InstanceValidationError(ptr + "/params", "must be an object")
    resolved: dict[str, Any] = {}
    for slot, kind in OPERAND_SLOTS[suite].items():
        sp = f"{ptr}/operands/{slot}"
        if slot not in ops:
            raise InstanceValidationError(sp, "missing operand")
        if kind.endswith("*"):
            names = ops[slot]
            if not isinstance(names, list) or not names:
                raise InstanceValidationError(sp, "expected a nonempty list of names")
            resolved[slot] = [_resolve(inst, kind[:-1], n, f"{sp}/{i}") for i, n in enumerate(names)]
        else:
            resolved[slot] = _resolve(inst, kind, ops[slot], sp)
    for p in REQUIRED_PARAMS.get(suite, ()):
        if p not in params:
            raise InstanceValidationError(f"{ptr}/params/{p}", "missing parameter")
    _check_constraints(suite, resolved, params, inst, ptr)
    return Check(suite, dict(ops), dict(params))


def _check_constraints(suite: str, ops: dict, params: dict, inst: InstanceFile, ptr: str) -> None:
    elems = [e for k, e in ops.items() if isinstance(e, LatticeElement)]
    for lst in (v for v in ops.values() if isinstance(v, list)):
        elems.extend(lst)
    if suite in REAL_ONLY and inst.field is not ScalarField.REAL:
        raise InstanceValidationError(ptr + "/suite", f"{suite} needs the real field")
    if suite in POSITIVE_ONLY:
        for slot, e in ops.items():
            if not e.is_positive():
                raise InstanceValidationError(f"{ptr}/operands/{slot}", "operand must be in the positive cone")
    if "form" in ops:
        T = ops["form"]
        for slot in ("u", "v"):
            if ops[slot].dim != T.domain_dim:
                raise InstanceValidationError(f"{ptr}/operands/{slot}", f"dimension {ops[slot].dim} != form domain {T.domain_dim}")
        name = None
        for k, f in inst.forms.items():
            if f is T:
                name = k
        if name is not None and not inst.hermitian.get(name, True):
            raise InstanceValidationError(f"{ptr}/operands/form", "Cauchy-Schwarz checks need a form tagged Hermitian")
    elif "map" in ops:
        M = ops["map"]
        for i, e in enumerate(ops["elements"]):
            if e.dim != M.in_dim:
                raise InstanceValidationError(f"{ptr}/operands/elements/{i}", f"dimension {e.dim} != map input {M.in_dim}")
    elif elems:
        d = elems[0].dim
        for slot, e in ops.items():
            for x in e if isinstance(e, list) else [e]:
                if x.dim != d:
                    raise InstanceValidationError(f"{ptr}/operands/{slot}", "operands differ in dimension")
    try:
        _check_params(suite, ops, params)
    except InstanceValidationError as exc:
        raise InstanceValidationError(f"{ptr}/params", exc.message) from None
    except VlineqError as exc:
        raise InstanceValidationError(f"{ptr}/params", str(exc)) from None


def _check_params(suite: str, ops: dict, params: dict) -> None:
    if suite in ("weighted-gm", "maligranda", "hom-equality"):
        w = WeightVector(tuple(params["weights"]))
        if len(w) != len(ops["elements"]):
            raise InstanceValidationError("", "one weight per element required")
    elif suite == "holder":
        p = ExponentVector(tuple(params["exponents"]))
        if len(p) != len(ops["elements"]):
            raise InstanceValidationError("", "one exponent per element required")
    elif suite == "minkowski":
        p = params["p"]
        if not isinstance(p, (int, float)) or not p > 1 or not math.isfinite(p):
            raise InstanceValidationError("", "p must be a real number > 1")
    elif suite == "powers":
        r = params["r"]
        if not isinstance(r, (int, float)) or not r > 0 or not math.isfinite(r):
            raise InstanceValidationError("", "r must be a positive real")
    elif suite == "power-rules":
        for k in ("p", "q"):
            if not isinstance(params[k], (int, float)) or not params[k] > 0:
                raise InstanceValidationError("", f"{k} must be a positive real")


def save_instance(inst: InstanceFile, path: str | Path) -> None:
    Path(path).write_text(inst.to_json())


# generation


def parse_dims(text: str) -> tuple[int, int]:
    try:
        parts = [int(x) for x in text.split(",")]
    except ValueError:
        raise ValueError(f"dims must look like 'm,n', got {text!r}") from None
    if len(parts) != 2 or min(parts) < 1:
        raise ValueError(f"dims must be two positive integers, got {text!r}")
    return parts[0], parts[1]


def generate_instance(kind: str, dims: tuple[int, int], seed: int, field: ScalarField | str | None = None) -> InstanceFile:
    """Seeded random instance of ``kind`` with dimensions (m, n).

    psd-form: n Hermitian PSD m x m matrices B^* B and vectors u, v in K^m.
    positive-map / lattice-hom: an n x m map and three elements of R^m.
    positive-elements: n positive elements of R^m.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    m, n = dims
    if m < 1 or n < 1:
        raise ValueError("dims must be positive")
    rng = np.random.default_rng(seed)

    if kind == "psd-form":
        fld = ScalarField.parse(field or ScalarField.COMPLEX)
        T = random_psd_form(rng, m, n, fld)
        inst = InstanceFile(fld, forms={"T": T}, hermitian={"T": True})
        inst.elements["u"] = LatticeElement(fld, random_vector(rng, m, fld))
        inst.elements["v"] = LatticeElement(fld, random_vector(rng, m, fld))
        ops = {"form": "T", "u": "u", "v": "v"}
        inst.checks = [Check(s, dict(ops)) for s in ("cauchy-schwarz", "cs-corollary", "cs-equality")]
        return inst

    fld = ScalarField.parse(field or ScalarField.REAL)
    if kind == "positive-elements":
        if fld is not ScalarField.REAL:
            raise ValueError("positive elements live in the real field")
        count = max(n, 2)
        names = [f"a{k}" for k in range(1, count + 1)]
        inst = InstanceFile(fld)
        for name in names:
            inst.elements[name] = LatticeElement.real(rng.uniform(0.0, 10.0, m))
        f, g = names[0], names[1]
        w = _weights(rng, count)
        inst.checks = [
            Check("lattice-axioms", {"f": f, "g": g, "h": names[-1]}),
            Check("modulus", {"f": f}),
            Check("square-mean", {"f": f, "g": g}),
            Check("geometric-mean", {"f": f, "g": g}),
            Check("weighted-gm", {"elements": names}, {"weights": w}),
            Check("powers", {"a": f}, {"r": 2.5}),
            Check("power-rules", {"a": f}, {"p": 1.5, "q": math.pi}),
        ]
        return inst

    M = random_positive_map(rng, n, m) if kind == "positive-map" else random_lattice_homomorphism(rng, n, m)
    inst = InstanceFile(fld, maps={"M": M})
    names = ["f1", "f2", "f3"]
    for name in names:
        x = rng.standard_normal(m)
        if fld is ScalarField.COMPLEX:
            x = x + 1j * rng.standard_normal(m)
        inst.elements[name] = LatticeElement(fld, x)
    w = _weights(rng, 3)
    inst.checks = [Check("maligranda", {"map": "M", "elements": names}, {"weights": w})]
    if kind == "lattice-hom":
        inst.checks.append(Check("hom-equality", {"map": "M", "elements": names}, {"weights": w}))
    else:
        inst.checks.append(Check("holder", {"map": "M", "elements": names}, {"exponents": [2.0, 4.0, 4.0]}))
        inst.checks.append(Check("minkowski", {"map": "M", "elements": names}, {"p": 3.0}))
    return inst


def _weights(rng: np.random.Generator, n: int) -> list[float]:
    while True:
        w = rng.dirichlet(np.ones(n))
        if np.all(w > 0.05):
            w[-1] = 1.0 - math.fsum(w[:-1])
            return [float(x) for x in w]
