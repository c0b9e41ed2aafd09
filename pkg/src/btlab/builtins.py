"""Named local fields, quadratic pairs and algebras, usable as ``@name`` on the command line."""

from __future__ import annotations

from .cyclic_algebra import CyclicAlgebraSpec, algebra_from_json
from .errors import SpecFormatError
from .quad_pair import QuadPair, pair_from_json
from .trunc_ring import LocalFieldSpec, spec_from_json

FIELDS = {
    "F2X": {"tag": "equal_char", "p": 2, "precision": 16},
    "F4X": {"tag": "equal_char", "p": 2, "n": 2, "res_poly": [1, 1, 1], "precision": 8},
    "F3X": {"tag": "equal_char", "p": 3, "precision": 10},
    "Q2": {"tag": "mixed_char", "p": 2, "precision": 16},
    "Q3": {"tag": "mixed_char", "p": 3, "precision": 10},
    "Q2_sqrt2": {"tag": "mixed_char", "p": 2, "e": 2, "eisenstein": [-2, 0], "precision": 8},
    "Q2_i": {"tag": "mixed_char", "p": 2, "e": 2, "eisenstein": [2, 2], "precision": 8},
    "Q2_cbrt2": {"tag": "mixed_char", "p": 2, "e": 3, "eisenstein": [-2, 0, 0], "precision": 5},
    "Q2_root4_2": {"tag": "mixed_char", "p": 2, "e": 4, "eisenstein": [-2, 0, 0, 0], "precision": 4},
}

PAIRS = {
    "dyadic_X1": {"kind": "ramified_dyadic", "base": "F2X", "alpha": [0, 1], "beta": [0, 1]},
    "dyadic_X2": {"kind": "ramified_dyadic", "base": "F2X", "alpha": [0, 0, 1], "beta": [0, 1]},
    "dyadic_X3": {"kind": "ramified_dyadic", "base": "F2X", "alpha": [0, 0, 0, 1], "beta": [0, 1]},
    "insep_F2X": {"kind": "inseparable", "base": "F2X"},
    "odd_F3X": {"kind": "ramified_odd", "base": "F3X", "beta": [0, 1]},
    "unram_F2X": {"kind": "unramified", "base": "F2X", "alpha": [1], "beta": [1]},
    "sqrt_m2_Q2": {"kind": "ramified_dyadic", "base": "Q2", "alpha": None, "beta": [0, 1]},
}

ALGEBRAS = {
    "quat_F2X": {"base": "F2X", "degree": 2, "hasse": 1},
    "quat_Q2": {"base": "Q2", "degree": 2, "hasse": 1},
    "cubic_F2X_1": {"base": "F2X", "degree": 3, "hasse": 1},
    "cubic_F2X_2": {"base": "F2X", "degree": 3, "hasse": 2},
}


def field(name: str) -> LocalFieldSpec:
    return spec_from_json(dict(FIELDS[name], name=name))


def _resolve_base(obj: dict) -> dict:
    base = obj.get("base")
    if isinstance(base, str):
        obj = dict(obj, base=resolve(base))
    return obj


def pair(name: str) -> QuadPair:
    return pair_from_json(_resolve_base(PAIRS[name]), name=name)


def algebra(name: str) -> CyclicAlgebraSpec:
    return algebra_from_json(_resolve_base(ALGEBRAS[name]), name=name)


def names():
    return sorted(FIELDS) + sorted(PAIRS) + sorted(ALGEBRAS)


def resolve(name: str):
    """Look up a builtin by name (with or without a leading '@')."""
    name = name[1:] if name.startswith("@") else name
    if name in FIELDS:
        return field(name)
    if name in PAIRS:
        return pair(name)
    if name in ALGEBRAS:
        return algebra(name)
    raise SpecFormatError(f"unknown builtin {name!r}; known: {', '.join(names())}")


def from_json(obj):
    """Parse a field, pair or algebra from its JSON object, or a builtin name."""
    if isinstance(obj, (LocalFieldSpec, QuadPair, CyclicAlgebraSpec)):
        return obj
    if isinstance(obj, str):
        return resolve(obj)
    if not isinstance(obj, dict):
        raise SpecFormatError(f"expected a JSON object, got {type(obj).__name__}")
    if "kind" in obj:
        return pair_from_json(_resolve_base(obj))
    if "degree" in obj:
        return algebra_from_json(_resolve_base(obj))
    if "tag" in obj:
        return spec_from_json(obj)
    raise SpecFormatError("cannot tell whether the object is a field, pair or algebra")
