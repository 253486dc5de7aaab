"""JSON files for state sets and protocol trees.

Complex numbers are written as [re, im] pairs.  Parse failures raise
``FormatError`` carrying a JSON-path-like location.
"""

import dataclasses
import json
import math

import numpy as np

from .measurements import LocalPOVM, MeasurementError, as_party, validate_povm
from .protocol import Leaf, Node, ProtocolError, ProtocolTree
from .states import StateError, StateSet


class FormatError(ValueError):
    def __init__(self, where, msg):
        super().__init__(f"{where}: {msg}")
        self.where = where


def _enc_complex(z):
    return [float(z.real), float(z.imag)]


def encode_matrix(m):
    return [[_enc_complex(z) for z in row] for row in np.asarray(m)]


def _dec_complex(x, where):
    if not (isinstance(x, list) and len(x) == 2):
        raise FormatError(where, "complex entries are [re, im] pairs")
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
        raise FormatError(where, "complex parts must be numbers")
    if not all(math.isfinite(v) for v in x):
        raise FormatError(where, "non-finite entry")
    return complex(x[0], x[1])


def decode_matrix(rows, where, shape=None):
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise FormatError(where, "expected a non-empty list of rows")
    width = len(rows[0])
    out = np.empty((len(rows), width), dtype=np.complex128)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise FormatError(f"{where}[{i}]", f"row of length {len(row)}, expected {width}")
        for j, x in enumerate(row):
            out[i, j] = _dec_complex(x, f"{where}[{i}][{j}]")
    if shape is not None and out.shape != tuple(shape):
        raise FormatError(where, f"shape {out.shape}, expected {tuple(shape)}")
    return out


# --- state sets ---------------------------------------------------------------


def state_set_to_dict(states):
    d = {"dims": list(states.dims), "states": [encode_matrix(c) for c in states.states]}
    if states.labels is not None:
        d["labels"] = list(states.labels)
    return d


def state_set_from_dict(d):
    if not isinstance(d, dict):
        raise FormatError("$", "expected an object")
    for key in ("dims", "states"):
        if key not in d:
            raise FormatError("$", f"missing key {key!r}")
    dims = d["dims"]
    if not (isinstance(dims, list) and len(dims) == 2 and all(isinstance(x, int) and x > 0 for x in dims)):
        raise FormatError("$.dims", "expected [m, n] with positive integers")
    if not isinstance(d["states"], list) or not d["states"]:
        raise FormatError("$.states", "expected a non-empty list")
    mats = [decode_matrix(c, f"$.states[{i}]", dims) for i, c in enumerate(d["states"])]
    labels = d.get("labels")
    if labels is not None and (not isinstance(labels, list) or len(labels) != len(mats)):
        raise FormatError("$.labels", "one label per state")
    try:
        return StateSet(np.array(mats), labels)
    except StateError as e:
        raise FormatError("$.states", str(e)) from e


# --- protocols --------------------------------------------------------------


def _node_to_dict(node):
    if isinstance(node, Leaf):
        return {"leaf": node.claim}
    m = node.measurement
    return {
        "party": m.party.value,
        "kraus_matrices": [encode_matrix(k) for k in m.elements],
        "children": [_node_to_dict(ch) for ch in node.children],
    }


def protocol_to_dict(tree):
    return {"dims": list(tree.dims), "root": _node_to_dict(tree.root)}


def _node_from_dict(d, where, dims):
    if not isinstance(d, dict):
        raise FormatError(where, "expected an object")
    if "leaf" in d:
        claim = d["leaf"]
        if claim is not None and (not isinstance(claim, int) or isinstance(claim, bool) or claim < 0):
            raise FormatError(f"{where}.leaf", "expected a non-negative index or null")
        return Leaf(claim)
    for key in ("party", "kraus_matrices", "children"):
        if key not in d:
            raise FormatError(where, f"missing key {key!r}")
    try:
        party = as_party(d["party"])
    except (ValueError, KeyError) as e:
        raise FormatError(f"{where}.party", str(e)) from e
    dim = dims[party.axis]
    if not isinstance(d["kraus_matrices"], list) or not d["kraus_matrices"]:
        raise FormatError(f"{where}.kraus_matrices", "expected a non-empty list")
    ks = [decode_matrix(k, f"{where}.kraus_matrices[{i}]", (dim, dim))
          for i, k in enumerate(d["kraus_matrices"])]
    povm = LocalPOVM(party, ks)
    problems = validate_povm(povm)
    if problems:
        raise FormatError(f"{where}.kraus_matrices", f"not a measurement: {problems[0]}")
    ch = d["children"]
    if not isinstance(ch, list) or len(ch) != len(ks):
        raise FormatError(f"{where}.children", f"expected {len(ks)} children")
    return Node(povm, [_node_from_dict(c, f"{where}.children[{i}]", dims) for i, c in enumerate(ch)])


def protocol_from_dict(d):
    if not isinstance(d, dict) or "root" not in d or "dims" not in d:
        raise FormatError("$", "expected an object with 'dims' and 'root'")
    dims = d["dims"]
    if not (isinstance(dims, list) and len(dims) == 2 and all(isinstance(x, int) and x > 0 for x in dims)):
        raise FormatError("$.dims", "expected [m, n] with positive integers")
    try:
        return ProtocolTree(_node_from_dict(d["root"], "$.root", dims), tuple(dims))
    except (ProtocolError, MeasurementError) as e:
        raise FormatError("$.root", str(e)) from e


# --- files --------------------------------------------------------------------


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}:{e.lineno}:{e.colno}", e.msg) from e
    except OSError as e:
        raise FormatError(str(path), e.strerror or str(e)) from e


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=1)


def write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj) + "\n")


def load_state_set(path):
    return state_set_from_dict(_read_json(path))


def load_protocol(path):
    return protocol_from_dict(_read_json(path))


def save_state_set(path, states):
    write_json(path, state_set_to_dict(states))


def save_protocol(path, tree):
    write_json(path, protocol_to_dict(tree))


# --- family parameters ----------------------------------------------------


def _enc_value(v):
    if isinstance(v, np.ndarray) or isinstance(v, (list, tuple)):
        arr = np.asarray(v)
        if np.iscomplexobj(arr):
            return [_enc_complex(z) for z in arr.ravel()]
        return [float(x) for x in arr.ravel()]
    if isinstance(v, complex) or np.iscomplexobj(v):
        return _enc_complex(complex(v))
    return float(v)


def params_to_dict(params):
    return {f.name: _enc_value(getattr(params, f.name)) for f in dataclasses.fields(params)}


def _dec_value(x, where):
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return x
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return _dec_complex(x, where)
    if isinstance(x, list):
        return np.array([_dec_value(v, f"{where}[{i}]") for i, v in enumerate(x)])
    raise FormatError(where, "expected a number, [re, im] or a list of them")


def params_from_dict(cls, d):
    """Build a parameter dataclass; [re, im] pairs and lists of them become complex values."""
    if not isinstance(d, dict):
        raise FormatError("$", "expected an object")
    names = [f.name for f in dataclasses.fields(cls)]
    unknown = sorted(set(d) - set(names))
    if unknown:
        raise FormatError("$", f"unknown parameter(s) {unknown}; expected {names}")
    kw = {k: _dec_value(v, f"$.{k}") for k, v in d.items()}
    try:
        return cls(**kw)
    except TypeError as e:
        raise FormatError("$", str(e)) from e
