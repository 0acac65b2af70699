"""JSON (de)serialization of operators, Kraus sets and GKLS generators.

Schema
------
operator   ``{"dim": d, "entries": [[[re, im], ...], ...]}`` (row-major, d rows)
kraus      ``{"dim": d, "operators": [operator, ...]}``
gkls       ``{"dim": d, "hamiltonian": operator, "jumps": [operator, ...]}``

Floats are written with ``repr`` precision by :mod:`json`, so every binary64
value survives a round trip unchanged.
"""

from __future__ import annotations

import json

import numpy as np

from .superop import GklsGenerator, KrausSet, as_operator


def operator_to_json(a) -> dict:
    a = as_operator(a)
    rows = [[[float(z.real), float(z.imag)] for z in row] for row in a]
    return {"dim": a.shape[0], "entries": rows}


def operator_from_json(obj: dict) -> np.ndarray:
    try:
        d = int(obj["dim"])
        entries = obj["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"operator needs 'dim' and 'entries': {exc}") from None
    if d < 1 or len(entries) != d or any(len(row) != d for row in entries):
        raise ValueError(f"operator entries must be a {d}x{d} table of [re, im] pairs")
    out = np.empty((d, d), dtype=complex)
    for i, row in enumerate(entries):
        for j, pair in enumerate(row):
            if len(pair) != 2:
                raise ValueError(f"entry ({i}, {j}) is not a [re, im] pair")
            out[i, j] = complex(float(pair[0]), float(pair[1]))
    return as_operator(out)


def kraus_to_json(k: KrausSet) -> dict:
    return {"dim": k.dim, "operators": [operator_to_json(op) for op in k.operators]}


def kraus_from_json(obj: dict) -> KrausSet:
    ops = [operator_from_json(o) for o in obj.get("operators", [])]
    if "dim" in obj and any(op.shape[0] != int(obj["dim"]) for op in ops):
        raise ValueError("Kraus operator dimension disagrees with 'dim'")
    return KrausSet(tuple(ops))


def gkls_to_json(g: GklsGenerator) -> dict:
    return {
        "dim": g.dim,
        "hamiltonian": operator_to_json(g.hamiltonian),
        "jumps": [operator_to_json(j) for j in g.jumps],
    }


def gkls_from_json(obj: dict) -> GklsGenerator:
    h = operator_from_json(obj["hamiltonian"])
    jumps = tuple(operator_from_json(j) for j in obj.get("jumps", []))
    if "dim" in obj and h.shape[0] != int(obj["dim"]):
        raise ValueError("hamiltonian dimension disagrees with 'dim'")
    return GklsGenerator(h, jumps)


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=None, separators=(",", ":"))
