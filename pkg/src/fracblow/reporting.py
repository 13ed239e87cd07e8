"""Output manifests and flat field serialization."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .grid import Field, GridSpec

SCHEMA = "fracblow/1"


def constants_manifest(constants, b_result=None) -> dict:
    """Echo every constant used, with tolerances, for the run manifest."""
    out = {
        "A_hat": {"value": constants.a_bound, "source": constants.a_source},
        "C": {"value": constants.c_threshold},
        "D": {"value": constants.d_rate},
        "W_n": {"value": constants.w_mass, "error": constants.w_mass_error},
        "omega_n": {"value": constants.sphere},
    }
    if b_result is not None:
        out["B"] = {"value": b_result.value, "error": b_result.error}
    return out


def write_manifest(path: str | Path, kind: str, body: dict) -> Path:
    path = Path(path)
    payload = {"schema": SCHEMA, "kind": kind}
    payload.update(body)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_jsonify))
    return path


def _jsonify(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj)}")


def save_field(field: Field, basepath: str | Path) -> tuple[Path, Path]:
    """Flat .npy values plus a JSON sidecar describing the lattice."""
    base = Path(basepath)
    npy = base.with_suffix(".npy")
    meta = base.with_suffix(".json")
    np.save(npy, field.values)
    meta.write_text(json.dumps({
        "schema": SCHEMA, "kind": "field",
        "grid": {"n": field.grid.n, "L": field.grid.L, "N": field.grid.N},
        "values": npy.name,
    }, indent=2, sort_keys=True))
    return npy, meta


def load_field(basepath: str | Path) -> Field:
    base = Path(basepath)
    meta = json.loads(base.with_suffix(".json").read_text())
    g = meta["grid"]
    values = np.load(base.with_suffix(".npy"))
    return Field(GridSpec(n=g["n"], L=g["L"], N=g["N"]), values)
