"""Spec files, JSON reports and CSV sample output."""

from __future__ import annotations

import hashlib
import json
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InputError, TreeKummerError
from .tk import SampleMatrix, TkDistribution, tk_from_json
from .transform import ParamMatrix, param_matrix_from_json
from .trees import Tree, tree_from_json

FIXTURES = ("chain3", "daisy")


def load_json(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def fixture(name: str) -> dict:
    """One of the shipped specs: ``chain3`` or ``daisy``."""
    if name not in FIXTURES:
        raise KeyError(name)
    return json.loads(resources.files("treekummer.data").joinpath(f"{name}.json").read_text())


def parse_tree(obj: dict) -> Tree:
    """Accept either a bare tree spec or any spec with a ``"tree"`` field."""
    if isinstance(obj, dict) and "tree" in obj:
        obj = obj["tree"]
    return tree_from_json(obj)


def parse_param_matrix(obj: dict) -> ParamMatrix:
    return param_matrix_from_json(parse_tree(obj), obj)


def parse_tk(obj: dict) -> TkDistribution:
    try:
        return tk_from_json(obj)
    except TreeKummerError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise InputError(f"malformed TK spec: {exc}") from exc


def spec_hash(obj) -> str:
    canonical = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def report(command: str, spec, seed: int | None, result: dict) -> dict:
    """Wrap a result with provenance: tool version, spec hash and seed."""
    return {
        "tool": "treekummer",
        "version": __version__,
        "command": command,
        "spec_hash": None if spec is None else spec_hash(spec),
        "seed": seed,
        "result": _plain(result),
    }


def dumps(obj) -> str:
    return json.dumps(_plain(obj), indent=2) + "\n"


def write_samples_csv(path: str | Path, sample: SampleMatrix, meta: dict) -> Path:
    """Write ``sample`` as CSV (header = vertex ids) plus ``<stem>.meta.json``."""
    path = Path(path)
    header = ",".join(str(j) for j in range(sample.shape[1]))
    rows = "\n".join(",".join(repr(float(v)) for v in row) for row in sample.data)
    path.write_text(header + "\n" + rows + "\n")
    sidecar = path.with_name(path.stem + ".meta.json")
    sidecar.write_text(dumps(meta))
    return sidecar


def read_samples_csv(path: str | Path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
