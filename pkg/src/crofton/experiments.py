"""Experiment configuration, result rows and CSV output.

Configs are flat TOML documents. Recognised keys::

    mode = "estimate"            # "estimate", "verify" or "convergence"
    design = "rotational"        # or "vertical"
    n = 3
    k = 2
    r = 1
    j = 0
    q = 0                        # optional, defaults to j
    body = "ball"                # "ball" (center, radius) or "box" (lower, upper)
    radius = 1.0
    center = [0.0, 0.0, 0.0]
    L0 = [[0.0, 0.0, 1.0]]       # basis vectors; default is the last r axes
    route = "generic"            # "volume", "projection" or "radial" where admissible
    outer_samples = 100000       # budget; convergence mode stops here
    inner_samples = 64
    chunk_size = 2048
    reference_radius = 1.0       # optional
    seed = 1
    id = "vertical-rotator"      # experiment id
    output = "results.csv"
    scale = 1.0                  # verify mode: budget multiplier
    checks = ["bp-linear-4-1-1-3"]   # verify mode: subset of the battery
"""
from __future__ import annotations

import csv
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10 only
    import tomli as tomllib

from .bodies import Ball, Box, ConvexBody
from .exceptions import DegenerateInputError, DomainError
from .estimators import ROUTES
from .validation import check_indices, check_subspace

MODES = ("estimate", "verify", "convergence")
CSV_COLUMNS = ("experiment_id", "mode", "n", "k", "r", "j", "q", "body", "mean", "stderr",
               "exact", "z", "samples", "seconds")
_KNOWN_KEYS = {"mode", "design", "n", "k", "r", "j", "q", "body", "radius", "center", "lower", "upper",
               "L0", "route", "outer_samples", "inner_samples", "chunk_size", "reference_radius", "seed",
               "id", "output", "scale", "checks"}


class ConfigError(DomainError):
    """A configuration document that cannot be run."""


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str
    design: str = "rotational"
    n: int = 3
    k: int = 2
    r: int = 1
    j: int = 0
    q: int = 0
    body: Optional[ConvexBody] = None
    body_tag: str = ""
    L0: Optional[list] = None
    route: str = "generic"
    outer_samples: int = 100_000
    inner_samples: int = 64
    chunk_size: int = 2048
    reference_radius: Optional[float] = None
    seed: int = 0
    experiment_id: str = "experiment"
    output: Optional[str] = None
    scale: float = 1.0
    checks: Optional[tuple] = None


def _int(doc: dict, key: str, default=None, minimum: int = 0) -> int:
    v = doc.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise ConfigError(f"config key '{key}' must be an integer >= {minimum}, got {v!r}")
    return v


def _vector(doc: dict, key: str, n: int, default=None) -> np.ndarray:
    v = doc.get(key, default)
    try:
        arr = np.asarray(v, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"config key '{key}' must be an array of numbers") from None
    if arr.shape != (n,):
        raise ConfigError(f"config key '{key}' must have {n} entries, got shape {arr.shape}")
    return arr


def _body(doc: dict, n: int) -> tuple[ConvexBody, str]:
    kind = doc.get("body", "ball")
    try:
        if kind == "ball":
            radius = float(doc.get("radius", 1.0))
            center = _vector(doc, "center", n, [0.0] * n)
            tag = f"ball(r={radius:g})" if not center.any() else f"ball(r={radius:g},c={center.tolist()})"
            return Ball(center, radius), tag
        if kind == "box":
            lower = _vector(doc, "lower", n)
            upper = _vector(doc, "upper", n)
            return Box(lower, upper), f"box({lower.tolist()},{upper.tolist()})"
    except DomainError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"config key 'body': {exc}") from None
    raise ConfigError(f"config key 'body' must be 'ball' or 'box', got {kind!r}")


def parse_config(text: str) -> ExperimentConfig:
    """Parse and fully validate a TOML experiment document."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {exc}") from None
    unknown = sorted(set(doc) - _KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    mode = doc.get("mode", "estimate")
    if mode not in MODES:
        raise ConfigError(f"config key 'mode' must be one of {MODES}, got {mode!r}")
    common = dict(mode=mode, seed=_int(doc, "seed", 0), experiment_id=str(doc.get("id", mode)),
                  output=doc.get("output"))
    if mode == "verify":
        scale = doc.get("scale", 1.0)
        if not isinstance(scale, (int, float)) or isinstance(scale, bool) or scale <= 0:
            raise ConfigError(f"config key 'scale' must be a positive number, got {scale!r}")
        checks = doc.get("checks")
        if checks is not None and (not isinstance(checks, list) or not all(isinstance(c, str) for c in checks)):
            raise ConfigError("config key 'checks' must be an array of check labels")
        return ExperimentConfig(scale=float(scale), checks=tuple(checks) if checks else None, **common)

    design = doc.get("design", "rotational")
    n = _int(doc, "n", None)
    k, r, j = _int(doc, "k", None), _int(doc, "r", None), _int(doc, "j", 0)
    q = _int(doc, "q", j)
    try:
        check_indices(design, n, k, r, j, q)
    except DomainError as exc:
        raise ConfigError(f"{exc} (mode={mode}/{design})") from None
    body, tag = _body(doc, n)
    L0 = doc.get("L0")
    if L0 is not None:
        try:
            check_subspace(L0, n, r)
        except (DomainError, DegenerateInputError, ValueError) as exc:
            raise ConfigError(f"config key 'L0' must hold {r} linearly independent vectors in R^{n}: {exc}") from None
    route = doc.get("route", "generic")
    if route not in ROUTES:
        raise ConfigError(f"config key 'route' must be one of {ROUTES}, got {route!r}")
    if design == "vertical" and route != "generic":
        raise ConfigError("config key 'route': the vertical design only has the generic route")
    if route in ("volume", "radial") and j != 0:
        raise ConfigError(f"config key 'route': the {route} route requires j = 0")
    if route == "projection" and q != j:
        raise ConfigError("config key 'route': the projection route requires q = j")
    R = doc.get("reference_radius")
    if R is not None and (not isinstance(R, (int, float)) or R < body.circumradius()):
        raise ConfigError(f"config key 'reference_radius' must be >= the body's circumradius {body.circumradius():g}")
    return ExperimentConfig(
        design=design, n=n, k=k, r=r, j=j, q=q, body=body, body_tag=tag, L0=L0, route=route,
        outer_samples=_int(doc, "outer_samples", 100_000, 2), inner_samples=_int(doc, "inner_samples", 64, 1),
        chunk_size=_int(doc, "chunk_size", 2048, 1),
        reference_radius=None if R is None else float(R), **common)


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


@dataclass(frozen=True)
class ResultRow:
    experiment_id: str
    mode: str
    n: Optional[int]
    k: Optional[int]
    r: Optional[int]
    j: Optional[int]
    q: Optional[int]
    body: str
    mean: float
    stderr: float
    exact: Optional[float]
    z: Optional[float]
    samples: int
    seconds: float
    passed: bool = True

    @classmethod
    def build(cls, *, exact: Optional[float], mean: float, stderr: float, **kw) -> "ResultRow":
        z = None
        if exact is not None:
            if stderr > 0:
                z = (mean - exact) / stderr
            elif mean == exact:
                z = 0.0
        return cls(mean=mean, stderr=stderr, exact=exact, z=z, **kw)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def emit_csv(rows: Sequence[ResultRow], path) -> None:
    """Write rows with the fixed header; floats keep 17 significant digits."""
    rows = list(rows)
    if not rows:
        raise DomainError("emit_csv needs at least one row")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        write_csv(rows, fh)


def write_csv(rows: Sequence[ResultRow], fh) -> None:
    writer = csv.writer(fh, lineterminator="\r\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(getattr(row, c)) for c in CSV_COLUMNS])


def read_csv(path) -> list[dict]:
    """Read a results file back, converting numeric columns."""
    ints = {"n", "k", "r", "j", "q", "samples"}
    floats = {"mean", "stderr", "exact", "z", "seconds"}
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            for key, val in rec.items():
                if val == "":
                    rec[key] = None
                elif key in ints:
                    rec[key] = int(val)
                elif key in floats:
                    rec[key] = float(val)
            out.append(rec)
    return out


def convergence_schedule(budget: int) -> list[int]:
    """Sample counts 10^3, 10^4, ... below ``budget``, ending at ``budget``."""
    counts = [10 ** e for e in range(3, int(math.log10(budget)) + 1) if 10 ** e < budget]
    return counts + [budget]


__all__ = ["ExperimentConfig", "ResultRow", "ConfigError", "parse_config", "load_config", "emit_csv",
           "write_csv", "read_csv", "convergence_schedule", "CSV_COLUMNS", "MODES"]
