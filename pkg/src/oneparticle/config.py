"""Scenario configuration: YAML loading and construction of domain objects.

One YAML file per run. Complex scalars are written as [re, im] pairs, vectors
as lists of pairs, matrices as row-major lists of rows of pairs. Structural
problems (missing keys, unknown presets, malformed entries) raise ConfigError
and exit with code 2; semantic violations surface as the library's validation
errors and exit 3.
"""

from __future__ import annotations

import bisect
import hashlib
import math
from dataclasses import dataclass, field

import numpy as np
import yaml

from .dynamics import GKSLModel
from .moments import MomentState, make_moment_state
from .states import OneParticleState, from_excited_block, make_state, vacuum_state

SCENARIOS = ("simulate", "moments", "info", "bell-curve", "verify", "bench")


class ConfigError(Exception):
    """Malformed configuration file (maps to exit code 2)."""


def _require(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise ConfigError(f"{where}: missing required key '{key}'")
    return mapping[key]


def _as_mapping(obj, where: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(obj).__name__}")
    return obj


def parse_complex(entry, where: str) -> complex:
    if isinstance(entry, (int, float)):
        return complex(entry)
    if isinstance(entry, (list, tuple)) and len(entry) == 2:
        try:
            return complex(float(entry[0]), float(entry[1]))
        except (TypeError, ValueError):
            pass
    raise ConfigError(f"{where}: expected [re, im] pair or number, got {entry!r}")


def parse_vector(entries, where: str) -> np.ndarray:
    if not isinstance(entries, (list, tuple)):
        raise ConfigError(f"{where}: expected a list of [re, im] pairs")
    return np.array(
        [parse_complex(e, f"{where}[{k}]") for k, e in enumerate(entries)],
        dtype=np.complex128,
    )


def parse_matrix(rows, where: str) -> np.ndarray:
    if not isinstance(rows, (list, tuple)) or not rows:
        raise ConfigError(f"{where}: expected a list of rows")
    mat = [parse_vector(r, f"{where}[{k}]") for k, r in enumerate(rows)]
    width = {len(r) for r in mat}
    if len(width) != 1:
        raise ConfigError(f"{where}: rows have inconsistent lengths {sorted(width)}")
    return np.array(mat, dtype=np.complex128)


@dataclass(frozen=True)
class TimeGrid:
    start: float
    stop: float
    samples: int

    def points(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.samples)


def parse_time_grid(obj, where: str = "time") -> TimeGrid:
    m = _as_mapping(obj, where)
    start = float(m.get("start", 0.0))
    stop = float(_require(m, "stop", where))
    samples = int(_require(m, "samples", where))
    if samples < 2:
        raise ConfigError(f"{where}: need at least 2 samples, got {samples}")
    if not stop > start:
        raise ConfigError(f"{where}: grid must be strictly increasing (start {start}, stop {stop})")
    if start < 0:
        raise ConfigError(f"{where}: start must be nonnegative")
    return TimeGrid(start=start, stop=stop, samples=samples)


# ---------------------------------------------------------------------------
# rate functions and model coefficients


def _piecewise_constant(times, values, where: str):
    ts = [float(x) for x in times]
    if not ts or ts[0] != 0.0 or any(b <= a for a, b in zip(ts, ts[1:])):
        raise ConfigError(f"{where}: table times must start at 0 and increase")
    if len(values) != len(ts):
        raise ConfigError(f"{where}: {len(values)} values for {len(ts)} times")

    def lookup(t: float):
        return values[bisect.bisect_right(ts, t) - 1] if t >= 0 else values[0]

    lookup.breakpoints = tuple(ts[1:])  # integrations split at the jumps
    return lookup


def parse_rate(obj, where: str):
    """A nonnegative scalar rate: constant, named analytic preset, or table."""
    if isinstance(obj, (int, float)):
        return float(obj)
    m = _as_mapping(obj, where)
    if "table" in m:
        tbl = _as_mapping(m["table"], f"{where}.table")
        values = [float(v) for v in _require(tbl, "values", f"{where}.table")]
        return _piecewise_constant(_require(tbl, "times", f"{where}.table"), values, where)
    preset = _require(m, "preset", where)
    if preset == "constant":
        return float(_require(m, "value", where))
    if preset == "one-plus-sin":
        scale = float(m.get("scale", 1.0))
        return lambda t: scale * (1.0 + math.sin(t))
    raise ConfigError(f"{where}: unknown rate preset {preset!r}")


def parse_hamiltonian(obj, n: int, where: str = "model.hamiltonian"):
    if obj is None:
        return None
    m = _as_mapping(obj, where)
    if "matrix" in m:
        H = parse_matrix(m["matrix"], f"{where}.matrix")
        return H
    if "table" in m:
        tbl = _as_mapping(m["table"], f"{where}.table")
        mats = [
            parse_matrix(r, f"{where}.table.matrices[{k}]")
            for k, r in enumerate(_require(tbl, "matrices", f"{where}.table"))
        ]
        return _piecewise_constant(_require(tbl, "times", f"{where}.table"), mats, where)
    preset = _require(m, "preset", where)
    if preset == "zero":
        return None
    if preset == "diagonal":
        values = [float(v) for v in _require(m, "values", where)]
        if len(values) != n:
            raise ConfigError(f"{where}: {len(values)} diagonal values for n = {n}")
        return np.diag(values).astype(np.complex128)
    raise ConfigError(f"{where}: unknown hamiltonian preset {preset!r}")


def parse_model(obj, n: int, where: str = "model") -> GKSLModel:
    m = _as_mapping(obj, where)
    hamiltonian = parse_hamiltonian(m.get("hamiltonian"), n, f"{where}.hamiltonian")
    decay = m.get("decay")
    if decay is None:
        return GKSLModel(n, hamiltonian, None)
    d = _as_mapping(decay, f"{where}.decay")
    if "vectors" in d:
        vectors = np.array(
            [parse_vector(v, f"{where}.decay.vectors[{k}]") for k, v in enumerate(d["vectors"])]
        )
        if vectors.ndim != 2 or vectors.shape[1] != n:
            raise ConfigError(f"{where}.decay.vectors: shape {vectors.shape} does not match n = {n}")
        return GKSLModel(n, hamiltonian, vectors)
    if "table" in d:
        tbl = _as_mapping(d["table"], f"{where}.decay.table")
        tables = [
            np.array([parse_vector(v, f"{where}.decay.table") for v in entry])
            for entry in _require(tbl, "vectors", f"{where}.decay.table")
        ]
        lookup = _piecewise_constant(_require(tbl, "times", f"{where}.decay.table"), tables, where)
        return GKSLModel(n, hamiltonian, lookup)
    preset = _require(d, "preset", f"{where}.decay")
    if preset == "none":
        return GKSLModel(n, hamiltonian, None)
    if preset == "homogeneous":
        gamma = parse_rate(_require(d, "gamma", f"{where}.decay"), f"{where}.decay.gamma")
        return GKSLModel.homogeneous(n, gamma, hamiltonian)
    raise ConfigError(f"{where}.decay: unknown preset {preset!r}")


# ---------------------------------------------------------------------------
# initial data


def parse_initial_state(obj, n: int, where: str = "initial_state") -> OneParticleState:
    m = _as_mapping(obj, where)
    if "preset" in m:
        preset = m["preset"]
        if preset == "vacuum":
            return vacuum_state(n)
        if preset == "site":
            index = int(_require(m, "index", where))
            if not 1 <= index <= n:
                raise ConfigError(f"{where}: site index {index} outside 1..{n}")
            R = np.zeros((n, n), dtype=np.complex128)
            R[index - 1, index - 1] = 1.0
            return from_excited_block(R)
        if preset == "uniform-diagonal":
            return from_excited_block(np.eye(n, dtype=np.complex128) / n)
        raise ConfigError(f"{where}: unknown state preset {preset!r}")
    rho00 = float(m.get("rho00", 0.0))
    psi = parse_vector(m.get("psi", [[0.0, 0.0]] * n), f"{where}.psi")
    R = parse_matrix(_require(m, "R", where), f"{where}.R")
    return make_state(rho00, psi, R)


def parse_initial_moments(obj, n: int, statistics: str, where: str = "initial_moments") -> MomentState:
    m = _as_mapping(obj, where)
    if "preset" in m:
        preset = m["preset"]
        if preset == "fock":
            occ = [int(v) for v in _require(m, "occupations", where)]
            if len(occ) != n or any(o < 0 for o in occ):
                raise ConfigError(f"{where}: occupations {occ} incompatible with n = {n}")
            return make_moment_state(statistics, Y=np.diag([float(o) for o in occ]), n=n)
        if preset == "coherent":
            if statistics != "boson":
                raise ConfigError(f"{where}: coherent preset needs boson statistics")
            alpha = parse_vector(_require(m, "alpha", where), f"{where}.alpha")
            if alpha.shape != (n,):
                raise ConfigError(f"{where}.alpha: shape {alpha.shape} does not match n = {n}")
            return make_moment_state("boson", m=alpha, n=n)
        raise ConfigError(f"{where}: unknown moments preset {preset!r}")
    mm = parse_vector(m["m"], f"{where}.m") if "m" in m else None
    Y = parse_matrix(m["Y"], f"{where}.Y") if "Y" in m else None
    Z = parse_matrix(m["Z"], f"{where}.Z") if "Z" in m else None
    return make_moment_state(statistics, m=mm, Y=Y, Z=Z, n=n)


def parse_partition(obj, n: int, where: str = "partition") -> tuple[list[int], list[int]]:
    m = _as_mapping(obj, where)
    first = [int(i) for i in _require(m, "first", where)]
    second = [int(i) for i in _require(m, "second", where)]
    return first, second


def complex_to_pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def state_to_mapping(s: OneParticleState) -> dict:
    """Serialize a state into the config representation (row-major pairs)."""
    return {
        "rho00": float(s.rho00),
        "psi": [complex_to_pair(z) for z in s.psi],
        "R": [[complex_to_pair(z) for z in row] for row in s.R],
    }


# ---------------------------------------------------------------------------
# top-level scenario


@dataclass
class ScenarioConfig:
    scenario: str
    raw: dict = field(repr=False)
    sha256: str = ""
    n: int = 0
    seed: int | None = None

    def opt(self, key: str, default=None):
        return self.raw.get(key, default)


def load_config(path: str) -> ScenarioConfig:
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
        raw = yaml.safe_load(blob)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path!r}: {exc}") from exc
    raw = _as_mapping(raw, "config")
    scenario = _require(raw, "scenario", "config")
    if scenario not in SCENARIOS:
        raise ConfigError(f"config: scenario must be one of {SCENARIOS}, got {scenario!r}")
    n = int(raw.get("n", 0))
    seed = raw.get("seed")
    cfg = ScenarioConfig(
        scenario=scenario,
        raw=raw,
        sha256=hashlib.sha256(blob).hexdigest(),
        n=n,
        seed=None if seed is None else int(seed),
    )
    return cfg
