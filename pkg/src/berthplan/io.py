"""Configuration files, bundled data, and artifact writers.

All configuration is YAML with a ``kind`` discriminator (``ship``, ``port``,
``scenario``, ``study``).  Human-facing files use degrees for angles (keys
suffixed ``_deg``) and plain SI units otherwise; everything is converted to
radians/SI on load.  File references inside a configuration resolve
relative to the referencing file's directory, so the bundled set is
self-contained.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, fields, replace
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .geometry import Polygon, is_inside
from .ship import ShipParams
from .states import State, WindCondition
from .transcription import OcpSpec

__all__ = [
    "ConfigError", "ParseError", "PortConfig", "ScenarioConfig",
    "StudyConfig", "bundled_path", "load_ship", "load_port", "load_scenario",
    "load_study", "write_trajectory_csv", "TRAJECTORY_HEADER",
    "canonical_json", "sha256_hex", "spec_digest",
]


class ConfigError(ValueError):
    """A configuration file failed schema or invariant checks."""


class ParseError(ConfigError):
    """A configuration file is not readable as a document of its kind.

    Distinguished from :class:`ConfigError` so callers can report
    malformed files separately from structurally valid files with bad
    values.
    """


def bundled_path(name: str) -> Path:
    """Absolute path of a bundled data file."""
    return Path(str(resources.files("berthplan").joinpath("data", name)))


# ----------------------------------------------------------------------
# generic helpers
# ----------------------------------------------------------------------

def _read_mapping(path: Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: cannot read file ({exc})") from exc
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"{path}: not valid YAML ({exc})") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be a mapping")
    return doc


def _expect_kind(doc: dict, kind: str, path: Path) -> None:
    found = doc.get("kind")
    if found != kind:
        raise ParseError(f"{path}: expected kind '{kind}', found {found!r}")


def _get(doc: dict, key: str, path: Path, kind=None):
    if key not in doc:
        raise ConfigError(f"{path}: missing required key '{key}'")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise ConfigError(f"{path}: key '{key}' must be a "
                          f"{getattr(kind, '__name__', kind)}")
    return value


def _pair(value, path: Path, context: str):
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or not all(isinstance(v, (int, float)) for v in value)):
        raise ConfigError(f"{path}: {context} must be a pair of numbers")
    return float(value[0]), float(value[1])


def _resolve(ref: str, base: Path) -> Path:
    candidate = Path(ref)
    if not candidate.is_absolute():
        candidate = Path(base).parent / candidate
    return candidate


# ----------------------------------------------------------------------
# ship files
# ----------------------------------------------------------------------

_DEGREE_KEYS = {
    "delta_outboard_deg": "delta_outboard",
    "delta_inboard_deg": "delta_inboard",
    "delta_rate_deg": "delta_rate",
}


def load_ship(path) -> ShipParams:
    path = Path(path)
    doc = _read_mapping(path)
    _expect_kind(doc, "ship", path)
    raw = _get(doc, "parameters", path, dict)
    params = {}
    known = {f.name for f in fields(ShipParams)}
    for key, value in raw.items():
        if key in _DEGREE_KEYS:
            params[_DEGREE_KEYS[key]] = np.deg2rad(float(value))
        elif key in known:
            params[key] = int(value) if key == "n_strips" else float(value)
        else:
            raise ConfigError(f"{path}: unknown ship parameter '{key}'")
    try:
        ship = ShipParams(**params)
    except TypeError as exc:
        raise ConfigError(f"{path}: incomplete ship parameters ({exc})") from exc
    try:
        ship.validate()
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return ship


# ----------------------------------------------------------------------
# port files
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class PortConfig:
    """A basin polygon plus its berth annotations."""

    name: str
    polygon: Polygon
    berth_point: tuple
    berth_wall: tuple | None
    berth_pose: State


def load_port(path) -> PortConfig:
    path = Path(path)
    doc = _read_mapping(path)
    _expect_kind(doc, "port", path)
    ring = _get(doc, "boundary", path, list)
    if len(ring) < 4:
        raise ConfigError(f"{path}: boundary must list at least 4 vertices "
                          "(a closed ring repeats the first vertex last)")
    pts = [_pair(v, path, f"boundary vertex {i}") for i, v in enumerate(ring)]
    if pts[0] != pts[-1]:
        raise ConfigError(f"{path}: boundary ring is not closed "
                          "(first and last vertices differ)")
    try:
        polygon = Polygon(pts[:-1])
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    berth = _get(doc, "berth", path, dict)
    point = _pair(_get(berth, "point", path), path, "berth point")
    if not is_inside(point, polygon):
        raise ConfigError(f"{path}: berth point {point} is not strictly "
                          "inside the basin polygon")
    wall = berth.get("wall")
    if wall is not None:
        if not isinstance(wall, list) or len(wall) != 2:
            raise ConfigError(f"{path}: berth wall must list two vertices")
        wall = (_pair(wall[0], path, "berth wall start"),
                _pair(wall[1], path, "berth wall end"))
    pose = _get(berth, "pose_deg", path, list)
    if len(pose) != 3:
        raise ConfigError(f"{path}: berth pose_deg must be [x, y, heading]")
    pose_state = State(float(pose[0]), float(pose[1]),
                       float(np.deg2rad(float(pose[2]))), 0.0, 0.0, 0.0)
    return PortConfig(name=str(doc.get("name", path.stem)), polygon=polygon,
                      berth_point=point, berth_wall=wall,
                      berth_pose=pose_state)


# ----------------------------------------------------------------------
# scenario files
# ----------------------------------------------------------------------

_STATE_KEYS = ("x", "y", "psi_deg", "u", "v", "r")


def _state_from_mapping(doc: dict, path: Path, context: str) -> State:
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: {context} must be a mapping")
    unknown = set(doc) - set(_STATE_KEYS)
    if unknown:
        raise ConfigError(f"{path}: {context} has unknown keys {sorted(unknown)}")
    missing = set(_STATE_KEYS) - set(doc)
    if missing:
        raise ConfigError(f"{path}: {context} missing keys {sorted(missing)}")
    return State(float(doc["x"]), float(doc["y"]),
                 float(np.deg2rad(float(doc["psi_deg"]))),
                 float(doc["u"]), float(doc["v"]), float(doc["r"]))


@dataclass(frozen=True)
class ScenarioConfig:
    """A fully resolved planning scenario."""

    name: str
    description: str
    ship_file: Path
    port_file: Path
    port: PortConfig
    spec: OcpSpec


def load_scenario(path, ship_path=None, port_path=None,
                  overrides: dict | None = None) -> ScenarioConfig:
    """Load a scenario file into an :class:`OcpSpec`.

    ``ship_path``/``port_path`` replace the file's own references (used by
    command-line flags); ``overrides`` is a mapping of ``OcpSpec`` field
    names applied on top of the file's values.
    """
    path = Path(path)
    doc = _read_mapping(path)
    _expect_kind(doc, "scenario", path)
    ship_file = Path(ship_path) if ship_path else _resolve(
        _get(doc, "ship", path, str), path)
    port_file = Path(port_path) if port_path else _resolve(
        _get(doc, "port", path, str), path)
    ship = load_ship(ship_file)
    port = load_port(port_file)
    x0 = _state_from_mapping(_get(doc, "start", path), path, "start")
    xf = (_state_from_mapping(doc["goal"], path, "goal")
          if "goal" in doc else port.berth_pose)
    wind_doc = _get(doc, "wind", path, dict)
    wind = WindCondition(
        float(np.deg2rad(float(_get(wind_doc, "direction_deg", path)))),
        float(_get(wind_doc, "speed", path)))
    tf_bounds = _get(doc, "tf_bounds", path, list)
    fixed_np = doc.get("fixed_n_prop")
    spec_kwargs = dict(
        ship=ship, basin=port.polygon, x0=x0, xf=xf, wind=wind,
        n_segments=int(_get(doc, "segments", path)),
        substeps=int(doc.get("substeps", 4)),
        tf_bounds=(float(tf_bounds[0]), float(tf_bounds[1])),
        fixed_n_prop=None if fixed_np is None else float(fixed_np),
        speed_constraint=bool(doc.get("speed_constraint", True)),
        collision_constraint=bool(doc.get("collision_constraint", True)),
        collision_mode=str(doc.get("collision_mode", "smooth")),
        berth_point=port.berth_point,
        beta_softmin=float(doc.get("beta_softmin", 20.0)),
        objective_mode=str(doc.get("objective_mode", "product")),
    )
    try:
        spec = OcpSpec(**spec_kwargs)
        bounds_doc = doc.get("state_bounds")
        if bounds_doc is not None:
            if not isinstance(bounds_doc, dict):
                raise ConfigError(f"{path}: state_bounds must be a mapping")
            sb = spec.state_bounds.copy()
            for key, value in bounds_doc.items():
                if key not in _STATE_KEYS:
                    raise ConfigError(f"{path}: state_bounds has unknown "
                                      f"key '{key}'")
                lo, hi = _pair(value, path, f"state_bounds.{key}")
                idx = _STATE_KEYS.index(key)
                if key == "psi_deg":
                    lo, hi = np.deg2rad(lo), np.deg2rad(hi)
                sb[:, idx] = (lo, hi)
            spec = replace(spec, state_bounds=sb)
        if overrides:
            spec = replace(spec, **overrides)
        spec.validate()
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return ScenarioConfig(name=str(doc.get("name", path.stem)),
                          description=str(doc.get("description", "")),
                          ship_file=ship_file, port_file=port_file,
                          port=port, spec=spec)


# ----------------------------------------------------------------------
# study files
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class StudyConfig:
    """Feasibility-study settings plus the resolved scenario template."""

    name: str
    scenario: ScenarioConfig
    n_cases: int
    seed: int
    attempts: int


def load_study(path, overrides: dict | None = None) -> StudyConfig:
    path = Path(path)
    doc = _read_mapping(path)
    _expect_kind(doc, "study", path)
    scenario = load_scenario(_resolve(_get(doc, "scenario", path, str), path),
                             overrides=overrides)
    n_cases = int(_get(doc, "cases", path))
    seed = int(_get(doc, "seed", path))
    attempts = int(doc.get("attempts", 4))
    if n_cases < 1:
        raise ConfigError(f"{path}: cases must be at least 1")
    if not 1 <= attempts <= 4:
        raise ConfigError(f"{path}: attempts must lie in 1..4")
    return StudyConfig(name=str(doc.get("name", path.stem)),
                       scenario=scenario, n_cases=n_cases, seed=seed,
                       attempts=attempts)


# ----------------------------------------------------------------------
# artifact writers
# ----------------------------------------------------------------------

TRAJECTORY_HEADER = (
    "time_s,x_m,y_m,psi_deg,u_m_s,v_m_s,r_deg_s,"
    "delta_p_cmd_deg,delta_s_cmd_deg,n_p_cmd_rps,n_bt_cmd_rps,"
    "delta_p_deg,delta_s_deg,n_p_rps,n_bt_rps")


def write_trajectory_csv(path, times, states, commanded, actual) -> None:
    """Write a trajectory table (degrees for angles, 9 significant digits)."""
    times = np.asarray(times, dtype=float)
    states = np.asarray(states, dtype=float)
    commanded = np.asarray(commanded, dtype=float)
    actual = np.asarray(actual, dtype=float)
    deg = np.rad2deg
    table = np.column_stack([
        times, states[:, 0], states[:, 1], deg(states[:, 2]),
        states[:, 3], states[:, 4], deg(states[:, 5]),
        deg(commanded[:, 0]), deg(commanded[:, 1]),
        commanded[:, 2], commanded[:, 3],
        deg(actual[:, 0]), deg(actual[:, 1]), actual[:, 2], actual[:, 3]])
    np.savetxt(path, table, fmt="%.9g", delimiter=",",
               header=TRAJECTORY_HEADER, comments="")


def canonical_json(obj) -> str:
    """Deterministic JSON text (sorted keys, no whitespace, finite floats)."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      allow_nan=False)


def sha256_hex(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def spec_digest(spec: OcpSpec) -> str:
    """Content hash identifying a planning problem (not solver settings)."""
    payload = {
        "ship": spec.ship.as_dict(),
        "basin": np.asarray(spec.basin.vertices).tolist(),
        "x0": spec.x0.as_array().tolist(),
        "xf": spec.xf.as_array().tolist(),
        "wind": [spec.wind.gamma_t, spec.wind.speed],
        "n_segments": spec.n_segments,
        "substeps": spec.substeps,
        "tf_bounds": list(spec.tf_bounds),
        "fixed_n_prop": spec.fixed_n_prop,
        "speed_constraint": spec.speed_constraint,
        "collision_constraint": spec.collision_constraint,
        "collision_mode": spec.collision_mode,
        "coefficients": [list(spec.coefficients.lower),
                         list(spec.coefficients.upper)],
        "berth_point": list(spec.berth_point),
        "beta_softmin": spec.beta_softmin,
        "objective_mode": spec.objective_mode,
        "state_bounds": spec.state_bounds.tolist(),
    }
    return sha256_hex(canonical_json(payload))
