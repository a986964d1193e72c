"""Experiment configuration: strict YAML schema, ${ENV_VAR} references, .env loading."""

import dataclasses
import hashlib
import json
import math
import os
import re
from dataclasses import dataclass
from pathlib import Path

import yaml
from dotenv import load_dotenv

from .errors import ConfigError
from .log import debug
from .summability import FAMILIES
from .testfunctions import get_test_function

ENV_REF = re.compile(r"\$\{([^}]+)\}")

# section -> key -> ExperimentConfig field
SCHEMA = {
    "multiplicity": {"dimension": "dimension", "kappa": "kappa"},
    "grid": {"radius": "radius", "points": "points", "radial_points": "radial_points"},
    "quadrature": {
        "jacobi_order": "jacobi_order",
        "translation_order": "translation_order",
        "sphere_points": "sphere_points",
    },
    "test_function": {"name": "test_function", "bump_radius": "bump_radius"},
    "kernel": {"family": "kernel_family", "param": "kernel_param", "R": "kernel_R"},
    "schedules": {"eps": "eps_schedule", "radii": "radius_count", "levels": "levels", "shifts": "shifts", "p": "p_values"},
    "output": {"dir": "output_dir"},
    "runtime": {"threads": "threads", "debug": "debug", "seed": "seed"},
}


@dataclass(frozen=True)
class ExperimentConfig:
    dimension: int = 1
    kappa: tuple = (0.5,)
    radius: float = 12.0
    points: int = 96
    radial_points: int = 256
    jacobi_order: int = 64
    translation_order: int = 64
    sphere_points: int = 32
    test_function: str = "gauss"
    bump_radius: float = 1.0
    kernel_family: str = "heat"
    kernel_param: float = 0.5
    kernel_R: float = 1.0
    eps_schedule: tuple = (1.0, 0.5, 0.25, 0.1, 0.05, 0.02)
    radius_count: int = 40
    levels: tuple = None
    shifts: tuple = ((0.5,), (1.0,), (2.0,))
    p_values: tuple = (1.0, 2.0, math.inf)
    output_dir: str = "results"
    threads: int = None
    debug: bool = False
    seed: int = 0

    def to_dict(self):
        """Nested sections, JSON-safe (infinite exponents become "inf")."""
        out = {}
        for section, keys in SCHEMA.items():
            out[section] = {key: _plain(getattr(self, name)) for key, name in keys.items()}
        return out

    @classmethod
    def from_dict(cls, data, lines=None):
        return _build(data, lines or {})

    def config_hash(self):
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()

    def with_overrides(self, **changes):
        return _validate(self, {name: (value, None) for name, value in changes.items()})


def _plain(value):
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    if isinstance(value, float) and math.isinf(value):
        return "inf"
    return value


def resolve_env_ref(value, line=None):
    """Resolve ${ENV_VAR} references; an unset variable is a config error."""
    if not isinstance(value, str):
        return value

    def replacer(match):
        name = match.group(1)
        env_val = os.environ.get(name)
        if env_val is None:
            raise ConfigError(f"environment variable '{name}' is not set", line)
        return env_val

    return ENV_REF.sub(replacer, value)


def _resolve_tree(value, lines, path=()):
    if isinstance(value, dict):
        return {k: _resolve_tree(v, lines, path + (k,)) for k, v in value.items()}
    if isinstance(value, list):
        return [_resolve_tree(v, lines, path) for v in value]
    if isinstance(value, str) and ENV_REF.search(value):
        resolved = resolve_env_ref(value, lines.get(path))
        # Substituted strings are re-read as YAML scalars so numbers stay numbers.
        try:
            return yaml.safe_load(resolved)
        except yaml.YAMLError:
            return resolved
    return value


def _key_lines(node, path=(), out=None):
    """Map key paths to 1-based line numbers from a composed YAML node."""
    out = {} if out is None else out
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            key = key_node.value
            out[path + (key,)] = key_node.start_mark.line + 1
            _key_lines(value_node, path + (key,), out)
    return out


def _as_int(value, what, line, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{what} must be an integer, got {value!r}", line)
    if minimum is not None and value < minimum:
        raise ConfigError(f"{what} must be >= {minimum}, got {value}", line)
    return value


def _as_float(value, what, line, positive=False):
    if isinstance(value, str) and value.strip().lower() in ("inf", ".inf", "infinity"):
        value = math.inf
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{what} must be a number, got {value!r}", line)
    value = float(value)
    if positive and not value > 0:
        raise ConfigError(f"{what} must be positive, got {value}", line)
    return value


def _as_list(value, what, line):
    if not isinstance(value, (list, tuple)):
        raise ConfigError(f"{what} must be a list, got {value!r}", line)
    return list(value)


def _build(data, lines):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("top level of the config must be a mapping", 1)
    fields = {}
    for section, body in data.items():
        line = lines.get((section,))
        if section not in SCHEMA:
            raise ConfigError(f"unknown section '{section}'; expected one of {', '.join(SCHEMA)}", line)
        if body is None:
            continue
        if not isinstance(body, dict):
            raise ConfigError(f"section '{section}' must be a mapping", line)
        for key, value in body.items():
            if key not in SCHEMA[section]:
                raise ConfigError(
                    f"unknown key '{section}.{key}'; expected one of {', '.join(SCHEMA[section])}",
                    lines.get((section, key)),
                )
            fields[SCHEMA[section][key]] = (value, lines.get((section, key)))
    return _validate(ExperimentConfig(), fields)


def _validate(cfg, fields=None):
    """Coerce and check raw (value, line) pairs on top of `cfg`."""
    if fields is None:
        fields = {f.name: (getattr(cfg, f.name), None) for f in dataclasses.fields(cfg)}
    changes = {}

    def take(name, convert):
        if name in fields:
            value, line = fields[name]
            changes[name] = convert(value, line)

    take("kappa", lambda v, ln: tuple(_as_float(k, "kappa entry", ln) for k in _as_list(v, "multiplicity.kappa", ln)))
    take("dimension", lambda v, ln: _as_int(v, "multiplicity.dimension", ln, 1))
    take("radius", lambda v, ln: _as_float(v, "grid.radius", ln, positive=True))
    take("points", lambda v, ln: _as_int(v, "grid.points", ln, 2))
    take("radial_points", lambda v, ln: _as_int(v, "grid.radial_points", ln, 2))
    take("jacobi_order", lambda v, ln: _as_int(v, "quadrature.jacobi_order", ln, 1))
    take("translation_order", lambda v, ln: _as_int(v, "quadrature.translation_order", ln, 1))
    take("sphere_points", lambda v, ln: _as_int(v, "quadrature.sphere_points", ln, 1))
    take("test_function", lambda v, ln: _check_function(v, ln))
    take("bump_radius", lambda v, ln: _as_float(v, "test_function.bump_radius", ln, positive=True))
    take("kernel_family", lambda v, ln: _check_family(v, ln))
    take("kernel_param", lambda v, ln: _as_float(v, "kernel.param", ln))
    take("kernel_R", lambda v, ln: _as_float(v, "kernel.R", ln, positive=True))
    take(
        "eps_schedule",
        lambda v, ln: tuple(_as_float(e, "schedules.eps entry", ln, positive=True) for e in _as_list(v, "schedules.eps", ln)),
    )
    take("radius_count", lambda v, ln: _as_int(v, "schedules.radii", ln, 1))
    take(
        "levels",
        lambda v, ln: None
        if v is None
        else tuple(_as_float(a, "schedules.levels entry", ln, positive=True) for a in _as_list(v, "schedules.levels", ln)),
    )
    take("shifts", lambda v, ln: tuple(_shift(s, ln) for s in _as_list(v, "schedules.shifts", ln)))
    take("p_values", lambda v, ln: tuple(_exponent(p, ln) for p in _as_list(v, "schedules.p", ln)))
    take("output_dir", lambda v, ln: str(v))
    take("threads", lambda v, ln: None if v is None else _as_int(v, "runtime.threads", ln, 1))
    take("debug", lambda v, ln: _as_bool(v, ln))
    take("seed", lambda v, ln: _as_int(v, "runtime.seed", ln, 0))
    cfg = dataclasses.replace(cfg, **changes)

    kappa_line = fields.get("kappa", (None, None))[1]
    if any(k < 0 for k in cfg.kappa):
        raise ConfigError(f"kappa entries must be >= 0, got {list(cfg.kappa)}", kappa_line)
    if "kappa" in fields and "dimension" not in fields:
        cfg = dataclasses.replace(cfg, dimension=len(cfg.kappa))
    elif len(cfg.kappa) != cfg.dimension:
        line = fields.get("dimension", (None, kappa_line))[1]
        raise ConfigError(f"dimension {cfg.dimension} does not match {len(cfg.kappa)} kappa entries", line)
    d = cfg.dimension
    if "shifts" not in fields and any(len(s) != d for s in cfg.shifts):
        cfg = dataclasses.replace(cfg, shifts=tuple((s[0],) + (0.0,) * (d - 1) for s in cfg.shifts))
    for shift in cfg.shifts:
        if len(shift) != cfg.dimension:
            raise ConfigError(f"shift {list(shift)} does not have {cfg.dimension} coordinates", fields.get("shifts", (None, None))[1])
    return cfg


def _check_function(value, line):
    try:
        get_test_function(value)
    except ValueError as e:
        raise ConfigError(str(e), line) from e
    return value


def _check_family(value, line):
    if value not in FAMILIES:
        raise ConfigError(f"unknown kernel family {value!r}; expected one of {', '.join(FAMILIES)}", line)
    return value


def _shift(value, line):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return (float(value),)
    return tuple(_as_float(c, "shift coordinate", line) for c in _as_list(value, "schedules.shifts entry", line))


def _exponent(value, line):
    p = _as_float(value, "schedules.p entry", line)
    if p < 1:
        raise ConfigError(f"L^p exponents must be >= 1, got {p}", line)
    return p


def _as_bool(value, line):
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.strip().lower() in ("true", "false", "1", "0", "yes", "no"):
        return value.strip().lower() in ("true", "1", "yes")
    raise ConfigError(f"runtime.debug must be a boolean, got {value!r}", line)


def load_config(path=None, env_file=None):
    """Read a YAML config (None gives the defaults), after loading `.env`.

    Environment fallbacks: DUNKLKIT_THREADS for runtime.threads and DEBUG for
    runtime.debug, used only when the file leaves them unset.
    """
    load_dotenv(env_file or Path.cwd() / ".env")
    data, lines = {}, {}
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as e:
            raise ConfigError(f"cannot read {path}: {e}") from e
        try:
            lines = _key_lines(yaml.compose(text))
            data = yaml.safe_load(text)
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            raise ConfigError(f"invalid YAML: {getattr(e, 'problem', e)}", None if mark is None else mark.line + 1) from e
        data = _resolve_tree(data, lines)
        debug("Config", f"loaded {path}")
    cfg = _build(data, lines)
    runtime = (data or {}).get("runtime") or {}
    env_threads = os.environ.get("DUNKLKIT_THREADS", "").strip()
    if "threads" not in runtime and env_threads:
        if not env_threads.isdigit() or int(env_threads) < 1:
            raise ConfigError(f"DUNKLKIT_THREADS must be a positive integer, got {env_threads!r}")
        cfg = dataclasses.replace(cfg, threads=int(env_threads))
    if "debug" not in runtime and os.environ.get("DEBUG", "").strip():
        cfg = dataclasses.replace(cfg, debug=os.environ["DEBUG"].strip().lower() in ("1", "true", "yes", "on"))
    return cfg
