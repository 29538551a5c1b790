"""Experiment configuration files.

INI layout with sections [problem] [mesh] [network] [loss] [train] [output].
Every key is typed and validated; unknown sections or keys are errors that
name the offending line.

    [problem]
    name = helmholtz_hom
    omega = 16pi
"""

import configparser
import dataclasses
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConfigError, DHNNError
from .network import ACTIVATIONS
from .problems import EXPERIMENTS, KINDS
from .trainer import TrainConfig

PROBLEMS = EXPERIMENTS + ("manufactured",)
_OMEGA = re.compile(r"^\s*([0-9]*\.?[0-9]*(?:[eE][-+]?[0-9]+)?)\s*\*?\s*(pi|π)\s*$")


def parse_omega(text):
    """'16pi', '2*pi', '16π' or a plain float."""
    text = str(text).strip()
    m = _OMEGA.match(text)
    if m:
        coef = m.group(1)
        return (float(coef) if coef else 1.0) * np.pi
    return float(text)


def _parse_bool(text):
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_int(text):
    val = float(text)
    if val != int(val):
        raise ValueError(f"not an integer: {text!r}")
    return int(val)


@dataclass
class ExperimentConfig:
    problem: str = "poisson_hom"
    omega: float = 2 * np.pi
    kind: str = "poisson"  # manufactured problems only
    seed: int = 0  # manufactured problems only
    n_elements: int = 4
    width: int = 10
    activation: str = "sigmoid"
    test_functions: int = 10
    quadrature_order: int = 30
    train: TrainConfig = field(default_factory=TrainConfig)
    output_dir: str = "runs/out"
    grid_size: int = 1001
    dump_system: bool = False
    save_params: bool = True
    name: str = ""

    def __post_init__(self):
        checks = [
            (self.problem in PROBLEMS, f"problem.name must be one of {PROBLEMS}"),
            (self.kind in KINDS, f"problem.kind must be one of {KINDS}"),
            (self.omega > 0, "problem.omega must be positive"),
            (self.n_elements >= 1, "mesh.n_elements must be >= 1"),
            (self.width >= 1, "network.width must be >= 1"),
            (self.activation in ACTIVATIONS, f"network.activation must be one of {ACTIVATIONS}"),
            (self.test_functions >= 1, "loss.test_functions must be >= 1"),
            (self.quadrature_order >= 1, "loss.quadrature_order must be >= 1"),
            (self.grid_size >= 2, "output.grid_size must be >= 2"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)


# section -> key -> (attribute, parser); "train." targets live on TrainConfig
_SCHEMA = {
    "problem": {
        "name": ("problem", str),
        "omega": ("omega", parse_omega),
        "kind": ("kind", str),
        "seed": ("seed", _parse_int),
    },
    "mesh": {"n_elements": ("n_elements", _parse_int)},
    "network": {
        "width": ("width", _parse_int),
        "activation": ("activation", str),
        "init": ("train.init_scheme", str),
        "c_init": ("train.c_init", float),
    },
    "loss": {
        "test_functions": ("test_functions", _parse_int),
        "quadrature_order": ("quadrature_order", _parse_int),
        "tau0": ("train.tau0", float),
        "beta": ("train.beta", float),
        "tau_update": ("train.tau_update", str),
        "tau_params": ("train.tau_params", str),
    },
    "train": {
        "alpha": ("train.alpha", float),
        "inner_iters": ("train.inner_iters", _parse_int),
        "max_outer": ("train.max_outer", _parse_int),
        "rho": ("train.rho", float),
        "rms_decay": ("train.rms_decay", float),
        "rms_eps": ("train.rms_eps", float),
        "solver": ("train.solver", str),
        "lstsq_cond": ("train.lstsq_cond", float),
        "regularization": ("train.regularization", float),
        "warm_start": ("train.warm_start", _parse_bool),
    },
    "output": {
        "directory": ("output_dir", str),
        "grid_size": ("grid_size", _parse_int),
        "dump_system": ("dump_system", _parse_bool),
        "save_params": ("save_params", _parse_bool),
    },
}


def _line_of(lines, section, key=None):
    current = None
    for no, raw in enumerate(lines, 1):
        s = raw.strip()
        if s.startswith("[") and s.endswith("]"):
            current = s[1:-1].strip().lower()
            if key is None and current == section:
                return no
        elif key is not None and current == section:
            if re.match(rf"^{re.escape(key)}\s*[=:]", s, flags=re.IGNORECASE):
                return no
    return "?"


def parse_config_text(text, source="<string>"):
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    lines = text.splitlines()
    top, train = {}, {}
    for section in parser.sections():
        sec = section.lower()
        if sec not in _SCHEMA:
            raise ConfigError(
                f"{source}:{_line_of(lines, sec)}: unknown section [{section}]; "
                f"expected one of {sorted(_SCHEMA)}"
            )
        for key, raw in parser.items(section):
            where = f"{source}:{_line_of(lines, sec, key)}"
            if key not in _SCHEMA[sec]:
                raise ConfigError(f"{where}: unknown key {key!r} in [{section}]")
            attr, conv = _SCHEMA[sec][key]
            try:
                val = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"{where}: bad value for {sec}.{key}: {exc}") from exc
            if attr.startswith("train."):
                train[attr[6:]] = val
            else:
                top[attr] = val
    try:
        tc = TrainConfig(**train)
        return ExperimentConfig(train=tc, name=Path(source).stem, **top)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    except (DHNNError, ValueError) as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def parse_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, str(path))


def _preset_dir():
    return resources.files("dhnn") / "presets"


def list_presets():
    return sorted(p.name[:-4] for p in _preset_dir().iterdir() if p.name.endswith(".ini"))


def preset_path(name):
    p = _preset_dir() / f"{name}.ini"
    if not p.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(list_presets())}")
    return Path(str(p))


def load_preset(name):
    return parse_config(preset_path(name))


def resolve_config(path_or_name):
    """A filesystem path, or the name of a shipped preset."""
    p = Path(path_or_name)
    if p.is_file():
        return parse_config(p)
    if p.suffix == "" and p.name == str(path_or_name):
        return load_preset(str(path_or_name))
    raise ConfigError(f"config file not found: {path_or_name}")


def to_text(cfg):
    """Serialize back to the INI layout (used for summaries and tests)."""
    tc = cfg.train
    get = {f.name: getattr(tc, f.name) for f in dataclasses.fields(tc)}
    out = []
    for sec, keys in _SCHEMA.items():
        out.append(f"[{sec}]")
        for key, (attr, _) in keys.items():
            val = get[attr[6:]] if attr.startswith("train.") else getattr(cfg, attr)
            out.append(f"{key} = {val!r}" if isinstance(val, float) else f"{key} = {val}")
        out.append("")
    return "\n".join(out)
