"""Experiment configuration: parsing, validation, hashing, and presets.

Config files are keyed, sectioned plain text (INI style, '#' comments):

    # [problem] names the benchmark and its structural fields.
    [problem]
    name = staircase        # staircase | airy_regression | reglq |
                            # phase_retrieval | mlp
    dim = 4
    data_seed = 0           # seeds the frozen problem data
    init = default          # default | zeros | constant V |
                            # gaussian MEAN STD | explicit V1 V2 ...

    # [run] controls the grid and the artifacts.
    [run]
    seeds = 0 1 2           # one replicate per seed; all algorithms in a
                            # replicate share its initial point
    max_steps = 2000        # or, for dataset-backed problems: epochs = N
    record_every = 1
    output = runs           # base artifact directory (env override wins)

    # [optimizer] holds hyperparameters shared by every algorithm.
    [optimizer]
    mode = practical        # practical | theory
    eta = 0.1
    t_thres = 10
    g_thres = 0.01
    r = 0.04
    momentum = 0.5
    h = 0.04
    t_count = 200

    # One [algorithm NAME] section per run; keys override [optimizer].
    [algorithm gd]
    [algorithm pgdot]

parse_config() validates everything it can and reports all problems at
once rather than stopping at the first.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import math
from dataclasses import dataclass, field, fields
from typing import Optional

from ..benchmarks import PROBLEM_NAMES
from ..optimizers import ALGORITHMS, AlgoConfig

INIT_STYLES = ("default", "zeros", "constant", "gaussian", "explicit")
OUTPUT_ENV_VAR = "OTGRAD_OUT"


class ConfigError(ValueError):
    """Carries every validation error found in one parse."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid config:\n  " + "\n  ".join(self.errors))


@dataclass
class ExperimentConfig:
    problem_name: str
    problem_options: dict
    data_seed: int
    init: tuple
    seeds: list
    max_steps: Optional[int]
    epochs: Optional[int]
    batch_size: Optional[int]
    record_every: int
    output: str
    threshold: Optional[float]
    classify_eps: float
    classify_rho: float
    algorithms: list = field(default_factory=list)
    config_hash: str = ""


# key -> (type, constraint, description); constraint is checked after typing
_POSITIVE = ("positive", lambda v: v > 0)
_NONNEG = ("nonnegative", lambda v: v >= 0)
_GE1 = (">= 1", lambda v: v >= 1)
_ANY = ("", lambda v: True)
_UNIT = ("in [0, 1)", lambda v: 0.0 <= v < 1.0)
_FRACTION = ("in (0, 1]", lambda v: 0.0 < v <= 1.0)

_PROBLEM_KEYS = {
    "name": (str, _ANY),
    "data_seed": (int, _NONNEG),
    "init": (str, _ANY),
    "dim": (int, _GE1),
    "n_plateaus": (int, _GE1),
    "length": (float, _POSITIVE),
    "n_terms": (int, _GE1),
    "n_measurements": (int, _GE1),
    "n_hidden": (int, _GE1),
    "dataset": (str, _ANY),
    "data_path": (str, _ANY),
    "n_samples": (int, _GE1),
    "activation": (str, _ANY),
    "init_mean": (float, _ANY),
    "init_std": (float, _POSITIVE),
}

_PROBLEM_SPECIFIC = {
    "staircase": {"dim", "n_plateaus", "length"},
    "airy_regression": set(),
    "reglq": {"n_terms"},
    "phase_retrieval": {"dim", "n_measurements"},
    "mlp": {"n_hidden", "dataset", "data_path", "n_samples", "activation",
            "init_mean", "init_std"},
}

_RUN_KEYS = {
    "seeds": ("ints", _ANY),
    "max_steps": (int, _GE1),
    "epochs": (int, _GE1),
    "batch_size": (int, _GE1),
    "record_every": (int, _GE1),
    "output": (str, _ANY),
    "threshold": (float, _ANY),
    "classify_eps": (float, _POSITIVE),
    "classify_rho": (float, _POSITIVE),
}

_ALGO_KEYS = {
    "mode": (str, _ANY),
    "eta": (float, _POSITIVE),
    "t_thres": (int, _GE1),
    "g_thres": (float, _POSITIVE),
    "r": (float, _POSITIVE),
    "momentum": (float, _UNIT),
    "h": (float, _POSITIVE),
    "t_count": (int, _GE1),
    "alpha": (float, _NONNEG),
    "ell": (float, _POSITIVE),
    "rho": (float, _POSITIVE),
    "eps": (float, _POSITIVE),
    "c": (float, _POSITIVE),
    "delta": (float, _FRACTION),
    "delta_f": (float, _POSITIVE),
    "reset_velocity_on_perturb": (bool, _ANY),
    "full_grad_gate": (bool, _ANY),
}

_BOOL_WORDS = {"true": True, "false": False, "yes": True, "no": False,
               "1": True, "0": False, "on": True, "off": False}


def _convert(section: str, key: str, raw: str, kind, errors: list):
    raw = raw.strip()
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind is bool:
            word = raw.lower()
            if word not in _BOOL_WORDS:
                raise ValueError
            return _BOOL_WORDS[word]
        if kind == "ints":
            parts = raw.replace(",", " ").split()
            if not parts:
                raise ValueError
            return [int(p) for p in parts]
        return raw
    except ValueError:
        wanted = kind if isinstance(kind, str) else kind.__name__
        errors.append(f"[{section}] {key}: expected {wanted}, got {raw!r}")
        return None


def _read_section(parser, section: str, keytable: dict, errors: list) -> dict:
    out = {}
    if not parser.has_section(section):
        return out
    for key, raw in parser.items(section):
        if key not in keytable:
            errors.append(f"[{section}] unknown key {key!r}")
            continue
        kind, (label, check) = keytable[key]
        value = _convert(section, key, raw, kind, errors)
        if value is None:
            continue
        bad = (not check(value)) if not isinstance(value, list) else any(not check(v) for v in value)
        if bad:
            errors.append(f"[{section}] {key}: must be {label}, got {raw!r}")
            continue
        out[key] = value
    return out


def _parse_init(raw: str, errors: list):
    tokens = raw.split()
    style = tokens[0] if tokens else ""
    if style not in INIT_STYLES:
        errors.append(f"[problem] init: unknown style {style!r}, expected one of {INIT_STYLES}")
        return ("default",)
    try:
        if style in ("default", "zeros"):
            if len(tokens) != 1:
                raise ValueError(f"'{style}' takes no arguments")
            return (style,)
        if style == "constant":
            if len(tokens) != 2:
                raise ValueError("'constant' takes one value")
            return (style, float(tokens[1]))
        if style == "gaussian":
            if len(tokens) != 3:
                raise ValueError("'gaussian' takes mean and std")
            mean, std = float(tokens[1]), float(tokens[2])
            if std <= 0:
                raise ValueError("gaussian std must be positive")
            return (style, mean, std)
        values = [float(tok) for tok in tokens[1:]]
        if not values:
            raise ValueError("'explicit' needs at least one value")
        return (style, tuple(values))
    except ValueError as exc:
        errors.append(f"[problem] init: {exc}")
        return ("default",)


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a config document; raises ConfigError on any problem."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",),
                                       interpolation=None, strict=True)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError([f"syntax: {exc}"]) from exc

    errors: list = []
    algo_sections = []
    for section in parser.sections():
        if section in ("problem", "run", "optimizer"):
            continue
        if section.startswith("algorithm "):
            algo_sections.append(section)
        else:
            errors.append(f"unknown section [{section}]")

    problem = _read_section(parser, "problem", _PROBLEM_KEYS, errors)
    run_block = _read_section(parser, "run", _RUN_KEYS, errors)
    shared = _read_section(parser, "optimizer", _ALGO_KEYS, errors)

    name = problem.pop("name", None)
    if name is None:
        errors.append("[problem] missing required key 'name'")
    elif name not in PROBLEM_NAMES:
        errors.append(f"[problem] unknown problem {name!r}, expected one of {PROBLEM_NAMES}")
    data_seed = problem.pop("data_seed", 0)
    init = _parse_init(problem.pop("init", "default"), errors)
    if name in _PROBLEM_SPECIFIC:
        stray = set(problem) - _PROBLEM_SPECIFIC[name]
        if stray:
            errors.append(f"[problem] keys not valid for {name}: {sorted(stray)}")

    if "mode" in shared and shared["mode"] not in ("practical", "theory"):
        errors.append(f"[optimizer] mode: expected 'practical' or 'theory', got {shared['mode']!r}")

    algorithms = []
    seen = set()
    if not algo_sections:
        errors.append("no [algorithm NAME] sections; at least one is required")
    for section in algo_sections:
        algo_name = section[len("algorithm "):].strip()
        if algo_name not in ALGORITHMS:
            errors.append(f"[{section}] unknown algorithm {algo_name!r}, "
                          f"expected one of {ALGORITHMS}")
            continue
        if algo_name in seen:
            errors.append(f"duplicate section [{section}]")
            continue
        seen.add(algo_name)
        overrides = _read_section(parser, section, _ALGO_KEYS, errors)
        merged = dict(shared)
        merged.update(overrides)
        if merged.get("mode", "practical") not in ("practical", "theory"):
            errors.append(f"[{section}] mode: expected 'practical' or 'theory', "
                          f"got {merged['mode']!r}")
            continue
        if "eta" not in merged:
            errors.append(f"[{section}] missing required key 'eta' "
                          "(set it here or in [optimizer])")
            continue
        algorithms.append(AlgoConfig(name=algo_name, **merged))

    max_steps = run_block.get("max_steps")
    epochs = run_block.get("epochs")
    if max_steps is None and epochs is None:
        errors.append("[run] missing required key: set 'max_steps' or 'epochs'")
    elif max_steps is not None and epochs is not None:
        errors.append("[run] 'max_steps' and 'epochs' are mutually exclusive")
    if epochs is not None and name is not None and name != "mlp":
        errors.append("[run] 'epochs' requires a dataset-backed problem (mlp)")
    batch_size = run_block.get("batch_size")
    if name == "mlp" and batch_size is None:
        batch_size = 128
    if batch_size is not None and name is not None and name != "mlp":
        errors.append("[run] 'batch_size' requires a dataset-backed problem (mlp)")

    if errors:
        raise ConfigError(errors)

    config = ExperimentConfig(
        problem_name=name,
        problem_options=problem,
        data_seed=data_seed,
        init=init,
        seeds=run_block.get("seeds", [0]),
        max_steps=max_steps,
        epochs=epochs,
        batch_size=batch_size,
        record_every=run_block.get("record_every", 1),
        output=run_block.get("output", "runs"),
        threshold=run_block.get("threshold"),
        classify_eps=run_block.get("classify_eps", 0.01),
        classify_rho=run_block.get("classify_rho", 1.0),
        algorithms=algorithms,
    )
    config.config_hash = config_hash(config)
    return config


def _jsonable(value):
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    if isinstance(value, list):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in sorted(value.items())}
    return value


def config_hash(config: ExperimentConfig) -> str:
    """Canonical content hash: stable under key order and formatting."""
    algos = {}
    for algo in config.algorithms:
        algos[algo.name] = {f.name: _jsonable(getattr(algo, f.name))
                            for f in fields(algo)}
    canon = {
        "problem": _jsonable({"name": config.problem_name,
                              "data_seed": config.data_seed,
                              "init": config.init,
                              **config.problem_options}),
        "run": _jsonable({"seeds": config.seeds,
                          "max_steps": config.max_steps,
                          "epochs": config.epochs,
                          "batch_size": config.batch_size,
                          "record_every": config.record_every,
                          "output": config.output,
                          "threshold": config.threshold,
                          "classify_eps": config.classify_eps,
                          "classify_rho": config.classify_rho}),
        "algorithms": algos,
    }
    text = json.dumps(canon, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def parse_config_file(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


_PRESET_HEADER = """\
# Preset experiment: {title}.
# Edit freely; the config grammar is documented in the package README.
"""

_SMOOTH_ALGOS = """\
[algorithm gd]
[algorithm agd]
[algorithm pgd]
[algorithm pagd]
[algorithm pgdot]
[algorithm pagdot]
"""

_MLP_ALGOS = """\
[algorithm sgd_momentum]
[algorithm adam]
[algorithm amsgrad]
[algorithm rmsprop]
[algorithm pgdot]
[algorithm pagdot]
"""


def _preset(title, problem_block, run_block, optimizer_block, algos) -> str:
    return (_PRESET_HEADER.format(title=title)
            + "\n[problem]\n" + problem_block
            + "\n[run]\n" + run_block
            + "\n[optimizer]\n" + optimizer_block
            + "\n" + algos)


PRESETS = {
    "example1": _preset(
        "staircase profile, 4 plateaus",
        "name = staircase\ndim = 4\nn_plateaus = 4\nlength = 1.0\ndata_seed = 0\n",
        "seeds = 0 1 2\nmax_steps = 2000\nrecord_every = 1\n",
        "mode = practical\neta = 0.1\nt_thres = 10\ng_thres = 0.01\nr = 0.04\n"
        "momentum = 0.5\nh = 0.04\nt_count = 200\n",
        _SMOOTH_ALGOS),
    "example2": _preset(
        "oscillatory-integral regression",
        "name = airy_regression\ndata_seed = 0\n",
        "seeds = 0 1 2\nmax_steps = 14000\nrecord_every = 1\n",
        "mode = practical\neta = 0.1\nt_thres = 50\ng_thres = 0.1\nr = 0.1\n"
        "momentum = 0.5\nh = 0.04\nt_count = 200\n",
        _SMOOTH_ALGOS),
    "example3_lq": _preset(
        "regularized linear-quadratic problem",
        "name = reglq\nn_terms = 10\ndata_seed = 0\n",
        "seeds = 0 1 2\nmax_steps = 3000\nrecord_every = 1\n",
        "mode = practical\neta = 0.01\nt_thres = 50\ng_thres = 0.01\nr = 0.01\n"
        "momentum = 0.5\nh = 1\nt_count = 200\n",
        _SMOOTH_ALGOS),
    "example3_pr": _preset(
        "phase retrieval",
        "name = phase_retrieval\ndim = 10\nn_measurements = 200\ndata_seed = 173\n",
        "seeds = 0 1 2\nmax_steps = 1200\nrecord_every = 1\n",
        "mode = practical\neta = 0.001\nt_thres = 50\ng_thres = 1\nr = 0.01\n"
        "momentum = 0.5\nh = 1\nt_count = 200\n",
        _SMOOTH_ALGOS),
    "example4_mnist": _preset(
        "small dense net on 10x10 handwritten digits (expects local IDX files)",
        "name = mlp\ndataset = mnist_idx\ndata_path = data/mnist\nn_hidden = 32\n"
        "init_mean = -1.0\ninit_std = 0.1\ndata_seed = 0\n",
        "seeds = 0 1 2\nepochs = 200\nbatch_size = 128\nrecord_every = 10\n",
        "mode = practical\neta = 0.01\nt_thres = 10\ng_thres = 0.1\nr = 0.5\n"
        "momentum = 0.9\nh = 1e12\nt_count = 50\n",
        _MLP_ALGOS),
    "example4_cifar": _preset(
        "small dense net on 10x10 grayscale natural images (expects local binary batches)",
        "name = mlp\ndataset = cifar10_binary\ndata_path = data/cifar-10-batches-bin\nn_hidden = 32\n"
        "init_mean = -1.0\ninit_std = 0.1\ndata_seed = 0\n",
        "seeds = 0 1 2\nepochs = 200\nbatch_size = 128\nrecord_every = 10\n",
        "mode = practical\neta = 0.01\nt_thres = 10\ng_thres = 0.1\nr = 0.5\n"
        "momentum = 0.9\nh = 1e12\nt_count = 50\n",
        _MLP_ALGOS),
}
