"""
Configuration management for sw-ising experiments.

This module handles loading and managing configuration from JSON files,
provenance headers of previously written result files, environment
variables, and default settings.
"""

import copy
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

logger = logging.getLogger(__name__)

CONFIG_HEADER_PREFIX = "# config: "
SEED_HEADER_PREFIX = "# seed: "
ENV_OVERRIDES = ["SW_ISING_SEED", "SW_ISING_JOBS", "SW_ISING_OUTPUT_DIR"]
CHAIN_NAMES = ["sw", "gibbs"]

# Default configuration values
DEFAULT_CONFIG = {
    "seed": 0,
    "jobs": 1,
    "paths": {"output_dir": "./output"},
    "graph": {
        "n": 200,
        "alphas": [0.5, 0.5],
        "probs": [[0.007, 0.003], [0.003, 0.007]],
        "file": None,
        "complete_bipartite": None,
    },
    "model": {
        "beta": {"dist": "uniform", "lo": 0.0, "hi": 1.0},
        "gamma": {"dist": "uniform", "lo": 0.0, "hi": 0.1},
        "file": None,
    },
    "sample": {"chain": "sw", "steps": 1000, "record_every": 1, "start": "random"},
    "mix": {
        "sizes": [50, 100, 200, 400],
        "k": 1,
        "B": 4.0,
        "chains": ["sw"],
        "num_seeds": 20,
        "max_steps": 10000,
        "starts": "extremal",
    },
    "fixedpoint": {
        "B": [0.5, 1.0, 1.5, 2.5, 3.0, 4.0, 8.0],
        "k": [1, 2, 5],
        "tol": 1e-12,
    },
    "learn": {
        "n_samples": 1000,
        "burn_in": 100,
        "thin": 1,
        "n_i": 1000,
        "eta": 0.05,
        "n_s": 20,
        "k_sw": 1,
        "k_gibbs": None,
        "chains": ["sw", "gibbs"],
        "clamp_beta": True,
    },
    "reproduce": {
        "sweep": "beta_range",
        "x_values": [0.2, 0.4, 0.6, 0.8, 1.0],
        "sizes": [100, 200, 300, 400],
        "fields": "positive",
        "num_models": 10,
        "max_n": 400,
        "time_budget_s": 600,
    },
}


def load_config(
    config_path: Optional[Union[str, Path]] = None,
    display_path: bool = False,
) -> Dict[str, Any]:
    """Load configuration from file or use defaults.

    Args:
        config_path: Path to a JSON config or a result file with a provenance header
        display_path: Print the resolved config file path to stdout. Defaults to False.

    Returns:
        Configuration dictionary
    """
    config, config_source = load_config_with_source(config_path)

    if display_path and config_source:
        print(f"Configuration loaded from: {config_source}")

    return config


def find_config_file() -> Optional[Path]:
    """Find configuration file in common locations.

    Returns:
        Path to config file if found, None otherwise
    """
    config_names = ["sw_ising_config.json", "config.json"]
    search_paths = [
        Path.cwd(),
        Path.cwd() / "config",
        Path.home() / ".sw_ising",
    ]

    for path in search_paths:
        for config_name in config_names:
            config_file = path / config_name
            if config_file.exists():
                logger.debug(f"Found config file: {config_file}")
                return config_file

    return None


def format_provenance_header(command: str, config: Dict[str, Any]) -> List[str]:
    """Comment lines that open every result file.

    The config is written as sorted compact JSON so that reading it back and
    re-running reproduces the file.
    """
    return [
        f"# sw-ising {command}",
        f"{SEED_HEADER_PREFIX}{config.get('seed', 0)}",
        f"{CONFIG_HEADER_PREFIX}{json.dumps(config, sort_keys=True, separators=(',', ':'))}",
    ]


def read_provenance_header(path: Union[str, Path]) -> Optional[Dict[str, Any]]:
    """Config stored in the leading comment block of a result file, if any."""
    with open(path, "r") as f:
        for line in f:
            if not line.startswith("#"):
                break
            if line.startswith(CONFIG_HEADER_PREFIX):
                return json.loads(line[len(CONFIG_HEADER_PREFIX) :])
    return None


def _is_provenance_file(config_file: Path) -> bool:
    with open(config_file, "r") as f:
        return f.read(1) == "#"


def merge_configs(
    base_config: Dict[str, Any], override_config: Dict[str, Any]
) -> Dict[str, Any]:
    """Recursively merge two configuration dictionaries.

    Args:
        base_config: Base configuration dictionary
        override_config: Configuration to merge in

    Returns:
        Merged configuration dictionary
    """
    result = base_config.copy()

    for key, value in override_config.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            # distribution nodes are replaced whole, not merged
            if "dist" in value:
                result[key] = value
            else:
                result[key] = merge_configs(result[key], value)
        else:
            result[key] = value

    return result


def apply_env_overrides(config: Dict[str, Any]) -> Dict[str, Any]:
    """Apply environment variable overrides to configuration.

    Args:
        config: Base configuration dictionary

    Returns:
        Configuration with environment overrides applied
    """
    result = copy.deepcopy(config)

    for variable, key in (("SW_ISING_SEED", "seed"), ("SW_ISING_JOBS", "jobs")):
        if variable in os.environ:
            try:
                result[key] = int(os.environ[variable])
            except ValueError:
                logger.error(f"Ignoring {variable}={os.environ[variable]!r}: not an integer")

    if "SW_ISING_OUTPUT_DIR" in os.environ:
        result["paths"]["output_dir"] = os.environ["SW_ISING_OUTPUT_DIR"]

    return result


def set_default_config(new_defaults: Dict[str, Any]):
    """Update default configuration values.

    Args:
        new_defaults: Dictionary with new default values
    """
    global DEFAULT_CONFIG

    DEFAULT_CONFIG = merge_configs(DEFAULT_CONFIG, new_defaults)

    logger.info("Updated default configuration")


def save_config(config: Dict[str, Any], config_path: Union[str, Path]):
    """Save configuration to a JSON file.

    Args:
        config: Configuration dictionary to save
        config_path: Path where to save the configuration
    """
    config_file = Path(config_path)
    config_file.parent.mkdir(parents=True, exist_ok=True)

    try:
        with open(config_file, "w") as f:
            json.dump(config, f, indent=2)

        logger.info(f"Configuration saved to: {config_file}")

    except Exception as e:
        logger.error(f"Failed to save configuration to {config_file}: {e}")
        raise


def _is_dist(node: Any) -> bool:
    if isinstance(node, (int, float)) and not isinstance(node, bool):
        return True
    if not isinstance(node, dict):
        return False
    if node.get("dist") == "uniform":
        return "lo" in node and "hi" in node and node["lo"] <= node["hi"]
    if node.get("dist") == "constant":
        return "value" in node
    return False


def _positive_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool) and value >= 1


def validate_config(config: Dict[str, Any]) -> bool:
    """Validate configuration structure and values.

    Checks for:
    - Required sections
    - Graph and model parameter ranges
    - Chain names and counts of every experiment section

    Args:
        config: Configuration dictionary to validate

    Returns:
        True if valid, False otherwise
    """
    is_valid = True

    def fail(message: str):
        nonlocal is_valid
        logger.error(message)
        is_valid = False

    required_sections = ["paths", "graph", "model", "sample", "mix", "fixedpoint", "learn", "reproduce"]
    for section in required_sections:
        if section not in config:
            fail(f"Missing required configuration section: {section}")
    if not is_valid:
        logger.error("Configuration validation failed")
        return False

    seed = config.get("seed")
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        fail(f"seed must be a non-negative integer, got {seed!r}")
    if not _positive_int(config.get("jobs")):
        fail(f"jobs must be a positive integer, got {config.get('jobs')!r}")

    graph = config["graph"]
    if graph.get("file") is None and graph.get("complete_bipartite") is None:
        alphas, probs = graph.get("alphas"), graph.get("probs")
        if not _positive_int(graph.get("n")):
            fail(f"graph.n must be a positive integer, got {graph.get('n')!r}")
        if not isinstance(alphas, list) or not alphas:
            fail("graph.alphas must be a nonempty list")
        elif not isinstance(probs, list) or len(probs) != len(alphas):
            fail("graph.probs must be a square matrix matching graph.alphas")
    cb = graph.get("complete_bipartite")
    if cb is not None and not (isinstance(cb, list) and len(cb) == 2 and all(_positive_int(v) for v in cb)):
        fail(f"graph.complete_bipartite must be [n, m] with positive sizes, got {cb!r}")

    model = config["model"]
    for key in ("beta", "gamma"):
        if model.get("file") is None and not _is_dist(model.get(key)):
            fail(f"model.{key} must be a number or a distribution node, got {model.get(key)!r}")
    beta = model.get("beta")
    if isinstance(beta, dict) and beta.get("dist") == "uniform" and beta.get("lo", 0) < 0:
        fail("model.beta must not draw negative couplings")

    if config["sample"].get("chain") not in CHAIN_NAMES:
        fail(f"sample.chain must be one of {CHAIN_NAMES}")
    if config["sample"].get("start") not in ("random", "plus", "minus"):
        fail("sample.start must be 'random', 'plus' or 'minus'")

    for section, key in (("mix", "chains"), ("learn", "chains")):
        chains = config[section].get(key, [])
        if not chains or any(chain not in CHAIN_NAMES for chain in chains):
            fail(f"{section}.{key} must be a nonempty subset of {CHAIN_NAMES}")
    if config["mix"].get("starts") not in ("extremal", "random"):
        fail("mix.starts must be 'extremal' or 'random'")
    for key in ("num_seeds", "max_steps"):
        if not _positive_int(config["mix"].get(key)):
            fail(f"mix.{key} must be a positive integer")
    for key in ("n_samples", "thin", "n_i", "n_s", "k_sw"):
        if not _positive_int(config["learn"].get(key)):
            fail(f"learn.{key} must be a positive integer")

    reproduce = config["reproduce"]
    if reproduce.get("sweep") not in ("beta_range", "graph_size"):
        fail("reproduce.sweep must be 'beta_range' or 'graph_size'")
    if reproduce.get("fields") not in ("positive", "mixed"):
        fail("reproduce.fields must be 'positive' or 'mixed'")
    if not _positive_int(reproduce.get("num_models")):
        fail("reproduce.num_models must be a positive integer")

    if is_valid:
        logger.debug("Configuration validation passed")
    else:
        logger.error("Configuration validation failed")

    return is_valid


def load_config_with_source(
    config_path: Optional[Union[str, Path]] = None,
) -> Tuple[Dict[str, Any], Optional[Path]]:
    """Load configuration and return both config and source file path.

    Args:
        config_path: Path to a JSON config, or to a result file whose
            provenance header holds the config (optional)

    Returns:
        Tuple of (configuration dictionary, source file path or None)

    Raises:
        ValueError: If an explicitly given file cannot be parsed
    """
    # Start with a deep copy so mutations never bleed into DEFAULT_CONFIG
    config = copy.deepcopy(DEFAULT_CONFIG)
    config_source = None

    config_file = Path(config_path) if config_path else find_config_file()

    if config_file and config_file.exists():
        try:
            if _is_provenance_file(config_file):
                file_config = read_provenance_header(config_file)
                if file_config is None:
                    raise ValueError("no '# config:' line in the comment header")
                logger.info("Detected provenance header, reusing its configuration")
            else:
                with open(config_file, "r") as f:
                    file_config = json.load(f)

            config = merge_configs(config, file_config)
            config_source = config_file
            logger.info(f"Loaded configuration from: {config_file}")

        except Exception as e:
            if config_path:
                raise ValueError(f"Failed to load config from {config_file}: {e}") from e
            logger.warning(f"Failed to load config from {config_file}: {e}")
            logger.info("Using default configuration")
    elif config_path:
        raise ValueError(f"Config file not found: {config_file}")
    else:
        logger.info("No config file found, using defaults")

    config = apply_env_overrides(config)

    if not validate_config(config):
        logger.warning("Configuration validation failed")

    return config, config_source


def get_config_summary(config_path: Optional[Union[str, Path]] = None) -> str:
    """Get a summary of the current configuration.

    Returns:
        String summary of configuration
    """
    config, config_source = load_config_with_source(config_path)

    summary = "SW-Ising Configuration Summary:\n"
    summary += "=" * 50 + "\n"

    if config_source:
        summary += f"Configuration file: {config_source}\n"
    else:
        summary += "Configuration file: Using defaults (no file found)\n"

    active_env_vars = [var for var in ENV_OVERRIDES if var in os.environ]
    if active_env_vars:
        summary += f"Environment overrides: {', '.join(active_env_vars)}\n"

    summary += "\n"
    summary += f"Root seed: {config['seed']}\n"
    summary += f"Parallel jobs: {config['jobs']}\n"

    graph = config["graph"]
    if graph.get("file"):
        summary += f"Graph: file {graph['file']}\n"
    elif graph.get("complete_bipartite"):
        n, m = graph["complete_bipartite"]
        summary += f"Graph: complete bipartite ({n}, {m})\n"
    else:
        summary += f"Graph: n={graph['n']}, alphas={graph['alphas']}, probs={graph['probs']}\n"

    model = config["model"]
    if model.get("file"):
        summary += f"Model: file {model['file']}\n"
    else:
        summary += f"Model: beta={model['beta']}, gamma={model['gamma']}\n"

    summary += "Experiments:\n"
    for section in ("sample", "mix", "fixedpoint", "learn", "reproduce"):
        settings = ", ".join(f"{key}={value}" for key, value in config[section].items())
        summary += f"  {section}: {settings}\n"

    summary += f"\nOutput Directory: {config['paths'].get('output_dir', './output')}\n"

    return summary
