"""
Configuration management for sw-ising.

This module handles configuration loading from JSON files, provenance
headers of result files, environment variables, and defaults.
"""

from .settings import (
    DEFAULT_CONFIG,
    load_config,
    load_config_with_source,
    find_config_file,
    merge_configs,
    apply_env_overrides,
    validate_config,
    save_config,
    set_default_config,
    get_config_summary,
    format_provenance_header,
    read_provenance_header,
)

__all__ = [
    "DEFAULT_CONFIG",
    "load_config",
    "load_config_with_source",
    "find_config_file",
    "merge_configs",
    "apply_env_overrides",
    "validate_config",
    "save_config",
    "set_default_config",
    "get_config_summary",
    "format_provenance_header",
    "read_provenance_header",
]
