"""Configuration management for schattenlab runs.

Values come from four layers, later ones winning: built-in defaults, a flat
``key = value`` file (``--config``), ``SCHATTENLAB_*`` environment variables,
and command-line flags. The numeric part of the merged configuration is hashed
into every run manifest.
"""

import copy
import hashlib
import json
import os
from pathlib import Path
from typing import TYPE_CHECKING, Any, Dict, List, Mapping, Optional, Union

from .errors import ParameterError

if TYPE_CHECKING:
    from ..numerics.quadrature import GridSpec

ENV_OVERRIDES = {
    "SCHATTENLAB_THREADS": "run.threads",
    "SCHATTENLAB_OUTPUT_DIR": "run.output_dir",
    "SCHATTENLAB_LOG_LEVEL": "run.log_level",
}

# run settings that never change a numeric result
_UNHASHED = ("run.threads", "run.output_dir", "run.log_level", "run.log_file", "run.quiet")


class ConfigManager:
    """Holds the effective configuration as a nested dict with dot-notation access.

    Features:
    - Deep merge of loaded values over the defaults
    - Flat ``key = value`` config files and JSON import/export
    - Environment overrides
    - A content hash of the numeric settings
    """

    DEFAULT_CONFIG: Dict[str, Any] = {
        "grid": {
            "r_max": 1.0 - 2.0**-12,
            "level_step": 0.5,
            "radial_order": 8,
            "angular_base": 32,
            "angular_max": 1024,
            "angular_order": 8,
            "depth": 64,
            "refine": 0,
        },
        "truncation": {
            "N": 512,
            "mode": "coefficient",
            "closed_form_check": True,
        },
        "sweep": {
            "j_min_exp": 2,
            "j_max_exp": 12,
            "j_padding": 2048,
            "a_min_exp": 3,
            "a_max_exp": 14,
            "p": [1.5, 2.0, 3.0],
            "alpha": [0.0, 0.5, 1.0],
        },
        "lattice": {
            "r": 0.5,
            "r_max": 0.99,
            "probe_density": 4,
        },
        "run": {
            "threads": 1,
            "output_dir": "schattenlab-runs",
            "log_level": "info",
            "log_file": "",
            "quiet": False,
        },
    }

    def __init__(self, overrides: Optional[Mapping[str, Any]] = None):
        """Start from the defaults, optionally updated with dot-notation ``overrides``."""
        self.config: Dict[str, Any] = copy.deepcopy(self.DEFAULT_CONFIG)
        self.sources: List[str] = ["defaults"]
        if overrides:
            self.update(overrides)

    # -------------------- Access --------------------

    def get(self, key_path: str, default: Any = None) -> Any:
        """Get a configuration value using dot notation.

        Examples:
            >>> ConfigManager().get("lattice.r")
            0.5
        """
        value: Any = self.config
        try:
            for key in key_path.split("."):
                value = value[key]
            return value
        except (KeyError, TypeError):
            return default

    def set(self, key_path: str, value: Any) -> None:
        """Set a known key; unknown keys raise ParameterError."""
        keys = key_path.split(".")
        target = self.config
        for key in keys[:-1]:
            if not isinstance(target.get(key), dict):
                raise ParameterError(key_path, "unknown configuration section")
            target = target[key]
        if keys[-1] not in target:
            raise ParameterError(key_path, "unknown configuration key")
        target[keys[-1]] = self._coerce(key_path, target[keys[-1]], value)

    def update(self, updates: Mapping[str, Any]) -> None:
        """Update multiple configuration values given as {dot.path: value}."""
        for key_path, value in updates.items():
            self.set(key_path, value)

    @staticmethod
    def _coerce(key_path: str, current: Any, value: Any) -> Any:
        # values take the type of their default
        try:
            if isinstance(current, bool):
                return value if isinstance(value, bool) else parse_value(str(value)) is True
            if isinstance(current, int):
                return int(value)
            if isinstance(current, float):
                return float(value)
            if isinstance(current, list):
                return [float(v) for v in (value if isinstance(value, (list, tuple)) else [value])]
        except (TypeError, ValueError) as exc:
            raise ParameterError(key_path, f"cannot use {value!r}: {exc}") from exc
        return value

    # -------------------- Layers --------------------

    def load_file(self, path: Union[str, Path]) -> None:
        """Apply a flat ``key = value`` file, or a JSON document written by ``export_config``."""
        path = Path(path)
        if path.suffix == ".json":
            self.import_config(path)
            return
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ParameterError("config", f"cannot read {path}: {exc}") from exc
        self.update(parse_config_text(text, source=str(path)))
        self.sources.append(str(path))

    def apply_env(self, environ: Optional[Mapping[str, str]] = None) -> None:
        environ = os.environ if environ is None else environ
        applied = False
        for name, key_path in ENV_OVERRIDES.items():
            if environ.get(name):
                self.set(key_path, environ[name])
                applied = True
        if applied:
            self.sources.append("environment")

    def export_config(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(self.config, f, indent=2, sort_keys=True)
        return path

    def import_config(self, path: Union[str, Path]) -> None:
        path = Path(path)
        try:
            with open(path, "r", encoding="utf-8") as f:
                imported = json.load(f)
        except OSError as exc:
            raise ParameterError("config", f"cannot read {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ParameterError("config", f"{path}:{exc.lineno}: {exc.msg}") from exc
        if not isinstance(imported, dict):
            raise ParameterError("config", f"{path}: expected a JSON object")
        self.update(_flatten(imported))
        self.sources.append(str(path))

    # -------------------- Derived values --------------------

    def grid_spec(self) -> "GridSpec":
        """The quadrature grid, refined ``grid.refine`` times."""
        from ..numerics.quadrature import GridSpec

        grid = self.config["grid"]
        spec = GridSpec(
            r_max=grid["r_max"],
            level_step=grid["level_step"],
            radial_order=grid["radial_order"],
            angular_base=grid["angular_base"],
            angular_max=grid["angular_max"],
            angular_order=grid["angular_order"],
            depth=grid["depth"],
        )
        for _ in range(max(0, grid["refine"])):
            spec = spec.refined()
        return spec

    def numeric_config(self) -> Dict[str, Any]:
        """The configuration without settings that cannot change results."""
        flat = {k: v for k, v in _flatten(self.config).items() if k not in _UNHASHED}
        return flat

    def config_hash(self) -> str:
        canonical = json.dumps(self.numeric_config(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def __repr__(self) -> str:
        return f"ConfigManager(sources={self.sources})"


def parse_value(text: str) -> Any:
    """int, float, bool, comma-separated float list, or the stripped string."""
    text = text.strip()
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            pass
    if "," in text:
        try:
            return [float(tok) for tok in text.split(",") if tok.strip()]
        except ValueError:
            pass
    return text


def parse_config_text(text: str, source: str = "<config>") -> Dict[str, Any]:
    """Parse the flat config grammar into {dot.path: value}."""
    out: Dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key or "." not in key:
            raise ParameterError(
                "config", f"{source}:{lineno}: expected 'section.key = value', got {raw.strip()!r}"
            )
        out[key] = parse_value(value)
    return out


def _flatten(tree: Mapping[str, Any], prefix: str = "") -> Dict[str, Any]:
    flat: Dict[str, Any] = {}
    for key, value in tree.items():
        path = f"{prefix}{key}"
        if isinstance(value, Mapping):
            flat.update(_flatten(value, path + "."))
        else:
            flat[path] = value
    return flat


# Global config instance
_global_config: Optional[ConfigManager] = None


def get_config() -> ConfigManager:
    """Get the global configuration instance."""
    global _global_config
    if _global_config is None:
        _global_config = ConfigManager()
    return _global_config


def set_config(config: ConfigManager) -> None:
    """Set the global configuration instance."""
    global _global_config
    _global_config = config
