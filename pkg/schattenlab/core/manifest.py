"""
Run manifests: what was computed, with which configuration, into which files.
"""

import json
import platform
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import scipy

from .errors import ParameterError

MANIFEST_NAME = "manifest.json"


def _versions() -> Dict[str, str]:
    from .. import __version__

    return {
        "schattenlab": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


@dataclass
class RunManifest:
    """Represents one CLI run."""

    command: str
    argv: List[str]
    config_hash: str
    config: Dict[str, Any]
    run_id: str = field(default_factory=lambda: datetime.now().strftime("%Y%m%d_%H%M%S"))
    created_at: str = field(default_factory=lambda: datetime.now().isoformat())
    finished_at: Optional[str] = None
    status: str = "running"
    exit_code: Optional[int] = None
    outputs: List[str] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    versions: Dict[str, str] = field(default_factory=_versions)

    def add_output(self, path: Path) -> None:
        name = Path(path).name
        if name not in self.outputs:
            self.outputs.append(name)

    def finish(self, exit_code: int, status: Optional[str] = None) -> None:
        self.exit_code = exit_code
        self.status = status or ("ok" if exit_code == 0 else "failed")
        self.finished_at = datetime.now().isoformat()

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunManifest":
        try:
            return cls(**data)
        except TypeError as exc:
            raise ParameterError("manifest", f"malformed manifest: {exc}") from exc


class ManifestStore:
    """Persists the manifest of a run as ``manifest.json`` in its output directory."""

    def __init__(self, base_dir: Path):
        self.base_dir = Path(base_dir)
        self.base_dir.mkdir(parents=True, exist_ok=True)

    @property
    def path(self) -> Path:
        return self.base_dir / MANIFEST_NAME

    def save(self, manifest: RunManifest) -> Path:
        with open(self.path, "w", encoding="utf-8") as f:
            json.dump(manifest.to_dict(), f, ensure_ascii=False, indent=2, sort_keys=True)
        return self.path

    def load(self) -> Optional[RunManifest]:
        if not self.path.exists():
            return None
        with open(self.path, "r", encoding="utf-8") as f:
            return RunManifest.from_dict(json.load(f))

    @staticmethod
    def list_runs(root: Path, limit: Optional[int] = None) -> List[Dict[str, Any]]:
        """Summaries of the manifests found one level below ``root``, newest first."""
        runs = []
        for path in Path(root).glob(f"*/{MANIFEST_NAME}"):
            try:
                with open(path, "r", encoding="utf-8") as f:
                    data = json.load(f)
                runs.append({
                    "dir": str(path.parent),
                    "command": data["command"],
                    "status": data["status"],
                    "created_at": data["created_at"],
                    "config_hash": data["config_hash"],
                })
            except (OSError, KeyError, json.JSONDecodeError):
                continue
        runs.sort(key=lambda x: x["created_at"], reverse=True)
        return runs[:limit] if limit else runs
