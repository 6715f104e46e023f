# models/run_manifest.py
import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import Dict, List, Optional

from core.errors import ConfigError, VolumeIOError


@dataclass
class RunManifest:
    """Everything needed to repeat a command; written before work starts"""
    command: str
    tool_version: str
    config: Dict = field(default_factory=dict)
    seeds: Dict[str, int] = field(default_factory=dict)
    outputs: List[str] = field(default_factory=list)
    started_at: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    finished_at: Optional[str] = None

    def mark_finished(self):
        self.finished_at = datetime.now(timezone.utc).isoformat()

    def write(self, path: str):
        try:
            with open(path, "w", encoding="utf-8") as handle:
                json.dump(asdict(self), handle, indent=2, sort_keys=True)
                handle.write("\n")
        except OSError as e:
            raise VolumeIOError(f"{path}: cannot write run manifest: {e}") from e

    @classmethod
    def load(cls, path: str) -> "RunManifest":
        try:
            with open(path, "r", encoding="utf-8") as handle:
                return cls(**json.load(handle))
        except OSError as e:
            raise VolumeIOError(f"{path}: cannot read run manifest: {e}") from e
        except (json.JSONDecodeError, TypeError) as e:
            raise ConfigError(f"{path}: malformed run manifest: {e}") from e
