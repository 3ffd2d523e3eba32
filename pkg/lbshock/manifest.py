"""JSON run manifest: command, configuration, hashed outputs and host info."""
from __future__ import annotations

import hashlib
import json
import os
import platform
import subprocess
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List

import numpy as np

REPO_ROOT = Path(__file__).resolve().parents[1]
ARTIFACTS_ROOT = REPO_ROOT / "docs" / "artifacts"
DEFAULT_MANIFEST = ARTIFACTS_ROOT / "manifest.json"


def _rel_path(path: Path, root: Path = REPO_ROOT) -> str:
    try:
        return str(path.relative_to(root))
    except ValueError:
        return str(path)


def _relativize(value: Any) -> Any:
    if isinstance(value, Path):
        return _rel_path(value.resolve())
    if isinstance(value, dict):
        return {str(key): _relativize(val) for key, val in value.items()}
    if isinstance(value, (list, tuple)):
        return [_relativize(item) for item in value]
    if isinstance(value, str):
        prefix = str(REPO_ROOT) + os.sep
        return value.replace(prefix, "") if prefix in value else value
    if isinstance(value, np.generic):
        return value.item()
    return value


def _cpu_brand() -> str:
    generic = {"", "arm", "amd64", "x86_64", "unknown"}
    brand = platform.processor()
    if brand and brand.lower() not in generic:
        return brand
    try:
        if platform.system() == "Darwin":
            return subprocess.check_output(
                ["sysctl", "-n", "machdep.cpu.brand_string"], text=True
            ).strip()
        if platform.system() == "Linux":
            with open("/proc/cpuinfo", "r", encoding="utf-8", errors="ignore") as fh:
                for line in fh:
                    if "model name" in line:
                        return line.split(":", 1)[1].strip()
    except Exception:
        pass
    return platform.machine()


def system_info() -> Dict[str, Any]:
    return {
        "platform": platform.system(),
        "release": platform.release(),
        "machine": platform.machine(),
        "cpu_brand": _cpu_brand(),
        "cpu_count": os.cpu_count(),
        "python": platform.python_version(),
        "numpy": np.__version__,
    }


def describe_inputs(paths: Iterable[str | Path]) -> List[Dict[str, Any]]:
    """Path, sha256 and size of each existing file; missing files keep only the path."""
    entries: List[Dict[str, Any]] = []
    for raw in paths:
        path = Path(raw)
        record: Dict[str, Any] = {"path": _rel_path(path.resolve())}
        if path.is_file():
            record["sha256"] = hashlib.sha256(path.read_bytes()).hexdigest()
            record["size_bytes"] = path.stat().st_size
        entries.append(record)
    return entries


def load_manifest(path: Path = DEFAULT_MANIFEST) -> Dict[str, Any]:
    path = Path(path)
    if path.exists():
        return json.loads(path.read_text(encoding="utf-8"))
    return {"runs": {}}


def save_manifest(manifest: Dict[str, Any], path: Path = DEFAULT_MANIFEST) -> Path:
    path = Path(path)
    manifest["generated_at"] = datetime.now(timezone.utc).isoformat()
    manifest["system"] = system_info()
    manifest.setdefault("runs", {})
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_relativize(manifest), sort_keys=True, indent=2) + "\n")
    return path


def update_run(
    key: str, data: Dict[str, Any], path: Path = DEFAULT_MANIFEST
) -> Dict[str, Any]:
    manifest = load_manifest(path)
    record = dict(data)
    record.setdefault("command", " ".join([Path(sys.argv[0]).name] + sys.argv[1:]))
    manifest.setdefault("runs", {})[key] = record
    save_manifest(manifest, path)
    return manifest["runs"][key]


__all__ = [
    "ARTIFACTS_ROOT",
    "DEFAULT_MANIFEST",
    "describe_inputs",
    "load_manifest",
    "save_manifest",
    "system_info",
    "update_run",
]
