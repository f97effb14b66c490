"""Per-stage manifests: input/output hashes, parameters, config hash.

Manifests contain no timestamps, so re-running a stage with identical
inputs yields byte-identical files. A stage can compare its inputs with
the previous manifest to flag upstream changes.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from . import __version__


def file_sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def manifest_path(output_dir, stage: str) -> Path:
    return Path(output_dir) / f"{stage}.manifest.json"


def input_changes(output_dir, stage: str, inputs: dict[str, str]) -> list[str]:
    """Diff the given input hashes against the stage's previous manifest."""
    path = manifest_path(output_dir, stage)
    if not path.exists():
        return []
    try:
        previous = json.loads(path.read_text(encoding="utf-8")).get("inputs", {})
    except (OSError, json.JSONDecodeError):
        return [f"previous manifest {path} unreadable"]
    changes = []
    for name, digest in sorted(inputs.items()):
        old = previous.get(name)
        if old is not None and old != digest:
            changes.append(f"input {name} changed since the last {stage} run")
    for name in sorted(set(previous) - set(inputs)):
        changes.append(f"input {name} no longer used by {stage}")
    return changes


def write_manifest(
    output_dir,
    stage: str,
    inputs: dict[str, Path],
    outputs: dict[str, Path],
    parameters: dict,
    config_hash: str,
) -> Path:
    payload = {
        "stage": stage,
        "toolkit_version": __version__,
        "config_hash": config_hash,
        "inputs": {name: file_sha256(p) for name, p in sorted(inputs.items())},
        "outputs": {name: file_sha256(p) for name, p in sorted(outputs.items())},
        "parameters": parameters,
    }
    path = manifest_path(output_dir, stage)
    path.write_text(
        json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    return path
