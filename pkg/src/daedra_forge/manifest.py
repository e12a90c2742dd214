"""Run manifests: every pipeline stage records what went in, what came
out (with SHA-256 digests), and the exact configuration, so any artifact
can be traced back to its inputs and re-verified later.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

TOOL_VERSION = "0.1.0"
SCHEMA_VERSION = 1

MANIFEST_BASENAME = "run-manifest.json"


def sha256_file(path: str | os.PathLike) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def utc_now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    stage: str
    seed: int | None = None
    config: dict = field(default_factory=dict)
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)
    started_at: str = field(default_factory=utc_now_iso)
    finished_at: str | None = None
    tool_version: str = TOOL_VERSION
    schema_version: int = SCHEMA_VERSION

    def add_input(self, path: str | os.PathLike) -> None:
        self.inputs[str(path)] = sha256_file(path)

    def add_output(self, path: str | os.PathLike) -> None:
        self.outputs[str(path)] = sha256_file(path)

    def finish(self) -> None:
        self.finished_at = utc_now_iso()

    def to_dict(self) -> dict:
        return {
            "stage": self.stage,
            "tool_version": self.tool_version,
            "schema_version": self.schema_version,
            "seed": self.seed,
            "config": self.config,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
        }

    def write(self, path: str | os.PathLike) -> None:
        if self.finished_at is None:
            self.finish()
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(self.to_dict(), handle, indent=2, sort_keys=True)
            handle.write("\n")


def manifest_path_for(output: str | os.PathLike) -> Path:
    """Directory outputs get run-manifest.json inside; file outputs get a
    sibling <stem>.manifest.json."""
    out = Path(output)
    if out.is_dir():
        return out / MANIFEST_BASENAME
    return out.with_name(out.stem + ".manifest.json")


def load_manifest(path: str | os.PathLike) -> dict:
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def verify_manifest(path: str | os.PathLike) -> list[str]:
    """Re-hash all recorded files; returns a list of problems (empty = ok)."""
    data = load_manifest(path)
    problems: list[str] = []
    for section in ("inputs", "outputs"):
        for file_path, expected in data.get(section, {}).items():
            if not os.path.exists(file_path):
                problems.append(f"{section}: {file_path} is missing")
                continue
            actual = sha256_file(file_path)
            if actual != expected:
                problems.append(
                    f"{section}: {file_path} hash mismatch "
                    f"(expected {expected[:12]}.., got {actual[:12]}..)"
                )
    return problems
