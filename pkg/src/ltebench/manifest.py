"""Run manifests: everything needed to regenerate a result directory."""

from __future__ import annotations

import json
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .channel import RNG_ALGORITHM
from .fixtures import FIXTURE_VERSION, fixture_checksums
from .harness.bler import SEED_RULE

MANIFEST_NAME = "manifest.json"


def build_manifest(command: str, params: dict, seed: int | None) -> dict:
    return {
        "command": command,
        "params": params,
        "seed": seed,
        "tool": {"name": "ltebench", "version": __version__},
        "fixtures": {"version": FIXTURE_VERSION, "sha256": fixture_checksums()},
        "rng": {"algorithm": RNG_ALGORITHM, "seed_derivation": SEED_RULE},
        "host": {
            "platform": platform.platform(),
            "machine": platform.machine(),
            "processor": platform.processor(),
            "python": sys.version.split()[0],
            "numpy": np.__version__,
        },
    }


def write_manifest(out_dir, command: str, params: dict, seed: int | None) -> Path:
    path = Path(out_dir) / MANIFEST_NAME
    path.write_text(json.dumps(build_manifest(command, params, seed), indent=2, sort_keys=True) + "\n")
    return path


def read_manifest(path) -> dict:
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    return json.loads(path.read_text())
