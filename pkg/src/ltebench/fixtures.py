"""Versioned CSV tables shipped with the package.

The fixture directory can be overridden with ``LTEBENCH_FIXTURE_DIR``.  Every
table is verified against ``checksums.sha256`` in the same directory before it
is handed out, so a hand-edited table fails loudly instead of silently
shifting results.
"""

from __future__ import annotations

import csv
import hashlib
import os
from functools import lru_cache
from pathlib import Path

FIXTURE_ENV = "LTEBENCH_FIXTURE_DIR"
FIXTURE_VERSION = "1"


class FixtureError(RuntimeError):
    pass


def fixture_dir() -> Path:
    override = os.environ.get(FIXTURE_ENV)
    if override:
        return Path(override)
    return Path(__file__).resolve().parent / "data"


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


@lru_cache(maxsize=None)
def _expected_checksums(directory: Path) -> dict[str, str]:
    sums = directory / "checksums.sha256"
    if not sums.exists():
        raise FixtureError(f"missing {sums}")
    out = {}
    for line in sums.read_text().splitlines():
        if line.strip():
            digest, name = line.split()
            out[name] = digest
    return out


@lru_cache(maxsize=None)
def _load(directory: Path, name: str) -> tuple[dict[str, int], ...]:
    path = directory / name
    expected = _expected_checksums(directory).get(name)
    if expected is None:
        raise FixtureError(f"{name} is not listed in checksums.sha256")
    actual = _sha256(path)
    if actual != expected:
        raise FixtureError(f"checksum mismatch for {path}: {actual} != {expected}")
    with path.open(newline="") as fh:
        return tuple({k: int(v) for k, v in row.items()} for row in csv.DictReader(fh))


def load_table(name: str) -> tuple[dict[str, int], ...]:
    """Rows of an integer CSV fixture, checksum-verified."""
    return _load(fixture_dir(), name)


def fixture_checksums() -> dict[str, str]:
    """Checksums of the fixtures in use, for run manifests."""
    directory = fixture_dir()
    return {name: _sha256(directory / name) for name in sorted(_expected_checksums(directory))}
