"""``key = value`` defaults file shared by all commands."""

from __future__ import annotations

from pathlib import Path

DEFAULTS_PATH = Path(__file__).resolve().parent / "defaults.cfg"

_TYPES = {
    "seed": int, "iterations": int, "blocks": int, "min_block_errors": int,
    "conformance_blocks": int, "threshold_blocks": int, "snr_min": float, "snr_max": float,
    "snr_step": float, "ber_bits": int, "workers": int, "isolation": "bool",
    "throughput_mode": str,
}


class ConfigError(ValueError):
    pass


def _convert(key: str, raw: str):
    kind = _TYPES.get(key)
    if kind is None:
        raise ConfigError(f"unknown config key '{key}'")
    if kind == "bool":
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
    try:
        return kind(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r}") from None


def parse_config(text: str, source: str = "<config>") -> dict:
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{n}: expected key = value")
        key, raw = (s.strip() for s in line.split("=", 1))
        out[key] = _convert(key, raw)
    return out


def load_config(path: str | Path | None = None) -> dict:
    cfg = parse_config(DEFAULTS_PATH.read_text(), str(DEFAULTS_PATH))
    if path is not None:
        cfg.update(parse_config(Path(path).read_text(), str(path)))
    return cfg
