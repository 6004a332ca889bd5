import json
import logging
import sys
from pathlib import Path
from typing import Optional

PROJECT_ROOT = Path(__file__).resolve().parents[2]

DEFAULT_SETTINGS = {
    "port": 7000,
    "database": "data/scmatroid.db",
    "max_bases": 10000,
    "max_columns": 12,
    "max_union_subset": 20,
    "seed": None,
    "gcd_threshold": 64,
    "log_level": "INFO",
}

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


def load_settings(path: Optional[Path] = None) -> dict:
    """Defaults overlaid with settings.json (project root unless a path is given)."""
    settings_path = Path(path) if path is not None else PROJECT_ROOT / "settings.json"
    settings = dict(DEFAULT_SETTINGS)
    if settings_path.exists():
        with open(settings_path, "r") as f:
            settings.update(json.load(f))
    return settings


def configure_logging(level: str = "INFO") -> None:
    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.INFO),
        format=LOG_FORMAT,
        stream=sys.stderr,
        force=True,
    )
