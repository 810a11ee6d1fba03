"""Configuration loading: YAML file merged over defaults, plus .env overrides."""

import copy
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

from utils.logger import setup_logger

logger = setup_logger(__name__)

PROJECT_ROOT = Path(__file__).resolve().parent.parent
DEFAULT_CONFIG_PATH = PROJECT_ROOT / "config" / "config.yaml"


def default_config() -> Dict[str, Any]:
    """Return default configuration."""
    return {
        'logging': {
            'level': 'WARNING',
            'file': None,
            'console': True,
        },
        'solver': {
            'realize': 'auto',
            'vertex_threshold': 16,
            'monitor': True,
            'fast_int': False,
        },
        'oracles': {
            'strategy_cap': 1_000_000,
            'shapley_sweeps': 60,
        },
        'generator': {
            'seed': 0,
            'min_out': 1,
            'max_out': 3,
            'weight_low': -10,
            'weight_high': 10,
            'weight_denominator': 1,
            'enumeration_cap': 2_000_000,
        },
        'harness': {
            'jobs': 1,
            'trace_dir': 'traces',
        },
    }


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(config_path: Optional[str] = None) -> Dict[str, Any]:
    """Load configuration from YAML, falling back to defaults on any problem."""
    load_dotenv(dotenv_path=PROJECT_ROOT / ".env")
    path = Path(config_path) if config_path else DEFAULT_CONFIG_PATH
    config = default_config()
    try:
        with open(path, 'r', encoding='utf-8') as f:
            config = _merge(config, yaml.safe_load(f) or {})
    except FileNotFoundError:
        logger.warning(f"Config file not found: {path}, using defaults")
    except Exception as e:
        logger.error(f"Error loading config: {e}, using defaults")

    if os.getenv("POLYVAL_TRACE_DIR"):
        config['harness']['trace_dir'] = os.getenv("POLYVAL_TRACE_DIR")
    if os.getenv("POLYVAL_LOG_LEVEL"):
        config['logging']['level'] = os.getenv("POLYVAL_LOG_LEVEL")
    return config


@dataclass
class SolverSettings:
    realize: str = "auto"
    vertex_threshold: int = 16
    monitor: bool = True
    fast_int: bool = False

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> "SolverSettings":
        section = config.get('solver', {})
        return cls(
            realize=str(section.get('realize', cls.realize)),
            vertex_threshold=int(section.get('vertex_threshold', cls.vertex_threshold)),
            monitor=bool(section.get('monitor', cls.monitor)),
            fast_int=bool(section.get('fast_int', cls.fast_int)),
        )


@dataclass
class OracleSettings:
    strategy_cap: int = 1_000_000
    shapley_sweeps: int = 60

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> "OracleSettings":
        section = config.get('oracles', {})
        return cls(
            strategy_cap=int(section.get('strategy_cap', cls.strategy_cap)),
            shapley_sweeps=int(section.get('shapley_sweeps', cls.shapley_sweeps)),
        )


@dataclass
class HarnessSettings:
    jobs: int = 1
    trace_dir: str = "traces"

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> "HarnessSettings":
        section = config.get('harness', {})
        return cls(
            jobs=max(1, int(section.get('jobs', cls.jobs))),
            trace_dir=str(section.get('trace_dir') or cls.trace_dir),
        )
