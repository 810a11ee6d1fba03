"""Failure dumps: the offending game plus the solver trace, for later minimization."""

import hashlib
import json
from pathlib import Path
from typing import Any, Optional

from core.game import GameSpec
from core.serialization import game_to_dict, serialize_game
from utils.logger import setup_logger

logger = setup_logger(__name__)


def game_digest(spec: GameSpec) -> str:
    return hashlib.sha256(serialize_game(spec)).hexdigest()


def _save_json(data: Any, path: Path) -> None:
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(data, f, ensure_ascii=False, indent=2, default=str)


def dump_failure(spec: GameSpec, trace: Any, reason: str, directory: str) -> Optional[Path]:
    """
    Write `<digest>.game.json` and `<digest>.trace.json` under `directory`.

    Returns:
        Path of the game file, or None if the dump itself failed.
    """
    target = Path(directory)
    stem = game_digest(spec)[:16]
    try:
        target.mkdir(parents=True, exist_ok=True)
        game_path = target / f"{stem}.game.json"
        _save_json(game_to_dict(spec), game_path)
        _save_json({"reason": reason, "trace": trace}, target / f"{stem}.trace.json")
    except OSError as e:
        logger.error(f"Could not write failure dump to {target}: {e}")
        return None
    logger.warning(f"Failure dump written to {game_path}")
    return game_path
