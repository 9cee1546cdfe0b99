import json
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional, Union

import pandas as pd
import yaml
from dotenv import load_dotenv
from loguru import logger

from .models import CSV_COLUMNS, Settings, SweepRecord

DEFAULT_CONFIG_PATH = "config.yaml"


def load_settings(config_path: Optional[str] = None) -> Settings:
    """
    Load settings from YAML, falling back to defaults when no file exists

    The path comes from the argument, then WRLAT_CONFIG (.env is honoured),
    then config.yaml in the working directory.
    """
    load_dotenv()
    explicit = config_path or os.getenv("WRLAT_CONFIG")
    path = Path(explicit or DEFAULT_CONFIG_PATH)
    if not path.exists():
        if explicit:
            raise FileNotFoundError(f"config file not found: {path}")
        logger.debug(f"No {path} found, using default settings")
        return Settings()
    with open(path, "r") as f:
        config = yaml.safe_load(f) or {}
    settings = Settings.model_validate(config)
    logger.debug(f"Loaded settings from {path}")
    return settings


def setup_logging(level: Optional[str] = None, log_dir: Optional[Union[str, Path]] = None,
                  file_level: str = "DEBUG") -> Optional[Path]:
    """Configure logging to stderr and optionally to a log file"""
    # Remove default logger
    logger.remove()

    # stdout carries the reports, so console logs go to stderr
    logger.add(
        sys.stderr,
        level=level or os.getenv("WRLAT_LOG_LEVEL", "WARNING"),
        format="<green>{time:HH:mm:ss}</green> | <level>{message}</level>",
        colorize=True
    )

    if log_dir is None:
        return None
    log_file_path = Path(log_dir) / "wrlat.log"
    log_file_path.parent.mkdir(parents=True, exist_ok=True)
    logger.add(
        log_file_path,
        level=file_level,
        format="{time:YYYY-MM-DD HH:mm:ss} | {level} | {message}",
        rotation="10 MB"
    )
    logger.info(f"Logging to: {log_file_path}")
    return log_file_path


def dumps_json(data) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False, sort_keys=False) + "\n"


def save_to_json(data: Union[List, Dict], path: Union[str, Path]) -> bool:
    try:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            f.write(dumps_json(data))
        logger.info(f"Data saved to {path}")
        return True
    except OSError as e:
        logger.error(f"Failed to save JSON: {e}")
        return False


def records_frame(records: List[SweepRecord]) -> pd.DataFrame:
    frame = pd.DataFrame([record.csv_row() for record in records], columns=CSV_COLUMNS)
    # keep integer columns integral even when invalid rows leave holes
    for column in ("c", "d", "kissing", "delta_sq_num", "delta_sq_den"):
        frame[column] = frame[column].astype("Int64")
    for column in ("theorem_wr", "oracle_wr", "agree", "optimal", "enlarged_kissing"):
        frame[column] = frame[column].astype("boolean")
    return frame


def records_to_csv(records: List[SweepRecord]) -> str:
    return records_frame(records).to_csv(index=False, lineterminator="\n")


def save_to_csv(records: List[SweepRecord], path: Union[str, Path]) -> bool:
    try:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            f.write(records_to_csv(records))
        logger.info(f"Data saved to {path}")
        return True
    except OSError as e:
        logger.error(f"Failed to save CSV: {e}")
        return False
