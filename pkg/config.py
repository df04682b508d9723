# Configuration file for the coherent-logic reasoning engine

import logging
import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field

# Search and enumeration bounds
ENGINE_CONFIG = {
    "chase_fuel": 10_000,
    "max_depth": 12,
    "normalize_limit": 10_000,
    "pair_fuel": 1_000,  # per chase pair inside a Beth tree
    "beth_depth": 6,
    "derivation_depth": 6,  # cover search behind derived implication instances
    "oracle_size": 3,
    "oracle_hard_cap": 4,
    "fact_space_exponent": 24,
}

# API Configuration
API_CONFIG = {
    "default_host": "0.0.0.0",
    "default_port": 8000,
    "cors_origins": ["*"],  # Configure for production
}

# Logging Configuration
LOGGING_CONFIG = {
    "level": os.getenv("LOG_LEVEL", "INFO").upper(),
    "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
}

ENV_PREFIX = "ENGINE_"


class EngineSettings(BaseModel):
    chase_fuel: int = Field(ENGINE_CONFIG["chase_fuel"], gt=0)
    max_depth: int = Field(ENGINE_CONFIG["max_depth"], ge=0)
    normalize_limit: int = Field(ENGINE_CONFIG["normalize_limit"], gt=0)
    pair_fuel: int = Field(ENGINE_CONFIG["pair_fuel"], gt=0)
    beth_depth: int = Field(ENGINE_CONFIG["beth_depth"], ge=0)
    max_size: int = Field(ENGINE_CONFIG["oracle_size"], ge=0, le=ENGINE_CONFIG["oracle_hard_cap"])


def load_settings(**overrides) -> EngineSettings:
    """Defaults, then ENGINE_* environment variables (a .env file included), then explicit overrides"""
    load_dotenv()
    values = {}
    for name in EngineSettings.model_fields:
        raw = os.getenv(ENV_PREFIX + name.upper())
        if raw is not None:
            values[name] = raw
    values.update({k: v for k, v in overrides.items() if v is not None})
    return EngineSettings(**values)


def configure_logging(verbosity: int = 0, level: Optional[str] = None) -> None:
    """Send log records to stderr; each -v step lowers the threshold"""
    if level is None:
        level = "DEBUG" if verbosity > 0 else LOGGING_CONFIG["level"]
    logging.basicConfig(level=getattr(logging, level.upper()), format=LOGGING_CONFIG["format"], force=True)
