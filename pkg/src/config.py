"""
trunc-dist Configuration
Loads settings from environment variables with sensible defaults.
"""

import logging
import os
from pathlib import Path
from dotenv import load_dotenv

_logger = logging.getLogger(__name__)

# Load .env file
env_path = Path(__file__).parent.parent / '.env'
load_dotenv(env_path)


def _int_setting(name: str, default: int, minimum: int) -> int:
    """Read an integer setting, refusing to start on garbage or out-of-range values."""
    raw = os.getenv(name, str(default))
    try:
        value = int(raw)
    except ValueError:
        _logger.critical(f"{name}={raw!r} is not an integer — cannot start.")
        raise ValueError(f"{name} must be an integer, got {raw!r}")
    if value < minimum:
        _logger.critical(f"{name}={value} is below the minimum {minimum} — cannot start.")
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value


def _float_setting(name: str, default: float) -> float:
    raw = os.getenv(name, str(default))
    try:
        value = float(raw)
    except ValueError:
        _logger.critical(f"{name}={raw!r} is not a number — cannot start.")
        raise ValueError(f"{name} must be a number, got {raw!r}")
    if not value > 0:
        _logger.critical(f"{name}={value} must be positive — cannot start.")
        raise ValueError(f"{name} must be > 0, got {value}")
    return value


class Config:
    """Application configuration."""

    # Default master seed for simulate / sweep / qhalf; --seed overrides
    SEED = _int_setting('TRUNC_DIST_SEED', 0, 0)

    # Monte Carlo
    WORKERS = _int_setting('TRUNC_DIST_WORKERS', 1, 1)
    TRIALS = _int_setting('TRUNC_DIST_TRIALS', 10000, 100)

    # Stand-in for the unspecified O(n) factor of the Bellare–Impagliazzo bound
    BI_CONSTANT = _float_setting('TRUNC_DIST_BI_CONSTANT', 1.0)

    # mpmath working precision (bits) for closed-form bounds
    PRECISION_BITS = _int_setting('TRUNC_DIST_PRECISION_BITS', 96, 80)

    # Logging
    LOG_DIR = Path(os.getenv('TRUNC_DIST_LOG_DIR', str(Path.home() / 'logs'))).expanduser()


# Singleton instance
config = Config()
