# config/config.py
import logging
import os
from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)

# Worker cap for concurrent folds (1 keeps runs trivially bit-deterministic)
MORPHGRAD_THREADS = os.getenv('MORPHGRAD_THREADS', '1')

# Logging
MORPHGRAD_LOG_LEVEL = os.getenv('MORPHGRAD_LOG_LEVEL', 'INFO').upper()

# Runtime positivity assertions in front of CHM operators inside blocks
MORPHGRAD_DEBUG = os.getenv('MORPHGRAD_DEBUG', 'false').lower() == 'true'

# Seed used when a command is not given one
MORPHGRAD_DEFAULT_SEED = os.getenv('MORPHGRAD_DEFAULT_SEED', '0')

VALID_LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')


def _as_int(value, fallback: int) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        return fallback


def thread_count() -> int:
    """Configured worker cap, never below 1"""
    return max(1, _as_int(MORPHGRAD_THREADS, 1))


def default_seed() -> int:
    return _as_int(MORPHGRAD_DEFAULT_SEED, 0)


def log_level() -> str:
    return MORPHGRAD_LOG_LEVEL if MORPHGRAD_LOG_LEVEL in VALID_LOG_LEVELS else 'INFO'


# Basic validation without raising errors
def validate_config():
    """Basic config validation"""
    problems = []
    if _as_int(MORPHGRAD_THREADS, 0) < 1:
        problems.append(f"MORPHGRAD_THREADS={MORPHGRAD_THREADS!r} (using 1)")
    if MORPHGRAD_LOG_LEVEL not in VALID_LOG_LEVELS:
        problems.append(f"MORPHGRAD_LOG_LEVEL={MORPHGRAD_LOG_LEVEL!r} (using INFO)")
    if _as_int(MORPHGRAD_DEFAULT_SEED, -1) < 0:
        problems.append(f"MORPHGRAD_DEFAULT_SEED={MORPHGRAD_DEFAULT_SEED!r} (using 0)")

    if problems:
        logger.warning(f"⚠️ Invalid environment settings: {', '.join(problems)}")
        return False

    return True
