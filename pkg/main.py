# main.py
"""
morphgrad command-line entry point
"""

import logging
import sys

from config.config import log_level, validate_config

# Configure logging
logging.basicConfig(
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    level=getattr(logging, log_level())
)
logger = logging.getLogger(__name__)

from handlers.command_factory import CommandHandlerFactory


def main(argv=None) -> int:
    validate_config()
    factory = CommandHandlerFactory()
    return factory.run(argv)


if __name__ == '__main__':
    sys.exit(main())
