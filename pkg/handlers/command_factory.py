# handlers/command_factory.py
"""
Command-line surface: argparse wiring, dispatch to one handler per command,
and the mapping from library errors to process exit codes.
"""

import argparse
import logging
from typing import List, Optional

from config.config import default_seed
from config.run_config import get_enabled_variants
from core.errors import ConfigError, MorphGradError
from utils.constants import (EXIT_IO, EXIT_NUMERICAL, FILTER_IMPLS, FILTER_OPS, GRADCHECK_SCOPES, HELP_MESSAGE,
                             TOOL_NAME, TOOL_VERSION)

logger = logging.getLogger(__name__)


class CommandHandlerFactory:
    """Build the parser and route each command to its handler"""

    def __init__(self):
        from handlers.bench_handler import BenchHandler
        from handlers.compare_handler import CompareHandler
        from handlers.data_handler import DataHandler
        from handlers.evaluate_handler import EvaluateHandler
        from handlers.filter_handler import FilterHandler
        from handlers.gradcheck_handler import GradcheckHandler
        from handlers.train_handler import TrainHandler

        self.handlers = {
            "gen-data": DataHandler(),
            "filter": FilterHandler(),
            "train": TrainHandler(),
            "evaluate": EvaluateHandler(),
            "compare": CompareHandler(),
            "gradcheck": GradcheckHandler(),
            "bench": BenchHandler(),
        }
        self.parser = self.build_parser()

    # ============= PARSER =============

    def build_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(prog=TOOL_NAME, description=HELP_MESSAGE,
                                         formatter_class=argparse.RawDescriptionHelpFormatter)
        parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {TOOL_VERSION}")
        commands = parser.add_subparsers(dest="command", required=True)

        gen = commands.add_parser("gen-data", help="generate synthetic MORV1 volumes")
        gen.add_argument("--spec", required=True, help="JSON data spec")
        gen.add_argument("--out", required=True, help="output directory")

        flt = commands.add_parser("filter", help="apply a morphological operator to a volume")
        flt.add_argument("--in", dest="input", required=True, help="input MORV1 volume")
        flt.add_argument("--op", required=True, choices=FILTER_OPS)
        flt.add_argument("--impl", required=True, choices=FILTER_IMPLS)
        flt.add_argument("--p", type=float, default=1.0, help="CHM order magnitude (default 1)")
        flt.add_argument("--window", default="3,3,3", help="odd window extents d,h,w")
        flt.add_argument("--method", default="scan", choices=["scan", "separable"], help="flat extremum path")
        flt.add_argument("--out", required=True, help="output MORV1 volume")
        flt.add_argument("--slice-pgm", dest="slice_pgm", default=None, help="directory for mid-axis PGM sections")

        train = commands.add_parser("train", help="k-fold training of one variant")
        train.add_argument("--data", required=True, help="dataset directory written by gen-data")
        train.add_argument("--variant", required=True, choices=list(get_enabled_variants()))
        train.add_argument("--config", default=None, help="JSON run config")
        train.add_argument("--out", required=True, help="run directory")
        train.add_argument("--seed", type=int, default=None, help="overrides train.seed")

        evaluate = commands.add_parser("evaluate", help="re-score a finished run from its checkpoints")
        evaluate.add_argument("--run", required=True, help="run directory written by train")
        evaluate.add_argument("--data", required=True, help="dataset directory the run was trained on")
        evaluate.add_argument("--mode", default=None, choices=["ensemble", "out_of_fold"])

        compare = commands.add_parser("compare", help="collect runs into one table")
        compare.add_argument("--runs", required=True, nargs="+", help="run directories")
        compare.add_argument("--out", required=True, help="output CSV")

        grad = commands.add_parser("gradcheck", help="finite-difference gradient verification")
        grad.add_argument("--scope", required=True, choices=GRADCHECK_SCOPES)
        grad.add_argument("--seed", type=int, default=default_seed())

        bench = commands.add_parser("bench", help="time extremum and convolution kernels")
        bench.add_argument("--extent", type=int, default=32)
        bench.add_argument("--window", type=int, default=3)
        bench.add_argument("--repeat", type=int, default=3)
        bench.add_argument("--seed", type=int, default=default_seed())
        return parser

    # ============= DISPATCH =============

    def parse(self, argv: Optional[List[str]] = None) -> argparse.Namespace:
        args = self.parser.parse_args(argv)
        if args.command == "bench" and (args.extent < 1 or args.window < 1 or args.window % 2 == 0
                                        or args.repeat < 1):
            raise ConfigError("bench: extent and repeat must be >= 1, window odd and >= 1")
        return args

    def run(self, argv: Optional[List[str]] = None) -> int:
        """Execute one command; returns the process exit code"""
        try:
            args = self.parse(argv)
            logger.info(f"🚀 {TOOL_NAME} {args.command}")
            return self.handlers[args.command].handle(args)
        except SystemExit as e:
            # argparse: usage errors exit 2, --help/--version exit 0
            return e.code if isinstance(e.code, int) else 2
        except MorphGradError as e:
            logger.error(f"❌ {type(e).__name__}: {e}")
            print(f"error: {e}")
            return e.exit_code
        except AssertionError as e:
            logger.error(f"❌ Runtime assertion failed: {e}", exc_info=True)
            print(f"error: {e}")
            return EXIT_NUMERICAL
        except OSError as e:
            logger.error(f"❌ I/O error: {e}", exc_info=True)
            print(f"error: {e}")
            return EXIT_IO
        except Exception as e:
            logger.error(f"❌ Unexpected error: {e}", exc_info=True)
            print(f"error: {e}")
            return 1
