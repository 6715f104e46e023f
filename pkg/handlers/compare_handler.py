# handlers/compare_handler.py
import json
import logging
import os
from typing import Dict, List, Sequence

from config.run_config import display_name, get_enabled_variants
from core.errors import ConfigError, MissingMetricsError
from models.configs import Variant
from models.metrics import Metrics
from utils.constants import COMPARE_COLUMNS, EXIT_OK, METRICS_JSON_FILE, REPORT_METRICS, REPORT_REGIONS
from utils.helpers import format_table, write_csv

logger = logging.getLogger(__name__)

VARIANT_ORDER = {variant: position for position, variant in enumerate(Variant)}


def load_run_metrics(run_dir: str) -> Dict:
    path = os.path.join(run_dir, METRICS_JSON_FILE)
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
        variant = Variant.parse(data["variant"])
        overall = Metrics.from_dict(data["overall"])
    except FileNotFoundError:
        raise MissingMetricsError(f"{run_dir}: no {METRICS_JSON_FILE}; has the run finished?")
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError, ConfigError) as e:
        raise MissingMetricsError(f"{path}: unreadable metrics: {e}") from e
    return {"run": run_dir, "variant": variant, "overall": overall}


def comparison_rows(runs: Sequence[Dict]) -> List[list]:
    """One row per run, ordered by variant declaration order (stable for equal variants)"""
    ordered = sorted(runs, key=lambda run: VARIANT_ORDER[run["variant"]])
    rows = []
    for run in ordered:
        row = [display_name(run["variant"])]
        for metric in REPORT_METRICS:
            for region in REPORT_REGIONS:
                value = run["overall"].regions.get(region, {}).get(metric)
                row.append("" if value is None else value)
        rows.append(row)
    return rows


class CompareHandler:
    """Collect finished runs into one region x metric table"""

    def handle(self, args) -> int:
        enabled = {entry["variant"] for entry in get_enabled_variants().values()}
        runs = []
        for run_dir in args.runs:
            run = load_run_metrics(run_dir)
            variant = run["variant"]
            if variant not in enabled:
                logger.warning(f"⚠️ Skipping {run_dir}: variant '{variant.value}' is disabled")
                continue
            runs.append(run)
        if not runs:
            raise MissingMetricsError("compare: none of the given runs belongs to an enabled variant")
        rows = comparison_rows(runs)
        write_csv(args.out, COMPARE_COLUMNS, rows)
        logger.info(f"✅ Comparison of {len(rows)} run(s) written to {args.out}")
        print(format_table(COMPARE_COLUMNS, rows))
        return EXIT_OK
