"""
Check tables and failure reports
"""

import json
import logging
import os
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from labs.orchestrator.schemas import CHECK_COLUMNS

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def _plain(value: Any) -> Any:
    """JSON fallback for numpy scalars and arrays"""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, tuple):
        return list(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def encode_inputs(inputs: Dict[str, Any]) -> str:
    """Canonical one-line JSON of the inputs of a check"""
    return json.dumps(inputs, sort_keys=True, separators=(",", ":"), default=_plain)


def check_row(command: str, check: str, inputs: Dict[str, Any], estimate: Optional[float],
              oracle: Optional[float], error: Optional[float], tolerance: Optional[float], passed: bool,
              error_bar: Optional[float] = None, exact: bool = False) -> Dict[str, Any]:
    """
    One row of a check table

    Args:
        command: Command that produced the row
        check: Check name
        inputs: Parameters identifying the check
        estimate: Computed value
        oracle: Reference value
        error: Discrepancy the tolerance is applied to
        tolerance: Threshold for the error
        passed: Outcome
        error_bar: Standard error for Monte Carlo estimates
        exact: Whether the oracle is exact

    Returns:
        Dict keyed by CHECK_COLUMNS
    """
    return {
        "command": command,
        "check": check,
        "inputs": encode_inputs(inputs),
        "estimate": None if estimate is None else float(estimate),
        "error_bar": None if error_bar is None else float(error_bar),
        "exact": bool(exact),
        "oracle": None if oracle is None else float(oracle),
        "error": None if error is None else float(error),
        "tolerance": None if tolerance is None else float(tolerance),
        "passed": bool(passed),
    }


def checks_frame(rows: List[Dict[str, Any]]) -> pd.DataFrame:
    return pd.DataFrame(rows, columns=CHECK_COLUMNS)


def write_checks(rows: List[Dict[str, Any]], path: str) -> str:
    """
    Write the check table as UTF-8 CSV with a header row

    Returns:
        The path written
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    checks_frame(rows).to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n",
                              encoding="utf-8")
    logger.info(f"Wrote {len(rows)} checks to {path}")
    return path


def failure_report_path(output: str) -> str:
    return f"{output}.failures.json"


def write_failure_report(command: str, rows: List[Dict[str, Any]], output: str,
                         error: Optional[Dict[str, Any]] = None) -> str:
    """
    Machine-readable report of failed checks (or of the error that stopped the run)

    Returns:
        The path written
    """
    failed = [row for row in rows if not row["passed"]]
    report = {
        "command": command,
        "checks": len(rows),
        "failed": len(failed),
        "failures": failed,
    }
    if error is not None:
        report["error"] = error
    path = failure_report_path(output)
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(report, handle, indent=2, sort_keys=True, default=_plain)
        handle.write("\n")
    logger.warning(f"Wrote failure report with {len(failed)} failed checks to {path}")
    return path
