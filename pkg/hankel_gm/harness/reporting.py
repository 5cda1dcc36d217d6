"""Report persistence: long-format CSV with a metadata sidecar, or versioned JSON."""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Union

from jsonschema import ValidationError, validate

from hankel_gm.config.settings import settings
from hankel_gm.core.exceptions import ReportIOError
from hankel_gm.schemas import RATIO_REPORT_SCHEMA, RatioReport, RatioRow

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("fn", "p", "q", "c", "ratio_lebesgue", "ratio_lorentz", "err_budget", "flag")
_FLOAT_COLUMNS = ("p", "q", "c", "ratio_lebesgue", "err_budget")


def _sidecar(path: Path) -> Path:
    return path.with_suffix(".meta.json")


def _format(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _document(report: RatioReport) -> Dict[str, Any]:
    document = report.model_dump(mode="python")
    try:
        validate(instance=document, schema=RATIO_REPORT_SCHEMA)
    except ValidationError as e:
        raise ReportIOError("<report>", f"report does not match schema: {e.message}") from e
    return document


def emit_report(report: RatioReport, path: Union[str, Path], fmt: str = "csv") -> Path:
    """
    Write a report.

    CSV has the columns ``fn,p,q,c,ratio_lebesgue,ratio_lorentz,err_budget,flag``
    in row order, floats written with ``repr``; the alpha, skipped functions and
    metadata go to a ``.meta.json`` sidecar. JSON is the whole report with sorted
    keys, validated against the report schema first.

    Raises:
        ReportIOError: If the format is unknown or the file cannot be written
    """
    target = Path(path)
    fmt = fmt.lower()
    if fmt not in ("csv", "json"):
        raise ReportIOError(str(target), f"unknown report format '{fmt}'")
    document = _document(report)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        if fmt == "json":
            target.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        else:
            with target.open("w", newline="", encoding="utf-8") as handle:
                writer = csv.writer(handle, lineterminator="\n")
                writer.writerow(CSV_COLUMNS)
                for row in document["rows"]:
                    writer.writerow([_format(row[column]) for column in CSV_COLUMNS])
            meta = {k: v for k, v in document.items() if k != "rows"}
            _sidecar(target).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as e:
        raise ReportIOError(str(target), f"could not write report: {e}") from e
    logger.info(f"Wrote {len(report.rows)} rows to {target} ({fmt})")
    return target


def _rows_from_csv(target: Path) -> List[RatioRow]:
    with target.open("r", newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ReportIOError(str(target), f"unexpected CSV header {reader.fieldnames}")
        rows = []
        for record in reader:
            values: Dict[str, Any] = {column: float(record[column]) for column in _FLOAT_COLUMNS}
            lorentz = record["ratio_lorentz"]
            rows.append(RatioRow(
                fn=record["fn"],
                ratio_lorentz=float(lorentz) if lorentz != "" else None,
                flag=record["flag"],
                **values,
            ))
    return rows


def load_report(path: Union[str, Path]) -> RatioReport:
    """
    Read a report written by ``emit_report``; the format follows the suffix.

    Raises:
        ReportIOError: If the file is missing, malformed or of another schema version
    """
    target = Path(path)
    try:
        if target.suffix.lower() == ".json":
            document = json.loads(target.read_text(encoding="utf-8"))
        else:
            meta = json.loads(_sidecar(target).read_text(encoding="utf-8"))
            rows = [row.model_dump() for row in _rows_from_csv(target)]
            document = {**meta, "rows": rows}
        validate(instance=document, schema=RATIO_REPORT_SCHEMA)
    except (OSError, json.JSONDecodeError, ValueError) as e:
        raise ReportIOError(str(target), f"could not read report: {e}") from e
    except ValidationError as e:
        raise ReportIOError(str(target), f"report does not match schema: {e.message}") from e
    major = str(document["schema_version"]).split(".")[0]
    expected = settings.report_schema_version.split(".")[0]
    if major != expected:
        raise ReportIOError(str(target), f"unsupported schema version {document['schema_version']}")
    return RatioReport.model_validate(document)
