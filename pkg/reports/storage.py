import csv
import io
import json
import logging

from pathlib import Path
from typing import TypeVar

import numpy as np

from pydantic import BaseModel, ValidationError

from errors import SchemaError, StorageError
from evolution import EvolutionTrace
from utils import atomic_write
from .models import BranchRecord, MinimizerRecord, StabilityReport, WaveRecord

logger = logging.getLogger(__name__)

Model = TypeVar("Model", bound=BaseModel)

TABLE_COLUMNS = [
    "p", "sector", "branch", "a", "c", "nL1", "zL1", "nL2", "zL2", "nV", "zV",
    "rhs_index", "k_r", "k_c", "k_minus", "krein_verdict", "direct_verdict", "identity",
]


def _read_text(path: Path) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise StorageError(f"Failed to read {path}: {e}") from e


def _diagnostics(error: ValidationError) -> list[str]:
    return [f"{'.'.join(str(part) for part in item['loc']) or '<root>'}: {item['msg']}" for item in error.errors()]


def read_model(path: Path, model: type[Model]) -> Model:
    """
    Parse a JSON file into a record model.

    :param path: The file.
    :param model: The record class.
    :return: The validated record.
    """
    try:
        return model.model_validate_json(_read_text(path))
    except ValidationError as e:
        raise SchemaError(str(path), _diagnostics(e)) from e


def write_model(path: Path, record: BaseModel) -> Path:
    path = atomic_write(Path(path), record.model_dump_json(indent=2) + "\n")
    logger.debug(f"[Storage] wrote {path}")
    return path


def read_wave(path: Path) -> WaveRecord:
    return read_model(path, WaveRecord)


def read_branch(path: Path) -> BranchRecord:
    return read_model(path, BranchRecord)


def read_stability_report(path: Path) -> StabilityReport:
    return read_model(path, StabilityReport)


def read_minimizer_record(path: Path) -> MinimizerRecord:
    return read_model(path, MinimizerRecord)


def read_waves(path: Path) -> list[WaveRecord]:
    """Read either a single wave file or a branch file as a list of waves."""
    text = _read_text(path)
    try:
        is_branch = "points" in json.loads(text)
    except (json.JSONDecodeError, TypeError) as e:
        raise SchemaError(str(path), [f"<root>: {e}"]) from e
    if is_branch:
        return read_branch(path).wave_records()
    return [read_wave(path)]


def _csv_text(header: list[str], rows, comments: list[str] = ()) -> str:
    buffer = io.StringIO()
    for comment in comments:
        buffer.write(f"# {comment}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def write_eigenvalues_csv(path: Path, eigenvalues: np.ndarray) -> Path:
    """Eigenvalues sorted by real then imaginary part, columns re, im."""
    ordered = sorted((complex(value) for value in eigenvalues), key=lambda value: (value.real, value.imag))
    return atomic_write(Path(path), _csv_text(["re", "im"], [(repr(v.real), repr(v.imag)) for v in ordered]))


def read_eigenvalues_csv(path: Path) -> np.ndarray:
    rows = list(csv.DictReader(io.StringIO(_read_text(path))))
    try:
        return np.array([complex(float(row["re"]), float(row["im"])) for row in rows])
    except (KeyError, ValueError) as e:
        raise SchemaError(str(path), [f"row: {e}"]) from e


def write_branch_csv(path: Path, record: BranchRecord) -> Path:
    rows = [(repr(point.a), repr(point.c), repr(point.residual), repr(point.nodal_min)) for point in record.points]
    return atomic_write(Path(path), _csv_text(["a", "c", "residual", "nodal_min"], rows))


def write_trace_csv(path: Path, trace: EvolutionTrace) -> Path:
    comments = [f"dt={trace.dt!r}", f"epsilon={trace.epsilon!r}", f"seed={trace.seed}",
                f"p={trace.p}", f"N={trace.N}", f"method={trace.method}", f"status={trace.status}",
                f"refinement_delta={trace.refinement_delta!r}", f"growth_factor={trace.growth_factor()!r}",
                f"within_bound={str(trace.within_bound()).lower()}"]
    rows = [(repr(float(t)), repr(float(e)), repr(float(f)), repr(float(d)))
            for t, e, f, d in zip(trace.times, trace.energy, trace.mass, trace.deviation)]
    return atomic_write(Path(path), _csv_text(["t", "E", "F", "deviation"], rows, comments))


def read_trace_csv(path: Path) -> tuple[dict[str, str], dict[str, np.ndarray]]:
    """
    :return: (header values keyed by name, columns keyed by name).
    """
    header, body = {}, []
    for line in _read_text(path).splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            header[key] = value
        else:
            body.append(line)
    rows = list(csv.DictReader(body))
    try:
        columns = {name: np.array([float(row[name]) for row in rows]) for name in ("t", "E", "F", "deviation")}
    except (KeyError, ValueError) as e:
        raise SchemaError(str(path), [f"row: {e}"]) from e
    return header, columns


def write_report_table(path: Path, reports: list[StabilityReport]) -> Path:
    """Merge stability reports into one CSV, one row per point, sorted by (p, branch, a)."""
    ordered = sorted(reports, key=lambda report: (report.p, report.branch.value, report.a))
    rows = [[report.table_row()[column] for column in TABLE_COLUMNS] for report in ordered]
    return atomic_write(Path(path), _csv_text(TABLE_COLUMNS, rows))


__all__ = [
    "TABLE_COLUMNS",
    "read_model",
    "write_model",
    "read_wave",
    "read_branch",
    "read_stability_report",
    "read_minimizer_record",
    "read_waves",
    "write_eigenvalues_csv",
    "read_eigenvalues_csv",
    "write_branch_csv",
    "write_trace_csv",
    "read_trace_csv",
    "write_report_table",
]
