"""CSV/JSON file formats and all-or-nothing output writing."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from collections import OrderedDict
from pathlib import Path

import numpy as np

from .errors import InputError
from .physics import HeatingRateSeries, HeatingRatePoint

SCHEMA_VERSION = "1.0"

HEATING_RATE_COLUMNS = ("location", "temperature_K", "temperature_err_K", "frequency_Hz", "hr_q_per_s", "hr_err_q_per_s")
FIELD_NOISE_COLUMNS = ("S_V2_per_m2_Hz", "S_err_V2_per_m2_Hz")
DISTRIBUTION_COLUMNS = ("energy_eV", "density", "density_err")
PERIODOGRAM_COLUMNS = ("frequency_Hz", "psd")


def fmt(x) -> str:
    """Shortest round-trip representation, so CSV values survive re-reading exactly."""
    if isinstance(x, str):
        return x
    return repr(float(x))


def read_table(path, required=()):
    """Read a header-first CSV with '#' comment lines.

    Returns ``(header, rows)`` where each row is ``(line_number, dict)``.
    Raises :class:`InputError` naming the offending line.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    lines = [(i + 1, ln) for i, ln in enumerate(text.splitlines()) if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise InputError(f"{path}: no header row")
    header_line, header_text = lines[0]
    header = [h.strip() for h in next(csv.reader([header_text]))]
    missing = [c for c in required if c not in header]
    if missing:
        raise InputError(f"{path}:{header_line}: missing columns {missing}")
    rows = []
    for lineno, ln in lines[1:]:
        fields = [f.strip() for f in next(csv.reader([ln]))]
        if len(fields) != len(header):
            raise InputError(f"{path}:{lineno}: expected {len(header)} fields, got {len(fields)}")
        rows.append((lineno, dict(zip(header, fields))))
    if not rows:
        raise InputError(f"{path}: empty data section")
    return header, rows


def _float(row, col, path, lineno):
    try:
        v = float(row[col])
    except ValueError:
        raise InputError(f"{path}:{lineno}: column {col!r} is not a number: {row[col]!r}") from None
    if not np.isfinite(v):
        raise InputError(f"{path}:{lineno}: column {col!r} is not finite")
    return v


def read_heating_rates(path) -> "OrderedDict[str, HeatingRateSeries]":
    """Heating-rate CSV -> series per location (points sorted by temperature, then frequency)."""
    _, rows = read_table(path, HEATING_RATE_COLUMNS)
    groups: OrderedDict = OrderedDict()
    for lineno, row in rows:
        try:
            p = HeatingRatePoint(
                _float(row, "temperature_K", path, lineno),
                _float(row, "temperature_err_K", path, lineno),
                2 * np.pi * _float(row, "frequency_Hz", path, lineno),
                _float(row, "hr_q_per_s", path, lineno),
                _float(row, "hr_err_q_per_s", path, lineno),
            )
        except InputError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from None
        groups.setdefault(row["location"], []).append(p)
    return OrderedDict(
        (loc, HeatingRateSeries(loc, tuple(sorted(pts, key=lambda p: (p.temperature_K, p.frequency_rad_per_s)))))
        for loc, pts in groups.items()
    )


def heating_rates_csv(series_list) -> str:
    rows = []
    for s in series_list:
        for p in s.points:
            rows.append([s.location_id, p.temperature_K, p.temperature_err_K, p.frequency_rad_per_s / (2 * np.pi),
                         p.heating_rate_quanta_per_s, p.heating_rate_err_quanta_per_s])
    return table_csv(HEATING_RATE_COLUMNS, rows)


def table_csv(columns, rows, comments=()) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def columns_csv(columns: dict, comments=()) -> str:
    """CSV from a mapping of column name -> equal-length sequence."""
    names = list(columns)
    data = [np.asarray(columns[n]) if not isinstance(columns[n], list) else columns[n] for n in names]
    n = len(data[0]) if data else 0
    if any(len(d) != n for d in data):
        raise ValueError("columns must have equal length")
    return table_csv(names, [[d[i] for d in data] for i in range(n)], comments)


def distribution_csv(D, extra=None, comments=()) -> str:
    cols = {"energy_eV": D.energies_eV, "density": D.densities,
            "density_err": D.density_err if D.density_err is not None else np.zeros_like(D.densities)}
    if extra:
        cols.update(extra)
    return columns_csv(cols, comments)


def read_distribution(path):
    from .distributions import TabulatedDistribution

    _, rows = read_table(path, ("energy_eV", "density"))
    E = [_float(r, "energy_eV", path, n) for n, r in rows]
    D = [_float(r, "density", path, n) for n, r in rows]
    err = [_float(r, "density_err", path, n) for n, r in rows] if "density_err" in rows[0][1] else None
    return TabulatedDistribution(np.array(E), np.array(D), None if err is None else np.array(err))


def read_columns(path, columns):
    """Read named numeric columns from any CSV produced by this package."""
    _, rows = read_table(path, columns)
    return {c: np.array([_float(r, c, path, n) for n, r in rows]) for c in columns}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def make_report(command, config, model, parameters=None, statistics=None, residuals=None, notes=(), **extra):
    """Assemble a report document (see ``report_schema.json``)."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "model": model,
        "parameters": parameters or {},
        "statistics": statistics or {},
        "residuals": residuals or {},
        "notes": list(notes),
    }
    doc.update(extra)
    return _jsonable(doc)


def report_json(doc) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def report_schema() -> dict:
    return json.loads((Path(__file__).with_name("report_schema.json")).read_text())


class OutputSet:
    """Collects output files in memory and writes them only when everything succeeded.

    Each file is written to a temporary sibling and renamed into place, so an
    error during computation leaves no partial outputs behind.
    """

    def __init__(self):
        self._files: "OrderedDict[Path, bytes]" = OrderedDict()

    def add(self, path, content):
        if isinstance(content, str):
            content = content.encode()
        self._files[Path(path)] = content

    def __contains__(self, path):
        return Path(path) in self._files

    @property
    def paths(self):
        return list(self._files)

    def commit(self):
        written = []
        try:
            for path, data in self._files.items():
                path.parent.mkdir(parents=True, exist_ok=True)
                fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
                with os.fdopen(fd, "wb") as fh:
                    fh.write(data)
                os.replace(tmp, path)
                written.append(path)
        except OSError:
            for p in written:
                p.unlink(missing_ok=True)
            raise
        return written
