"""Dataset ingestion, result tables and configuration files.

Word lists are UTF-8 tab-separated with header ``variety<TAB>concept<TAB>word``;
metadata is comma-separated with header ``variety,name,latitude,longitude,clade``.
Numeric result tables are written as CSV (``\\n`` line endings, 17 significant
digits) or JSON (a list of objects keyed by column name).
"""

from __future__ import annotations

import csv
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .analytics import EvolutionParams, load_default_config
from .errors import DatasetError, LexiclockError
from .estimation import SwadeshDataset, VarietyMeta

__all__ = [
    "DatasetFiles",
    "LISTS_HEADER",
    "META_HEADER",
    "CONFIG_ENV",
    "load_dataset",
    "write_dataset",
    "load_word_list",
    "write_results",
    "read_results",
    "format_number",
    "load_config",
    "params_from_config",
]

LISTS_HEADER = ("variety", "concept", "word")
META_HEADER = ("variety", "name", "latitude", "longitude", "clade")
CONFIG_ENV = "LEXICLOCK_CONFIG"
NA = "NA"


@dataclass(frozen=True)
class DatasetFiles:
    lists_path: Path
    meta_path: Path
    config_path: Path | None = None


def _open_text(path, mode="r"):
    try:
        return open(path, mode, encoding="utf-8", newline="")
    except OSError as exc:
        raise DatasetError(f"{path}: {exc.strerror}") from exc


def _check_header(path, found, expected, line=1):
    if [h.strip() for h in found] != list(expected):
        raise DatasetError(
            f"{path}:{line}: expected header {'/'.join(expected)!s}, got {'/'.join(found)!s}"
        )


def _parse_coordinate(path, line, name, text, limit):
    try:
        value = float(text)
    except ValueError:
        raise DatasetError(f"{path}:{line}: {name} {text!r} is not a number") from None
    if not (math.isfinite(value) and abs(value) <= limit):
        raise DatasetError(f"{path}:{line}: {name} {value} outside [-{limit}, {limit}]")
    return value


def _load_meta(path) -> list[VarietyMeta]:
    varieties: list[VarietyMeta] = []
    seen: dict[str, int] = {}
    with _open_text(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise DatasetError(f"{path}: empty metadata file")
        _check_header(path, header, META_HEADER)
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(META_HEADER):
                raise DatasetError(f"{path}:{line}: expected {len(META_HEADER)} fields, got {len(row)}")
            vid, name, lat, lon, clade = (c.strip() for c in row)
            if not vid:
                raise DatasetError(f"{path}:{line}: empty variety id")
            if vid in seen:
                raise DatasetError(f"{path}:{line}: variety {vid!r} already defined on line {seen[vid]}")
            if not clade:
                raise DatasetError(f"{path}:{line}: variety {vid!r} has an empty clade label")
            seen[vid] = line
            varieties.append(
                VarietyMeta(
                    id=vid,
                    name=name,
                    latitude=_parse_coordinate(path, line, "latitude", lat, 90.0),
                    longitude=_parse_coordinate(path, line, "longitude", lon, 180.0),
                    clade=clade,
                )
            )
    return varieties


def load_dataset(files: DatasetFiles) -> SwadeshDataset:
    """Read a word table and its metadata into a :class:`SwadeshDataset`.

    Concepts are ordered by first appearance in the word table, varieties by
    their order in the metadata. Absent (variety, concept) cells and empty
    word fields are both missing data.
    """
    varieties = _load_meta(files.meta_path)
    known = {v.id for v in varieties}
    concepts: dict[str, int] = {}
    cells: dict[tuple[str, str], tuple[str, int]] = {}
    path = files.lists_path
    with _open_text(path) as fh:
        lines = fh.read().split("\n")
    if not lines or not lines[0].strip():
        raise DatasetError(f"{path}: empty word-list file")
    _check_header(path, lines[0].rstrip("\r").split("\t"), LISTS_HEADER)
    for number, raw in enumerate(lines[1:], start=2):
        raw = raw.rstrip("\r")
        if not raw.strip():
            continue
        fields = raw.split("\t")
        if len(fields) == 2:
            fields.append("")
        if len(fields) != 3:
            raise DatasetError(f"{path}:{number}: expected 3 tab-separated fields, got {len(fields)}")
        vid, concept, word = fields[0].strip(), fields[1].strip(), fields[2].strip()
        if vid not in known:
            raise DatasetError(f"{path}:{number}: unknown variety {vid!r} (not in metadata)")
        if not concept:
            raise DatasetError(f"{path}:{number}: empty concept id")
        key = (vid, concept)
        if key in cells:
            raise DatasetError(
                f"{path}:{number}: duplicate entry for variety {vid!r}, concept {concept!r} "
                f"(first on line {cells[key][1]})"
            )
        cells[key] = (word, number)
        concepts.setdefault(concept, len(concepts))
    words = [[cells.get((v.id, c), ("", 0))[0] for c in concepts] for v in varieties]
    try:
        return SwadeshDataset(varieties, list(concepts), words)
    except LexiclockError as exc:
        raise DatasetError(f"{path}: {exc}") from None


def write_dataset(ds: SwadeshDataset, lists_path, meta_path) -> None:
    """Write ``ds`` in the two-file input format; missing words get an empty field."""
    with _open_text(meta_path, "w") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(META_HEADER)
        for v in ds.varieties:
            writer.writerow([v.id, v.name, repr(v.latitude), repr(v.longitude), v.clade])
    with _open_text(lists_path, "w") as fh:
        fh.write("\t".join(LISTS_HEADER) + "\n")
        for v, row in zip(ds.varieties, ds.words):
            for concept, word in zip(ds.concepts, row):
                fh.write(f"{v.id}\t{concept}\t{word}\n")


def load_word_list(path) -> tuple[list[str], list[str]]:
    """Single word list: TSV with header ``concept<TAB>word``."""
    concepts, words = [], []
    seen: dict[str, int] = {}
    with _open_text(path) as fh:
        lines = fh.read().split("\n")
    if not lines or not lines[0].strip():
        raise DatasetError(f"{path}: empty word-list file")
    _check_header(path, lines[0].rstrip("\r").split("\t"), ("concept", "word"))
    for number, raw in enumerate(lines[1:], start=2):
        raw = raw.rstrip("\r")
        if not raw.strip():
            continue
        fields = raw.split("\t")
        if len(fields) == 1:
            fields.append("")
        if len(fields) != 2:
            raise DatasetError(f"{path}:{number}: expected 2 tab-separated fields, got {len(fields)}")
        concept = fields[0].strip()
        if concept in seen:
            raise DatasetError(
                f"{path}:{number}: duplicate concept {concept!r} (first on line {seen[concept]})"
            )
        seen[concept] = number
        concepts.append(concept)
        words.append(fields[1].strip())
    return concepts, words


def format_number(value) -> str:
    """Locale-independent text for a table cell; ``None`` becomes ``NA``."""
    if value is None:
        return NA
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            raise LexiclockError("refusing to write NaN; use None for undefined cells")
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, ".17g")
    return str(value)


def _json_cell(value):
    if isinstance(value, float):
        if math.isnan(value):
            raise LexiclockError("refusing to write NaN; use None for undefined cells")
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
    return value


def _as_rows(table, columns):
    rows = []
    for row in table:
        if isinstance(row, dict):
            rows.append([row[c] for c in columns])
        else:
            rows.append(list(row))
        if len(rows[-1]) != len(columns):
            raise LexiclockError("row width does not match the column list")
    return rows


def write_results(
    table: Iterable, path, fmt: str = "csv", columns: Sequence[str] | None = None
) -> None:
    """Write rows (tuples, namedtuples or dicts) as CSV or JSON.

    ``columns`` defaults to the namedtuple fields of the first row. ``path``
    may be ``"-"`` or ``None`` for standard output.
    """
    table = list(table)
    if columns is None:
        if not table or not hasattr(table[0], "_fields"):
            raise LexiclockError("columns are required unless rows are namedtuples")
        columns = list(table[0]._fields)
    rows = _as_rows(table, columns)
    if fmt == "csv":
        text = ",".join(columns) + "\n"
        text += "".join(",".join(format_number(v) for v in row) + "\n" for row in rows)
    elif fmt == "json":
        text = json.dumps(
            [{c: _json_cell(v) for c, v in zip(columns, row)} for row in rows], indent=2
        ) + "\n"
    else:
        raise LexiclockError(f"unknown format {fmt!r}")
    emit_text(text, path)


def emit_text(text: str, path) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise LexiclockError(f"{path}: {exc.strerror}") from exc


def _parse_cell(text: str):
    if text == NA:
        return None
    if text != "-0":
        try:
            return int(text)
        except ValueError:
            pass
    try:
        return float(text)
    except ValueError:
        return text


def read_results(path, fmt: str = "csv") -> list[dict]:
    """Read a table written by :func:`write_results` back into dicts."""
    with _open_text(path) as fh:
        if fmt == "json":
            data = json.load(fh)
            return [
                {k: float(v) if v in ("inf", "-inf") else v for k, v in row.items()} for row in data
            ]
        reader = csv.reader(fh)
        header = next(reader)
        return [dict(zip(header, (_parse_cell(c) for c in row))) for row in reader]


def load_config(path=None) -> dict:
    """Packaged defaults overlaid with a JSON config file.

    ``path`` falls back to the ``LEXICLOCK_CONFIG`` environment variable.
    Recognised keys: ``lambda``, ``mu``, ``n_eff``, ``l_eff``, ``m``, ``theta``.
    """
    cfg = load_default_config()
    path = path or os.environ.get(CONFIG_ENV) or None
    if path is None:
        return cfg
    try:
        with open(path, encoding="utf-8") as fh:
            user = json.load(fh)
    except OSError as exc:
        raise LexiclockError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise LexiclockError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from exc
    if not isinstance(user, dict):
        raise LexiclockError(f"{path}: config must be a JSON object")
    unknown = set(user) - set(cfg)
    if unknown:
        raise LexiclockError(f"{path}: unknown config keys {sorted(unknown)}")
    cfg.update(user)
    return cfg


def params_from_config(cfg: dict) -> EvolutionParams:
    return EvolutionParams.from_mapping(cfg)
