"""Loading the tabular document corpus (CSV/TSV/JSONL exports of No/BAB/Hadist/Len)."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from assocmine.errors import CorpusValidationError, ParseError, SchemaError

log = logging.getLogger(__name__)

ROLES = ("no", "bab", "text", "len")
REQUIRED_ROLES = ("no", "bab", "text")

DEFAULT_CSV_COLUMNS = {"no": "No", "bab": "BAB", "text": "Hadist", "len": "Len"}
DEFAULT_JSONL_FIELDS = {"no": "no", "bab": "bab", "text": "hadist", "len": "len"}


@dataclass(frozen=True)
class DocumentRecord:
    row_id: int
    chapter_id: int
    text: str
    declared_length: int


@dataclass(frozen=True)
class IngestReport:
    total: int
    accepted: int
    skipped: int
    problems: tuple[str, ...] = ()


@dataclass(frozen=True)
class Corpus:
    documents: tuple[DocumentRecord, ...]
    source_path: str
    ingest_report: IngestReport = field(compare=False)

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self) -> Iterator[DocumentRecord]:
        return iter(self.documents)

    @property
    def texts(self) -> list[str]:
        return [d.text for d in self.documents]


def _resolve_map(mapping: Mapping[str, str] | None, defaults: Mapping[str, str]) -> dict[str, str]:
    resolved = dict(defaults)
    if mapping:
        unknown = set(mapping) - set(ROLES)
        if unknown:
            raise SchemaError(f"unknown column role(s): {', '.join(sorted(unknown))}")
        resolved.update({k: v for k, v in mapping.items() if v is not None})
    return resolved


def _parse_int(value, what: str, minimum: int) -> int:
    if isinstance(value, bool):
        raise ValueError(f"{what} must be an integer, got {value!r}")
    if isinstance(value, int):
        n = value
    elif isinstance(value, float) and value.is_integer():
        n = int(value)
    else:
        s = str(value).strip()
        try:
            n = int(s)
        except ValueError:
            # spreadsheet exports sometimes write integers as "12.0"
            try:
                f = float(s)
            except ValueError:
                raise ValueError(f"{what} must be an integer, got {value!r}") from None
            if not f.is_integer():
                raise ValueError(f"{what} must be an integer, got {value!r}") from None
            n = int(f)
    if n < minimum:
        raise ValueError(f"{what} must be >= {minimum}, got {n}")
    return n


class _Collector:
    """Accumulates validated records; enforces id uniqueness and the skip policy."""

    def __init__(self, skip_invalid: bool):
        self.skip_invalid = skip_invalid
        self.docs: list[DocumentRecord] = []
        self.seen: set[int] = set()
        self.total = 0
        self.problems: list[str] = []

    def reject(self, where: str, reason: str) -> None:
        if not self.skip_invalid:
            raise CorpusValidationError(f"{where}: {reason}")
        self.problems.append(f"{where}: {reason}")

    def add(self, where: str, raw_no, raw_bab, raw_text, raw_len) -> None:
        self.total += 1
        try:
            row_id = _parse_int(raw_no, "row id", 1)
            chapter = _parse_int(raw_bab, "chapter", 0)
            text = "" if raw_text is None else str(raw_text)
            if not text.strip():
                raise ValueError("empty text")
            if raw_len is None or str(raw_len).strip() == "":
                declared = len(text)
            else:
                declared = _parse_int(raw_len, "length", 0)
        except ValueError as exc:
            self.reject(where, str(exc))
            return
        if row_id in self.seen:
            self.reject(where, f"duplicate row id {row_id}")
            return
        self.seen.add(row_id)
        self.docs.append(DocumentRecord(row_id, chapter, text, declared))

    def finish(self, path: Path) -> Corpus:
        report = IngestReport(
            total=self.total,
            accepted=len(self.docs),
            skipped=self.total - len(self.docs),
            problems=tuple(self.problems),
        )
        log.info("ingested %s: N=%d accepted, %d skipped of %d rows",
                 path, report.accepted, report.skipped, report.total)
        return Corpus(tuple(self.docs), str(path), report)


def _open_text(path: Path):
    # utf-8-sig: Excel's CSV export prepends a BOM
    return open(path, encoding="utf-8-sig", newline="")


def _decode_guard(path: Path, lines: Iterable):
    try:
        yield from lines
    except UnicodeDecodeError as exc:
        raise CorpusValidationError(f"{path}: not valid UTF-8 ({exc.reason} at byte {exc.start})") from None


def load_csv(
    path: str | Path,
    column_map: Mapping[str, str] | None = None,
    skip_invalid: bool = False,
    delimiter: str = ",",
) -> Corpus:
    """Read a delimited export with a header row.

    ``column_map`` maps roles (``no``, ``bab``, ``text``, ``len``) to header
    names and is merged over ``DEFAULT_CSV_COLUMNS``. The ``len`` column may
    be absent, in which case the declared length is the text's character count.
    """
    path = Path(path)
    cols = _resolve_map(column_map, DEFAULT_CSV_COLUMNS)
    out = _Collector(skip_invalid)
    with _open_text(path) as fh:
        reader = csv.reader(_decode_guard(path, fh), delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: missing header row") from None
        header = [h.strip() for h in header]
        index = {}
        for role in REQUIRED_ROLES:
            if cols[role] not in header:
                raise SchemaError(f"{path}: missing column {cols[role]!r} (role {role})")
            index[role] = header.index(cols[role])
        len_idx = header.index(cols["len"]) if cols["len"] in header else None
        for row in reader:
            if not row:
                continue
            where = f"{path}:{reader.line_num}"
            if len(row) < len(header):
                row = row + [""] * (len(header) - len(row))
            out.add(
                where,
                row[index["no"]],
                row[index["bab"]],
                row[index["text"]],
                None if len_idx is None else row[len_idx],
            )
    return out.finish(path)


def load_jsonl(
    path: str | Path,
    field_map: Mapping[str, str] | None = None,
    skip_invalid: bool = False,
) -> Corpus:
    """Read newline-delimited JSON objects; same contract as :func:`load_csv`."""
    path = Path(path)
    fields = _resolve_map(field_map, DEFAULT_JSONL_FIELDS)
    out = _Collector(skip_invalid)
    with _open_text(path) as fh:
        for lineno, line in enumerate(_decode_guard(path, fh), start=1):
            if not line.strip():
                continue
            where = f"{path}:{lineno}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                if not skip_invalid:
                    raise ParseError(f"{where}: invalid JSON ({exc.msg})") from None
                out.total += 1
                out.problems.append(f"{where}: invalid JSON")
                continue
            if not isinstance(obj, dict):
                if not skip_invalid:
                    raise ParseError(f"{where}: expected a JSON object")
                out.total += 1
                out.problems.append(f"{where}: not an object")
                continue
            missing = [fields[r] for r in REQUIRED_ROLES if fields[r] not in obj]
            if missing:
                if not skip_invalid:
                    raise SchemaError(f"{where}: missing field {missing[0]!r} on line {lineno}")
                out.total += 1
                out.problems.append(f"{where}: missing field {missing[0]!r}")
                continue
            out.add(where, obj[fields["no"]], obj[fields["bab"]], obj[fields["text"]], obj.get(fields["len"]))
    return out.finish(path)


def load_corpus(path: str | Path, fmt: str = "csv", column_map=None, skip_invalid=False, delimiter=",") -> Corpus:
    if fmt == "csv":
        return load_csv(path, column_map, skip_invalid, delimiter)
    if fmt == "tsv":
        return load_csv(path, column_map, skip_invalid, "\t")
    if fmt == "jsonl":
        return load_jsonl(path, column_map, skip_invalid)
    raise SchemaError(f"unsupported input format {fmt!r}")
