"""Raw behavior-log schema, ingestion and validation.

One row is one five-minute sample of a single character. Two on-disk formats
are supported, CSV with a fixed header and JSON lines, and both carry optional
``label`` (human/bot) and ``style`` (play-style archetype) columns.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, fields
from typing import IO, Iterable, Sequence

LABELS = ("human", "bot")
STYLES = ("Killer", "Achiever", "Explorer", "Remainder")

COUNT_FIELDS = (
    "hunting",
    "attack",
    "hit",
    "defense",
    "avoidance",
    "recovery",
    "item",
    "collection",
    "drop",
)
COLUMNS = (
    "player_id",
    "timestamp",
    *COUNT_FIELDS,
    "x",
    "y",
    "portal",
    "label",
    "style",
)


class LogFormatError(ValueError):
    """A log row failed to parse or violated a sample invariant."""

    def __init__(self, reason: str, line: int | None = None):
        self.reason = reason
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + reason)


@dataclass(frozen=True)
class BehaviorSample:
    player_id: str
    timestamp: int
    hunting: int
    attack: int
    hit: int
    defense: int
    avoidance: int
    recovery: int
    item: int
    collection: int
    drop: int
    x: float
    y: float
    portal: int

    def validate(self) -> None:
        for name in (*COUNT_FIELDS, "portal"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise LogFormatError(f"{name} must be a non-negative integer, got {value!r}")
        if self.hit > self.attack:
            raise LogFormatError("hit exceeds attack")
        if self.avoidance > self.defense:
            raise LogFormatError("avoidance exceeds defense")


@dataclass(frozen=True)
class LabeledSample:
    sample: BehaviorSample
    label: str | None = None
    style: str | None = None
    # source line, for error messages only
    line: int | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.label is not None and self.label not in LABELS:
            raise LogFormatError(f"unknown label {self.label!r}")
        if self.style is not None and self.style not in STYLES:
            raise LogFormatError(f"unknown style {self.style!r}")
        if self.style is not None and self.label is None:
            raise LogFormatError("style given without label")

    @property
    def player_id(self) -> str:
        return self.sample.player_id

    @property
    def timestamp(self) -> int:
        return self.sample.timestamp


def _parse_count(name: str, raw) -> int:
    if isinstance(raw, bool):
        raise LogFormatError(f"non-numeric {name}: {raw!r}")
    if isinstance(raw, int):
        return raw
    if isinstance(raw, float):
        if raw.is_integer():
            return int(raw)
        raise LogFormatError(f"non-integer {name}: {raw!r}")
    try:
        return int(str(raw).strip())
    except ValueError:
        raise LogFormatError(f"non-numeric {name}: {raw!r}") from None


def _parse_real(name: str, raw) -> float:
    if isinstance(raw, bool):
        raise LogFormatError(f"non-numeric {name}: {raw!r}")
    try:
        value = float(raw)
    except (TypeError, ValueError):
        raise LogFormatError(f"non-numeric {name}: {raw!r}") from None
    if value != value or value in (float("inf"), float("-inf")):
        raise LogFormatError(f"non-finite {name}: {raw!r}")
    return value


def _token(name: str, raw, allowed: Sequence[str]) -> str | None:
    if raw is None or raw == "":
        return None
    if raw not in allowed:
        raise LogFormatError(f"unknown {name} token {raw!r}")
    return raw


def _record_to_sample(record: dict, line: int | None = None) -> LabeledSample:
    missing = [c for c in COLUMNS[:14] if c not in record or record[c] is None]
    if missing:
        raise LogFormatError(f"missing column {missing[0]!r}")
    pid = str(record["player_id"])
    if not pid:
        raise LogFormatError("empty player_id")
    values = {name: _parse_count(name, record[name]) for name in (*COUNT_FIELDS, "portal")}
    sample = BehaviorSample(
        player_id=pid,
        timestamp=_parse_count("timestamp", record["timestamp"]),
        x=_parse_real("x", record["x"]),
        y=_parse_real("y", record["y"]),
        **values,
    )
    sample.validate()
    label = _token("label", record.get("label"), LABELS)
    style = _token("style", record.get("style"), STYLES)
    return LabeledSample(sample, label, style, line=line)


def parse_log(stream: IO[bytes] | IO[str] | bytes | str, format: str = "csv") -> list[LabeledSample]:
    """Parse a behavior log into labeled samples, in input order.

    ``stream`` may be a binary or text file object, or the raw content.
    Errors are raised as :class:`LogFormatError` carrying the 1-based line
    number (the CSV header is line 1).
    """
    if format not in ("csv", "jsonl"):
        raise ValueError(f"unsupported log format {format!r}")
    if isinstance(stream, (bytes, str)):
        data = stream
    else:
        data = stream.read()
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    if format == "csv":
        return _parse_csv(text)
    return _parse_jsonl(text)


def _parse_csv(text: str) -> list[LabeledSample]:
    if not text.strip():
        return []
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(h.strip() for h in header) != COLUMNS:
        raise LogFormatError(f"bad header, expected {','.join(COLUMNS)}", line=1)
    out = []
    for row in reader:
        line = reader.line_num
        if not row:
            continue
        if len(row) != len(COLUMNS):
            raise LogFormatError(
                f"missing column: expected {len(COLUMNS)} fields, got {len(row)}", line=line
            )
        try:
            out.append(_record_to_sample(dict(zip(COLUMNS, row)), line))
        except LogFormatError as err:
            raise LogFormatError(err.reason, line=line) from None
    return out


def _parse_jsonl(text: str) -> list[LabeledSample]:
    out = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as err:
            raise LogFormatError(f"invalid JSON: {err.msg}", line=line_no) from None
        if not isinstance(record, dict):
            raise LogFormatError("expected a JSON object", line=line_no)
        unknown = set(record) - set(COLUMNS)
        if unknown:
            raise LogFormatError(f"unknown field {sorted(unknown)[0]!r}", line=line_no)
        try:
            out.append(_record_to_sample(record, line_no))
        except LogFormatError as err:
            raise LogFormatError(err.reason, line=line_no) from None
    return out


def _sample_record(ls: LabeledSample) -> dict:
    s = ls.sample
    record = {f.name: getattr(s, f.name) for f in fields(BehaviorSample)}
    if ls.label is not None:
        record["label"] = ls.label
    if ls.style is not None:
        record["style"] = ls.style
    return record


def serialize_log(samples: Iterable[LabeledSample], format: str = "csv") -> str:
    """Render samples in ``format``; inverse of :func:`parse_log`."""
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for ls in samples:
            rec = _sample_record(ls)
            writer.writerow([_csv_cell(rec.get(c)) for c in COLUMNS])
        return buf.getvalue()
    if format == "jsonl":
        return "".join(json.dumps(_sample_record(ls)) + "\n" for ls in samples)
    raise ValueError(f"unsupported log format {format!r}")


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def read_log(path, format: str | None = None) -> list[LabeledSample]:
    """Read a log file; the format defaults to the file extension."""
    path = str(path)
    if format is None:
        format = "jsonl" if path.endswith((".jsonl", ".json")) else "csv"
    with open(path, "rb") as fh:
        return parse_log(fh, format)


def write_log(samples: Iterable[LabeledSample], path, format: str | None = None) -> None:
    path = str(path)
    if format is None:
        format = "jsonl" if path.endswith((".jsonl", ".json")) else "csv"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(serialize_log(samples, format))


def group_by_player(samples: Iterable[LabeledSample]) -> dict[str, list[LabeledSample]]:
    """Group samples per player, each list sorted by timestamp (stable).

    Raises ``LogFormatError`` when one player carries two different labels.
    A player may mix labeled and unlabeled rows only if all labels agree.
    """
    groups: dict[str, list[LabeledSample]] = {}
    labels: dict[str, str] = {}
    for ls in samples:
        pid = ls.player_id
        groups.setdefault(pid, []).append(ls)
        if ls.label is not None:
            seen = labels.setdefault(pid, ls.label)
            if seen != ls.label:
                raise LogFormatError(
                    f"conflicting labels for player {pid!r}: {seen} vs {ls.label}", line=ls.line
                )
    return {pid: sorted(rows, key=lambda r: r.timestamp) for pid, rows in groups.items()}
