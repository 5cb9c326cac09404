"""Annotation corpus data model: records, datasets, file I/O, descriptive stats.

A corpus is a flat list of :class:`AnnotationRecord`; each record is one
annotator's label set plus a 1-5 confidence score for one discourse-unit
pair in one dialogue context.  Datasets are immutable after construction
and safe to share across threads.

File formats (UTF-8, no BOM):

* JSONL - one object per line with keys ``record_id``, ``annotator``,
  ``team``, ``conversation``, ``du_pair``, ``context``, ``labels``
  (list of tokens), ``confidence``.
* CSV - same columns, labels pipe-separated (``elaboration|contrast``).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .labels import ContextKind, RelationLabel, CONTEXTS, LABELS

_COLUMNS = (
    "record_id",
    "annotator",
    "team",
    "conversation",
    "du_pair",
    "context",
    "labels",
    "confidence",
)


class DatasetError(ValueError):
    """Raised for malformed corpus files or invalid records."""


@dataclass(frozen=True)
class AnnotationRecord:
    """One annotator's labels + confidence for one DU pair in one context."""

    record_id: str
    annotator_id: str
    team_id: str
    conversation_id: str
    du_pair_id: str
    context: ContextKind
    labels: frozenset[RelationLabel]
    confidence: int

    def __post_init__(self):
        if not self.labels:
            raise DatasetError(f"record {self.record_id!r}: empty label set")
        if self.confidence not in (1, 2, 3, 4, 5):
            raise DatasetError(
                f"record {self.record_id!r}: confidence {self.confidence} "
                f"out of range [1,5]"
            )

    def sorted_labels(self) -> list[RelationLabel]:
        """Labels in canonical column order (stable serialization order)."""
        return sorted(self.labels)


class Dataset:
    """Immutable ordered collection of annotation records with index maps.

    Index maps by annotator, DU pair and conversation hold record positions
    and make no nesting assumption (an annotator may appear in any number
    of conversations).
    """

    def __init__(self, records: Iterable[AnnotationRecord]):
        recs = tuple(records)
        if not recs:
            raise DatasetError("dataset must contain at least one record")
        seen: set[str] = set()
        for r in recs:
            if r.record_id in seen:
                raise DatasetError(f"duplicate record_id {r.record_id!r}")
            seen.add(r.record_id)
        self._records = recs
        self._by_annotator = _index_by(recs, lambda r: r.annotator_id)
        self._by_du_pair = _index_by(recs, lambda r: r.du_pair_id)
        self._by_conversation = _index_by(recs, lambda r: r.conversation_id)

    @property
    def records(self) -> tuple[AnnotationRecord, ...]:
        return self._records

    @property
    def by_annotator(self) -> Mapping[str, tuple[int, ...]]:
        return self._by_annotator

    @property
    def by_du_pair(self) -> Mapping[str, tuple[int, ...]]:
        return self._by_du_pair

    @property
    def by_conversation(self) -> Mapping[str, tuple[int, ...]]:
        return self._by_conversation

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[AnnotationRecord]:
        return iter(self._records)

    def __eq__(self, other) -> bool:
        return isinstance(other, Dataset) and self._records == other._records

    def __repr__(self) -> str:
        return (
            f"Dataset(n={len(self)}, annotators={len(self._by_annotator)}, "
            f"du_pairs={len(self._by_du_pair)})"
        )


def _index_by(records, key) -> dict[str, tuple[int, ...]]:
    out: dict[str, list[int]] = {}
    for i, r in enumerate(records):
        out.setdefault(key(r), []).append(i)
    return {k: tuple(v) for k, v in out.items()}


# ---------------------------------------------------------------------------
# Parsing / serialization
# ---------------------------------------------------------------------------


def _record_from_fields(line_no: int, record_id, annotator, team, conversation,
                        du_pair, context, label_tokens, confidence) -> AnnotationRecord:
    where = f"line {line_no}"
    for name, val in (("record_id", record_id), ("annotator", annotator),
                      ("team", team), ("conversation", conversation),
                      ("du_pair", du_pair)):
        if not isinstance(val, str) or not val:
            raise DatasetError(f"{where}: field {name!r} must be a non-empty string")
    try:
        ctx = ContextKind.from_token(context)
    except ValueError as exc:
        raise DatasetError(f"{where}: {exc}") from None
    if not label_tokens:
        raise DatasetError(f"{where}: empty label list")
    labels = []
    for tok in label_tokens:
        try:
            labels.append(RelationLabel.from_token(tok))
        except ValueError as exc:
            raise DatasetError(f"{where}: {exc}") from None
    if len(set(labels)) != len(labels):
        raise DatasetError(f"{where}: duplicate labels {label_tokens!r}")
    if not isinstance(confidence, int) or isinstance(confidence, bool) \
            or confidence < 1 or confidence > 5:
        raise DatasetError(f"{where}: confidence {confidence!r} out of range [1,5]")
    return AnnotationRecord(
        record_id=record_id,
        annotator_id=annotator,
        team_id=team,
        conversation_id=conversation,
        du_pair_id=du_pair,
        context=ctx,
        labels=frozenset(labels),
        confidence=confidence,
    )


def _iter_jsonl(path: Path) -> Iterator[AnnotationRecord]:
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"line {line_no}: malformed JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise DatasetError(f"line {line_no}: expected a JSON object")
            missing = [c for c in _COLUMNS if c not in obj]
            if missing:
                raise DatasetError(f"line {line_no}: missing fields {missing}")
            if not isinstance(obj["labels"], list):
                raise DatasetError(f"line {line_no}: 'labels' must be a list")
            yield _record_from_fields(
                line_no, obj["record_id"], obj["annotator"], obj["team"],
                obj["conversation"], obj["du_pair"], obj["context"],
                obj["labels"], obj["confidence"],
            )


def _iter_csv(path: Path) -> Iterator[AnnotationRecord]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or set(reader.fieldnames) != set(_COLUMNS):
            raise DatasetError(
                f"line 1: CSV header must be exactly {','.join(_COLUMNS)}"
            )
        for row in reader:
            line_no = reader.line_num
            if any(row[c] is None for c in _COLUMNS):
                raise DatasetError(f"line {line_no}: wrong number of columns")
            try:
                conf = int(row["confidence"])
            except ValueError:
                raise DatasetError(
                    f"line {line_no}: confidence {row['confidence']!r} is not an integer"
                ) from None
            yield _record_from_fields(
                line_no, row["record_id"], row["annotator"], row["team"],
                row["conversation"], row["du_pair"], row["context"],
                row["labels"].split("|"), conf,
            )


def parse_dataset(path, format: str | None = None) -> Dataset:
    """Parse a JSONL or CSV corpus file into a validated :class:`Dataset`.

    ``format`` is ``"jsonl"`` or ``"csv"``; when omitted it is inferred from
    the file suffix.  Row order is preserved.  Raises :class:`DatasetError`
    naming the offending line on any malformed row, unknown label/context
    token, out-of-range confidence, or duplicate record_id.
    """
    path = Path(path)
    if format is None:
        format = path.suffix.lstrip(".").lower()
    if format == "jsonl":
        return Dataset(_iter_jsonl(path))
    if format == "csv":
        return Dataset(_iter_csv(path))
    raise DatasetError(f"unknown format {format!r} (expected 'jsonl' or 'csv')")


def record_to_obj(r: AnnotationRecord) -> dict:
    """JSON-serializable object for one record (canonical label order)."""
    return {
        "record_id": r.record_id,
        "annotator": r.annotator_id,
        "team": r.team_id,
        "conversation": r.conversation_id,
        "du_pair": r.du_pair_id,
        "context": r.context.token,
        "labels": [lab.token for lab in r.sorted_labels()],
        "confidence": r.confidence,
    }


def write_dataset(ds: Dataset, path, format: str | None = None) -> None:
    """Write a dataset as JSONL or CSV; round-trips through :func:`parse_dataset`."""
    path = Path(path)
    if format is None:
        format = path.suffix.lstrip(".").lower()
    if format == "jsonl":
        with open(path, "w", encoding="utf-8") as fh:
            for r in ds:
                fh.write(json.dumps(record_to_obj(r)) + "\n")
    elif format == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(_COLUMNS)
            for r in ds:
                writer.writerow([
                    r.record_id, r.annotator_id, r.team_id, r.conversation_id,
                    r.du_pair_id, r.context.token,
                    "|".join(lab.token for lab in r.sorted_labels()),
                    r.confidence,
                ])
    else:
        raise DatasetError(f"unknown format {format!r} (expected 'jsonl' or 'csv')")


# ---------------------------------------------------------------------------
# Descriptive statistics
# ---------------------------------------------------------------------------


def label_frequencies(ds: Dataset) -> dict[RelationLabel, int]:
    """Count records containing each label, in canonical label order.

    A multi-label record increments every label it contains, so the counts
    sum to the total number of label tokens in the corpus.
    """
    counts = dict.fromkeys(LABELS, 0)
    for r in ds:
        for lab in r.labels:
            counts[lab] += 1
    return counts


def confidence_table(
    ds: Dataset,
) -> dict[tuple[RelationLabel, ContextKind], tuple[float, int]]:
    """Mean confidence and count per (label, context) cell.

    Multi-label records contribute their confidence to every label they
    contain.  Cells with no observations are absent from the result, not
    zero-valued.
    """
    sums: dict[tuple[RelationLabel, ContextKind], list[float]] = {}
    for r in ds:
        for lab in r.labels:
            cell = sums.setdefault((lab, r.context), [0.0, 0])
            cell[0] += r.confidence
            cell[1] += 1
    return {
        (lab, ctx): (sums[(lab, ctx)][0] / sums[(lab, ctx)][1], sums[(lab, ctx)][1])
        for lab in LABELS
        for ctx in CONTEXTS
        if (lab, ctx) in sums
    }


def write_frequencies_csv(ds: Dataset, path, header_comment: str | None = None) -> None:
    """Raw label counts as CSV (label, count), canonical order."""
    freqs = label_frequencies(ds)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        writer = csv.writer(fh)
        writer.writerow(["label", "count"])
        for lab in LABELS:
            writer.writerow([lab.token, freqs[lab]])


def write_confidence_csv(ds: Dataset, path, header_comment: str | None = None) -> None:
    """Mean confidence per (label, context) as CSV; absent cells are skipped."""
    table = confidence_table(ds)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        writer = csv.writer(fh)
        writer.writerow(["label", "context", "mean_confidence", "count"])
        for lab in LABELS:
            for ctx in CONTEXTS:
                if (lab, ctx) in table:
                    mean, count = table[(lab, ctx)]
                    writer.writerow([lab.token, ctx.token, f"{mean:.6g}", count])
