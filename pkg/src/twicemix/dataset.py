"""Manifest CSV (``id,raw,hq,lq``) ingestion, validation and splitting."""
from __future__ import annotations

import csv
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from .imgcore import ImageFormatError, load_image

log = logging.getLogger(__name__)

MANIFEST_COLUMNS = ("id", "raw", "hq", "lq")
LOW_ENDPOINTS = ("lq", "raw")


class ManifestError(ValueError):
    pass


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    raw_path: Path
    hq_path: Path
    lq_path: Optional[Path] = None


@dataclass(frozen=True)
class SplitSpec:
    train_count: int

    def __post_init__(self):
        if self.train_count < 1:
            raise ValueError("train_count must be positive")


@dataclass
class SplitResult:
    train: list
    test: list
    excluded: list = field(default_factory=list)  # ids in the train range without an LQ image


@dataclass
class ValidationFailure:
    id: str
    kind: str  # "missing", "decode", "dimensions"
    path: str
    message: str


@dataclass
class ValidationReport:
    checked: int
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def failed_ids(self) -> set:
        return {f.id for f in self.failures}

    def to_dict(self) -> dict:
        return {"checked": self.checked, "ok": self.ok,
                "failures": [asdict(f) for f in self.failures]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def load_manifest(path) -> list[ManifestEntry]:
    """Entries in file order; relative paths resolve against the manifest's directory."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such manifest: {path}")
    base = path.parent
    entries: list[ManifestEntry] = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != MANIFEST_COLUMNS:
            raise ManifestError(f"{path}: header must be {','.join(MANIFEST_COLUMNS)}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) not in (3, 4):
                raise ManifestError(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
            row = [c.strip() for c in row] + [""] * (4 - len(row))
            entry_id, raw, hq, lq = row
            if not entry_id or not raw or not hq:
                raise ManifestError(f"{path}:{lineno}: id, raw and hq are required")
            if entry_id in seen:
                raise ManifestError(f"{path}:{lineno}: duplicate id {entry_id!r}")
            seen.add(entry_id)
            entries.append(ManifestEntry(
                id=entry_id,
                raw_path=base / raw,
                hq_path=base / hq,
                lq_path=(base / lq) if lq else None,
            ))
    return entries


def write_manifest(entries, path) -> None:
    """Write entries with paths relative to the manifest directory when possible."""
    path = Path(path)
    base = path.parent.resolve()

    def rel(p):
        if p is None:
            return ""
        p = Path(p).resolve()
        try:
            return p.relative_to(base).as_posix()
        except ValueError:
            return str(p)

    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MANIFEST_COLUMNS)
        for e in entries:
            w.writerow([e.id, rel(e.raw_path), rel(e.hq_path), rel(e.lq_path)])


def validate_manifest(entries) -> ValidationReport:
    """Check every referenced file exists, decodes, and matches the raw image's size.

    Failures are collected, never raised.
    """
    entries = list(entries)
    report = ValidationReport(checked=len(entries))
    for e in entries:
        shapes = {}
        for role, p in (("raw", e.raw_path), ("hq", e.hq_path), ("lq", e.lq_path)):
            if p is None:
                continue
            if not Path(p).is_file():
                report.failures.append(ValidationFailure(e.id, "missing", str(p), f"{role} file not found"))
                continue
            try:
                shapes[role] = load_image(p).shape
            except (ImageFormatError, OSError) as exc:
                report.failures.append(ValidationFailure(e.id, "decode", str(p), f"{role}: {exc}"))
        ref = shapes.get("raw")
        for role in ("hq", "lq"):
            if ref is not None and role in shapes and shapes[role] != ref:
                p = e.hq_path if role == "hq" else e.lq_path
                report.failures.append(ValidationFailure(
                    e.id, "dimensions", str(p),
                    f"{role} is {shapes[role][1]}x{shapes[role][0]}, raw is {ref[1]}x{ref[0]}"))
    return report


def split(entries, spec: SplitSpec) -> SplitResult:
    """Prefix/suffix split in manifest order.

    Entries in the training prefix that lack an LQ image cannot form a training
    pair; they are dropped from ``train`` and listed in ``excluded``.
    """
    entries = list(entries)
    if spec.train_count > len(entries):
        raise ValueError(f"train_count {spec.train_count} exceeds {len(entries)} entries")
    head, tail = entries[:spec.train_count], entries[spec.train_count:]
    train = [e for e in head if e.lq_path is not None]
    excluded = [e.id for e in head if e.lq_path is None]
    if excluded:
        log.info("excluded %d entries without an LQ image from training: %s",
                 len(excluded), ", ".join(excluded))
    return SplitResult(train=train, test=tail, excluded=excluded)


def load_training_pairs(entries) -> list[tuple]:
    """Decode ``(hq, lq)`` image pairs; entries without LQ are skipped."""
    pairs = []
    for e in entries:
        if e.lq_path is None:
            continue
        hq, lq = load_image(e.hq_path), load_image(e.lq_path)
        if hq.shape != lq.shape:
            raise ValueError(f"entry {e.id}: hq {hq.shape} and lq {lq.shape} differ in size")
        pairs.append((hq, lq))
    return pairs


def synthetic_sources(entries, low: str = "lq"):
    """Yield ``(id, hq, low_image)`` for synthetic test-set construction.

    With ``low="lq"`` an entry without an LQ image falls back to its raw image.
    """
    if low not in LOW_ENDPOINTS:
        raise ValueError(f"low endpoint must be one of {LOW_ENDPOINTS}, got {low!r}")
    for e in entries:
        low_path = e.lq_path if (low == "lq" and e.lq_path is not None) else e.raw_path
        if low == "lq" and e.lq_path is None:
            log.info("entry %s has no LQ image; mixing HQ with raw instead", e.id)
        hq, lo = load_image(e.hq_path), load_image(low_path)
        if hq.shape != lo.shape:
            raise ValueError(f"entry {e.id}: endpoints differ in size")
        yield e.id, hq, lo


__all__ = [
    "ManifestEntry", "ManifestError", "SplitSpec", "SplitResult", "ValidationFailure",
    "ValidationReport", "load_manifest", "write_manifest", "validate_manifest", "split",
    "load_training_pairs", "synthetic_sources",
]
