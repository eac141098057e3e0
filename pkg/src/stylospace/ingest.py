"""Corpus ingestion: walk a source tree, keep parseable ``.py`` files,
deduplicate by content digest, attach an author label per path, and emit a
canonical JSON-lines corpus.

The digest is MD5 of the content bytes; it is a dedup key, not a security
boundary.  Scanning may fan out over worker threads, but the merge is a
single reduction over lexicographically ordered paths, so output never
depends on scheduling.
"""

from __future__ import annotations

import hashlib
import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable

from . import pysyntax

__all__ = [
    "AuthorRule",
    "IngestConfig",
    "IngestReport",
    "SourceUnit",
    "author_of",
    "scan_corpus",
    "read_corpus",
    "write_corpus",
]

MAX_FILE_BYTES = 1 << 20


@dataclass(frozen=True)
class AuthorRule:
    """How to derive an author label from a relative path.

    Default: the first path segment (mirrors ``user/repo/...`` layouts).
    With ``pattern`` set, the first capture group of the regex applied to
    the posix-style path wins; no match falls back to "unknown".
    """

    pattern: str | None = None


@dataclass(frozen=True)
class IngestConfig:
    author_rule: AuthorRule = AuthorRule()
    max_file_bytes: int = MAX_FILE_BYTES


@dataclass
class SourceUnit:
    id: str
    path: str
    author: str
    content: str
    checksum: str
    line_count: int
    parse_ok: bool

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False)


@dataclass
class IngestReport:
    scanned: int = 0
    admitted: int = 0
    duplicates: int = 0
    unparseable: int = 0
    oversize: int = 0
    unreadable: int = 0

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def author_of(path: str, rule: AuthorRule = AuthorRule()) -> str:
    """Author label for a relative path; "unknown" when the rule yields
    nothing (e.g. a bare filename under the default first-segment rule)."""
    if not path:
        raise ValueError("empty path")
    posix = path.replace("\\", "/")
    if rule.pattern is not None:
        m = re.search(rule.pattern, posix)
        if m and m.groups() and m.group(1):
            return m.group(1)
        return "unknown"
    head, sep, _ = posix.partition("/")
    if not sep or not head:
        return "unknown"
    return head


def checksum_of(content: str) -> str:
    return hashlib.md5(content.encode("utf-8")).hexdigest()


def line_count_of(content: str) -> int:
    return max(1, len(content.splitlines()))


def _examine(root: Path, rel: str, config: IngestConfig):
    """Classify one file; returns (rel, tag, unit-or-None)."""
    full = root / rel
    try:
        raw = full.read_bytes()
    except OSError:
        return rel, "unreadable", None
    if len(raw) > config.max_file_bytes:
        return rel, "oversize", None
    try:
        content = raw.decode("utf-8")
    except UnicodeDecodeError:
        return rel, "unparseable", None
    if not pysyntax.parse_ok(content):
        return rel, "unparseable", None
    digest = checksum_of(content)
    unit = SourceUnit(
        id=digest,
        path=rel,
        author=author_of(rel, config.author_rule),
        content=content,
        checksum=digest,
        line_count=line_count_of(content),
        parse_ok=True,
    )
    return rel, "ok", unit


def scan_corpus(
    root: str | Path,
    config: IngestConfig = IngestConfig(),
    workers: int = 1,
) -> tuple[list[SourceUnit], IngestReport]:
    """Scan ``root`` for ``.py`` files and build the deduplicated corpus.

    Units come back in lexicographic path order, one per unique checksum
    (first path wins).  Individual unreadable files are counted, not fatal;
    an unreadable root is.
    """
    root = Path(root)
    if not root.is_dir():
        raise OSError(f"corpus root {root} is not a readable directory")
    rels = sorted(
        p.relative_to(root).as_posix()
        for p in root.rglob("*.py")
        if p.is_file()
    )
    report = IngestReport(scanned=len(rels))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda r: _examine(root, r, config), rels))
    else:
        results = [_examine(root, r, config) for r in rels]
    results.sort(key=lambda item: item[0])

    units: list[SourceUnit] = []
    seen: set[str] = set()
    for _, tag, unit in results:
        if tag != "ok":
            setattr(report, tag, getattr(report, tag) + 1)
            continue
        if unit.checksum in seen:
            report.duplicates += 1
            continue
        seen.add(unit.checksum)
        units.append(unit)
    report.admitted = len(units)
    return units, report


def write_corpus(units: Iterable[SourceUnit], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for unit in units:
            fh.write(unit.to_json())
            fh.write("\n")


def read_corpus(path: str | Path) -> list[SourceUnit]:
    """Load a JSON-lines corpus, enforcing the (author, path) uniqueness
    contract."""
    units: list[SourceUnit] = []
    seen: set[tuple[str, str]] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                unit = SourceUnit(**obj)
            except (json.JSONDecodeError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: bad corpus record: {exc}") from exc
            key = (unit.author, unit.path)
            if key in seen:
                raise ValueError(f"{path}:{lineno}: duplicate (author, path) {key}")
            seen.add(key)
            units.append(unit)
    return units
