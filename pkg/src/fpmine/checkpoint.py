"""Append-only CSV checkpoint store.

One file per pipeline step, header row first, RFC-4180 quoting, UTF-8.
Crash safety comes from last-line validation on reload: a torn final line
(missing terminator or wrong column count) is discarded and truncated away,
so a re-run simply redoes the interrupted item.  Fields may not contain CR
or LF; the schemas written by this pipeline never need them and forbidding
them keeps recovery line-oriented.

Appends are serialized by an internal lock, so several workers of the same
step may share one store; readers always observe a consistent prefix.
Distinct steps never share a file.
"""

from __future__ import annotations

import csv
import io
import os
import threading
from pathlib import Path
from typing import Iterable, Sequence


class CheckpointError(Exception):
    pass


class DuplicateKeyError(CheckpointError):
    """The key was already completed for this step."""


class SchemaMismatchError(CheckpointError):
    """Existing file header does not match the expected columns."""


class CorruptCheckpointError(CheckpointError):
    """A malformed row was found before the final line (not a torn write)."""


def _encode_row(values: Sequence[str]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow(values)
    return buf.getvalue()


class CheckpointStore:
    """Keyed, append-only CSV with resume support.

    The key column (first column by default) identifies an item; appending a
    key twice raises :class:`DuplicateKeyError`.  Several physical rows may
    share a key only via :meth:`append_rows`, which marks the key completed
    after all of them are written.
    """

    def __init__(
        self,
        path: str | Path,
        columns: Sequence[str],
        key_column: str | None = None,
        fsync: bool = False,
    ):
        self.path = Path(path)
        self.columns = list(columns)
        self.fsync = fsync
        self.key_column = key_column or self.columns[0]
        if self.key_column not in self.columns:
            raise ValueError(f"key column {self.key_column!r} not in columns")
        self._key_index = self.columns.index(self.key_column)
        self._lock = threading.Lock()
        self.completed: set[str] = set()
        self._rows: list[dict[str, str]] = []
        self._load()
        self._fh = open(self.path, "a", encoding="utf-8", newline="")

    # -- loading / recovery -------------------------------------------------

    def _load(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        if not self.path.exists():
            with open(self.path, "w", encoding="utf-8", newline="") as fh:
                fh.write(_encode_row(self.columns))
            return
        raw = self.path.read_bytes()
        keep = len(raw)
        if raw and not raw.endswith(b"\n"):
            # Torn final write: drop everything past the last terminator.
            keep = raw.rfind(b"\n") + 1
        text = raw[:keep].decode("utf-8")
        lines = text.splitlines()
        if not lines:
            with open(self.path, "w", encoding="utf-8", newline="") as fh:
                fh.write(_encode_row(self.columns))
            return
        header = next(csv.reader([lines[0]]))
        if header != self.columns:
            raise SchemaMismatchError(
                f"{self.path}: header {header!r} does not match expected {self.columns!r}"
            )
        parsed: list[list[str]] = []
        for lineno, line in enumerate(lines[1:], start=2):
            values = next(csv.reader([line]))
            if len(values) != len(self.columns):
                if lineno == len(lines):
                    # Torn final line that happened to end in '\n' terms of
                    # byte count but lost fields: discard it as well.
                    keep -= len(lines[-1].encode("utf-8")) + 1
                    break
                raise CorruptCheckpointError(
                    f"{self.path}:{lineno}: expected {len(self.columns)} fields, "
                    f"got {len(values)}"
                )
            parsed.append(values)
        if keep < len(raw):
            with open(self.path, "r+b") as fh:
                fh.truncate(keep)
        for values in parsed:
            self._rows.append(dict(zip(self.columns, values)))
            self.completed.add(values[self._key_index])

    # -- appending ----------------------------------------------------------

    def _format(self, row: dict) -> tuple[str, list[str]]:
        try:
            values = [str(row[c]) for c in self.columns]
        except KeyError as e:
            raise ValueError(f"row missing column {e.args[0]!r}") from None
        for v in values:
            if "\n" in v or "\r" in v:
                raise ValueError("checkpoint fields may not contain newlines")
        return values[self._key_index], values

    def append(self, row: dict) -> None:
        """Durably append one row; its key becomes completed."""
        key, values = self._format(row)
        with self._lock:
            if key in self.completed:
                raise DuplicateKeyError(f"{self.path}: key {key!r} already completed")
            self._write([values])
            self.completed.add(key)
            self._rows.append(dict(zip(self.columns, values)))

    def append_if_new(self, row: dict) -> bool:
        """Append unless the key is already completed; True if written."""
        key, values = self._format(row)
        with self._lock:
            if key in self.completed:
                return False
            self._write([values])
            self.completed.add(key)
            self._rows.append(dict(zip(self.columns, values)))
            return True

    def append_rows(self, key: str, rows: Iterable[dict]) -> None:
        """Append several rows sharing one key, then mark the key completed."""
        formatted = []
        for row in rows:
            k, values = self._format(row)
            if k != str(key):
                raise ValueError(f"row key {k!r} does not match {key!r}")
            formatted.append(values)
        with self._lock:
            if str(key) in self.completed:
                raise DuplicateKeyError(f"{self.path}: key {key!r} already completed")
            self._write(formatted)
            self.completed.add(str(key))
            for values in formatted:
                self._rows.append(dict(zip(self.columns, values)))

    def _write(self, rows: list[list[str]]) -> None:
        for values in rows:
            self._fh.write(_encode_row(values))
        self._fh.flush()
        if self.fsync:
            os.fsync(self._fh.fileno())

    # -- reading ------------------------------------------------------------

    def rows(self) -> list[dict[str, str]]:
        with self._lock:
            return list(self._rows)

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "CheckpointStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def read_csv_rows(path: str | Path) -> list[dict[str, str]]:
    """Read a (possibly hand-edited) step CSV as a list of dicts."""
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def write_csv_atomic(path: str | Path, columns: Sequence[str], rows: Iterable[Sequence | dict]) -> None:
    """Write a derived CSV via temp file + rename so readers never see a torn file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            if isinstance(row, dict):
                writer.writerow([str(row[c]) for c in columns])
            else:
                writer.writerow([str(v) for v in row])
    os.replace(tmp, path)
