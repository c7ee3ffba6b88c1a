"""Dataset ingestion, class balancing, one-hot encoding, and splitting.

A :class:`Frame` is a schema-typed, column-major dataset with one binary
target column.  All operations are pure given (inputs, seed) and return new
values; nothing mutates in place.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadCell,
    DegenerateSplit,
    EmptyFile,
    MissingColumn,
    MissingFile,
    SingleClass,
)

NUMERIC = "numeric"
CATEGORICAL = "categorical"

FEATURE = "feature"
TARGET = "target"
IGNORED = "ignored"


@dataclass(frozen=True)
class ColumnSchema:
    """Declared type and role of one dataset column."""

    name: str
    kind: str
    role: str = FEATURE
    levels: tuple[str, ...] | None = None
    display_name: str | None = None

    def __post_init__(self):
        if self.kind not in (NUMERIC, CATEGORICAL):
            raise BadCell(f"column {self.name!r}: unknown kind {self.kind!r}")
        if self.role not in (FEATURE, TARGET, IGNORED):
            raise BadCell(f"column {self.name!r}: unknown role {self.role!r}")
        if self.role == TARGET:
            if self.kind != CATEGORICAL:
                raise BadCell(f"target column {self.name!r} must be categorical")
            if self.levels is not None and len(self.levels) != 2:
                raise BadCell(f"target column {self.name!r} must have exactly 2 levels")

    @property
    def label(self) -> str:
        return self.display_name or self.name


def load_schema(path: str) -> list[ColumnSchema]:
    """Read a schema JSON file: a list of column objects."""
    if not os.path.isfile(path):
        raise MissingFile(f"schema file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    columns = []
    for entry in raw:
        levels = entry.get("levels")
        columns.append(
            ColumnSchema(
                name=entry["name"],
                kind=entry["kind"],
                role=entry.get("role", FEATURE),
                levels=tuple(str(v) for v in levels) if levels is not None else None,
                display_name=entry.get("display_name"),
            )
        )
    validate_schema(columns)
    return columns


def validate_schema(schema: list[ColumnSchema]) -> None:
    names = [c.name for c in schema]
    if len(set(names)) != len(names):
        raise BadCell("schema contains duplicate column names")
    targets = [c for c in schema if c.role == TARGET]
    if len(targets) != 1:
        raise BadCell(f"schema must declare exactly one target column, found {len(targets)}")


def builtin_schema_path(name: str) -> str:
    """Path of a shipped schema file ('taiwan' or 'german')."""
    return os.path.join(os.path.dirname(__file__), "schemas", f"{name}.schema.json")


@dataclass
class Frame:
    """Column-major dataset: float64 numeric columns, level-coded categoricals."""

    schema: list[ColumnSchema]
    columns: dict[str, np.ndarray]
    levels: dict[str, list[str]]
    n_rows: int

    @property
    def target_name(self) -> str:
        return next(c.name for c in self.schema if c.role == TARGET)

    @property
    def y(self) -> np.ndarray:
        """Target as a float64 0/1 vector."""
        return self.columns[self.target_name].astype(np.float64)

    def feature_schema(self) -> list[ColumnSchema]:
        return [c for c in self.schema if c.role == FEATURE]

    def column_schema(self, name: str) -> ColumnSchema:
        for c in self.schema:
            if c.name == name:
                return c
        raise MissingColumn(name)

    def take(self, rows: np.ndarray) -> "Frame":
        """New Frame with the given rows, in the given order."""
        rows = np.asarray(rows)
        cols = {name: col[rows] for name, col in self.columns.items()}
        return Frame(self.schema, cols, {k: list(v) for k, v in self.levels.items()}, len(rows))

    def class_counts(self) -> tuple[int, int]:
        y = self.columns[self.target_name]
        return int(np.sum(y == 0)), int(np.sum(y == 1))

    def content_hash(self) -> str:
        """64-bit content fingerprint, stable across runs."""
        digest = hashlib.blake2b(digest_size=8)
        for col in self.schema:
            digest.update(col.name.encode())
            digest.update(self.columns[col.name].tobytes())
            if col.kind == CATEGORICAL:
                digest.update("\x1f".join(self.levels[col.name]).encode())
        return digest.hexdigest()


def _parse_numeric(cell: str, name: str, row: int) -> float:
    try:
        return float(cell)
    except ValueError:
        raise BadCell(f"row {row}, column {name!r}: cannot parse {cell!r} as numeric") from None


def load_delimited(path: str, schema: list[ColumnSchema], delimiter: str = ",") -> Frame:
    """Load a delimited text file with a header row against a schema.

    Categorical levels register in first-appearance order unless the schema
    pins `levels`; row order is preserved.  Columns with role `ignored` are
    dropped, as are file columns not named in the schema.
    """
    validate_schema(schema)
    if len(delimiter) != 1:
        raise BadCell(f"delimiter must be a single character, got {delimiter!r}")
    if not os.path.isfile(path):
        raise MissingFile(f"dataset file not found: {path}")

    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyFile(f"{path}: no header row") from None
        header = [h.strip() for h in header]
        if len(set(header)) != len(header):
            raise BadCell(f"{path}: duplicate column names in header")
        position = {name: i for i, name in enumerate(header)}

        kept = [c for c in schema if c.role != IGNORED]
        for col in schema:
            if col.name not in position:
                raise MissingColumn(f"{path}: column {col.name!r} not in header")

        raw: dict[str, list] = {c.name: [] for c in kept}
        level_index: dict[str, dict[str, int]] = {}
        level_order: dict[str, list[str]] = {}
        for col in kept:
            if col.kind == CATEGORICAL:
                pinned = list(col.levels) if col.levels is not None else []
                level_order[col.name] = pinned
                level_index[col.name] = {lv: i for i, lv in enumerate(pinned)}

        n_fields = len(header)
        row_num = 0
        for record in reader:
            row_num += 1
            if len(record) != n_fields:
                raise BadCell(f"row {row_num}: expected {n_fields} fields, got {len(record)}")
            for col in kept:
                cell = record[position[col.name]].strip()
                if cell == "":
                    raise BadCell(f"row {row_num}, column {col.name!r}: empty cell")
                if col.kind == NUMERIC:
                    raw[col.name].append(_parse_numeric(cell, col.name, row_num))
                else:
                    table = level_index[col.name]
                    code = table.get(cell)
                    if code is None:
                        if col.levels is not None:
                            raise BadCell(
                                f"row {row_num}, column {col.name!r}: "
                                f"value {cell!r} not in declared levels"
                            )
                        code = len(table)
                        table[cell] = code
                        level_order[col.name].append(cell)
                    raw[col.name].append(code)

    if row_num == 0:
        raise EmptyFile(f"{path}: no data rows")

    columns: dict[str, np.ndarray] = {}
    for col in kept:
        if col.kind == NUMERIC:
            columns[col.name] = np.asarray(raw[col.name], dtype=np.float64)
        else:
            columns[col.name] = np.asarray(raw[col.name], dtype=np.int32)

    target = next(c for c in kept if c.role == TARGET)
    observed = len(level_order[target.name])
    if observed != 2:
        raise BadCell(
            f"target column {target.name!r} has {observed} observed levels, expected 2"
        )
    return Frame(schema=kept, columns=columns, levels=level_order, n_rows=row_num)


def write_delimited(frame: Frame, path: str, delimiter: str = ",") -> None:
    """Write a Frame back to delimited text; reloading round-trips bit-exactly."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(delimiter.join(c.name for c in frame.schema) + "\n")
        text_cols = []
        for col in frame.schema:
            data = frame.columns[col.name]
            if col.kind == NUMERIC:
                text_cols.append([format(v, ".17g") for v in data])
            else:
                table = frame.levels[col.name]
                text_cols.append([table[code] for code in data])
        for i in range(frame.n_rows):
            fh.write(delimiter.join(col[i] for col in text_cols) + "\n")


def under_sample(frame: Frame, seed: int) -> Frame:
    """Balance classes: keep the minority class whole, down-sample the majority.

    The kept majority rows are a seeded uniform draw without replacement;
    relative row order is preserved.
    """
    y = frame.columns[frame.target_name]
    idx0 = np.flatnonzero(y == 0)
    idx1 = np.flatnonzero(y == 1)
    if len(idx0) == 0 or len(idx1) == 0:
        raise SingleClass("under_sample requires both classes present")
    if len(idx0) == len(idx1):
        return frame.take(np.arange(frame.n_rows))
    minority, majority = (idx0, idx1) if len(idx0) < len(idx1) else (idx1, idx0)
    rng = np.random.default_rng(seed)
    kept_majority = rng.choice(majority, size=len(minority), replace=False)
    keep = np.sort(np.concatenate([minority, kept_majority]))
    return frame.take(keep)


@dataclass(frozen=True)
class SplitIndices:
    """Row partition into train and test, with the seed that produced it."""

    train_rows: np.ndarray
    test_rows: np.ndarray
    seed: int
    train_fraction: float


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def stratified_split(frame: Frame, train_fraction: float, seed: int) -> SplitIndices:
    """Per-class seeded shuffle, round(train_fraction * n) rows to train per class."""
    if not 0.0 < train_fraction < 1.0:
        raise DegenerateSplit(f"train_fraction must be in (0, 1), got {train_fraction}")
    y = frame.columns[frame.target_name]
    rng = np.random.default_rng(seed)
    train_parts, test_parts = [], []
    for cls in (0, 1):
        idx = np.flatnonzero(y == cls)
        if len(idx) < 2:
            raise DegenerateSplit(f"class {cls} has fewer than 2 rows")
        shuffled = rng.permutation(idx)
        n_train = _round_half_up(train_fraction * len(idx))
        train_parts.append(shuffled[:n_train])
        test_parts.append(shuffled[n_train:])
    train = np.sort(np.concatenate(train_parts)).astype(np.int64)
    test = np.sort(np.concatenate(test_parts)).astype(np.int64)
    if len(train) == 0 or len(test) == 0:
        raise DegenerateSplit("split leaves one side empty")
    return SplitIndices(train, test, seed, train_fraction)


def random_split(frame: Frame, train_fraction: float, seed: int) -> SplitIndices:
    """Unstratified variant: one global shuffle, round(fraction * n) to train."""
    if not 0.0 < train_fraction < 1.0:
        raise DegenerateSplit(f"train_fraction must be in (0, 1), got {train_fraction}")
    rng = np.random.default_rng(seed)
    shuffled = rng.permutation(frame.n_rows)
    n_train = _round_half_up(train_fraction * frame.n_rows)
    if n_train == 0 or n_train == frame.n_rows:
        raise DegenerateSplit("split leaves one side empty")
    train = np.sort(shuffled[:n_train]).astype(np.int64)
    test = np.sort(shuffled[n_train:]).astype(np.int64)
    return SplitIndices(train, test, seed, train_fraction)


@dataclass
class EncodedMatrix:
    """Dense design matrix: numeric passthrough plus full k-level one-hot blocks."""

    values: np.ndarray
    col_names: list[str]
    source_of: dict[int, str]
    target: np.ndarray
    display_names: dict[str, str] = field(default_factory=dict)

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    def feature_names(self) -> list[str]:
        """Source feature names in column order, deduplicated."""
        seen: dict[str, None] = {}
        for i in range(self.width):
            seen.setdefault(self.source_of[i], None)
        return list(seen)

    def feature_groups(self) -> dict[str, np.ndarray]:
        """Source feature -> encoded column indices (indicator blocks are atomic)."""
        groups: dict[str, list[int]] = {}
        for i in range(self.width):
            groups.setdefault(self.source_of[i], []).append(i)
        return {name: np.asarray(idx, dtype=np.int64) for name, idx in groups.items()}

    def display_name(self, feature: str) -> str:
        return self.display_names.get(feature, feature)


def fit_levels(frame: Frame) -> dict[str, list[str]]:
    """Encoder level tables: schema-pinned order, else lexicographic observed."""
    tables = {}
    for col in frame.feature_schema():
        if col.kind != CATEGORICAL:
            continue
        if col.levels is not None:
            tables[col.name] = list(col.levels)
        else:
            tables[col.name] = sorted(frame.levels[col.name])
    return tables


def one_hot_encode(frame: Frame, levels: dict[str, list[str]] | None = None) -> EncodedMatrix:
    """Expand categorical features to full k-level indicator blocks.

    `levels` overrides the encoder tables (used to encode test data with the
    train-fitted encoder); a value outside the table raises BadCell.
    """
    features = frame.feature_schema()
    if not features:
        raise BadCell("frame has no feature columns")
    tables = fit_levels(frame) if levels is None else levels

    col_names: list[str] = []
    source_of: dict[int, str] = {}
    blocks: list[np.ndarray] = []
    for col in features:
        if col.kind == NUMERIC:
            source_of[len(col_names)] = col.name
            col_names.append(col.name)
            blocks.append(frame.columns[col.name][:, None].copy())
        else:
            table = tables[col.name]
            index = {lv: i for i, lv in enumerate(table)}
            codes = frame.columns[col.name]
            own = frame.levels[col.name]
            remap = np.empty(max(len(own), 1), dtype=np.int64)
            for i, lv in enumerate(own):
                if lv not in index:
                    raise BadCell(f"column {col.name!r}: level {lv!r} unknown to encoder")
                remap[i] = index[lv]
            block = np.zeros((frame.n_rows, len(table)), dtype=np.float64)
            block[np.arange(frame.n_rows), remap[codes]] = 1.0
            for lv in table:
                source_of[len(col_names)] = col.name
                col_names.append(f"{col.name}={lv}")
            blocks.append(block)

    values = np.ascontiguousarray(np.hstack(blocks))
    display = {c.name: c.label for c in features}
    return EncodedMatrix(values, col_names, source_of, frame.y, display)


def encode_like(frame: Frame, col_names: list[str]) -> EncodedMatrix:
    """Encode a frame into an existing column layout (e.g. a saved model's)."""
    tables: dict[str, list[str]] = {}
    feature_kinds = {c.name: c.kind for c in frame.feature_schema()}
    for name in col_names:
        if "=" in name:
            feat, level = name.split("=", 1)
            if feature_kinds.get(feat) == CATEGORICAL:
                tables.setdefault(feat, []).append(level)
    encoded = one_hot_encode(frame, tables if tables else None)
    if encoded.col_names != list(col_names):
        raise BadCell(
            "dataset does not encode to the model's column layout: "
            f"expected {len(col_names)} columns, produced {len(encoded.col_names)}"
        )
    return encoded
