"""Tab-separated catalog, signature and COSMIC files.

Catalog layout: a header row whose first cell names the label column
(conventionally ``Type``) followed by one column id per sample, then one row
per mutation type.  Numbers are written in shortest round-trip form.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import MutationCatalog

FEATURES_BY_SAMPLES = "features-by-samples"
SAMPLES_BY_FEATURES = "samples-by-features"
SBS_CONTEXTS = 96


class FormatError(ValueError):
    pass


def format_number(x: float) -> str:
    x = float(x)
    if x.is_integer() and abs(x) < 2 ** 53:
        return str(int(x))
    return repr(x)


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def read_table(path) -> tuple[str, list[str], list[str], np.ndarray]:
    """Parse a labelled TSV into (corner cell, column ids, row labels, values)."""
    path = Path(path)
    lines = [ln for ln in path.read_text().splitlines() if ln.strip()]
    if not lines:
        raise FormatError(f"{path}: empty file")
    header = lines[0].split("\t")
    if len(header) < 2:
        raise FormatError(f"{path}: header needs a label column and at least one data column")
    labels, rows = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split("\t")
        if len(cells) != len(header):
            raise FormatError(f"{path}: line {lineno} has {len(cells)} fields, expected {len(header)}")
        labels.append(cells[0])
        row = []
        for col, cell in enumerate(cells[1:], start=1):
            try:
                row.append(float(cell))
            except ValueError:
                raise FormatError(f"{path}: non-numeric value {cell!r} at line {lineno}, "
                                  f"column {col} ({header[col]})") from None
        rows.append(row)
    if not rows:
        raise FormatError(f"{path}: no data rows")
    values = np.array(rows, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        i, j = np.argwhere(~np.isfinite(values))[0]
        raise FormatError(f"{path}: non-finite value at line {i + 2}, column {j + 1} ({header[j + 1]})")
    return header[0], header[1:], labels, values


def write_table(path, corner: str, columns: Sequence[str], labels: Sequence[str], values) -> None:
    values = np.asarray(values, dtype=np.float64)
    out = ["\t".join([corner, *columns])]
    for label, row in zip(labels, values):
        out.append("\t".join([label, *(format_number(x) for x in row)]))
    Path(path).write_text("\n".join(out) + "\n")


def _check_unique(path, names, what):
    seen = set()
    for name in names:
        if name in seen:
            raise FormatError(f"{path}: duplicate {what} {name!r}")
        seen.add(name)


def load_catalog(path, orientation: str = FEATURES_BY_SAMPLES) -> MutationCatalog:
    """Read a count catalog; ``orientation`` declares how the file is laid out."""
    if orientation not in (FEATURES_BY_SAMPLES, SAMPLES_BY_FEATURES):
        raise ValueError(f"unknown orientation {orientation!r}")
    _, columns, labels, values = read_table(path)
    neg = np.argwhere(values < 0)
    if neg.size:
        i, j = neg[0]
        raise FormatError(f"{path}: negative value {format_number(values[i, j])} at line {i + 2}, "
                          f"column {j + 1} ({columns[j]})")
    frac = np.argwhere(values != np.round(values))
    if frac.size:
        i, j = frac[0]
        raise FormatError(f"{path}: non-integer count {values[i, j]!r} at line {i + 2}, column {j + 1}")
    _check_unique(path, labels, "row label")
    _check_unique(path, columns, "column id")
    if orientation == SAMPLES_BY_FEATURES:
        return MutationCatalog(values.T, tuple(columns), tuple(labels))
    return MutationCatalog(values, tuple(labels), tuple(columns))


def write_catalog(catalog: MutationCatalog, path, corner: str = "Type") -> None:
    write_table(path, corner, catalog.sample_ids, catalog.feature_labels, catalog.matrix)


@dataclass(frozen=True)
class CosmicCatalog:
    feature_labels: tuple[str, ...]
    signatures: np.ndarray  # M x S probabilities
    names: tuple[str, ...]

    def column(self, name: str) -> np.ndarray:
        return self.signatures[:, self.names.index(name)]

    def select(self, names: Sequence[str]) -> np.ndarray:
        return np.column_stack([self.column(n) for n in names])


def load_cosmic(path) -> CosmicCatalog:
    """Read a COSMIC SBS reference file (``Type`` column + one column per signature)."""
    _, names, labels, values = read_table(path)
    if len(labels) != SBS_CONTEXTS:
        raise FormatError(f"{path}: expected {SBS_CONTEXTS} SBS contexts, found {len(labels)} rows")
    _check_unique(path, labels, "mutation type")
    _check_unique(path, names, "signature name")
    if np.any(values < 0):
        i, j = np.argwhere(values < 0)[0]
        raise FormatError(f"{path}: negative probability in {names[j]} at line {i + 2}")
    sums = values.sum(axis=0)
    for name, s in zip(names, sums):
        if not 0.99 <= s <= 1.01:
            raise FormatError(f"{path}: signature {name} sums to {s:.6g}, expected 1")
    return CosmicCatalog(tuple(labels), values, tuple(names))


def load_signatures(path) -> tuple[list[str], list[str], np.ndarray]:
    """Read a signatures TSV; returns (feature labels, signature names, M x K matrix)."""
    _, names, labels, values = read_table(path)
    return labels, names, values


def align_rows(labels: Sequence[str], values: np.ndarray, target: Sequence[str]) -> np.ndarray:
    """Reorder the rows of ``values`` (labelled ``labels``) into ``target`` order."""
    if list(labels) == list(target):
        return values
    if sorted(labels) != sorted(target):
        raise FormatError("mutation types do not match the reference feature set")
    pos = {lab: i for i, lab in enumerate(labels)}
    return values[[pos[t] for t in target]]
