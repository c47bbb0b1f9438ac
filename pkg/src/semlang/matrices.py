"""Labeled symmetric distance matrices and their CSV interchange format."""

from dataclasses import dataclass, field

import numpy as np

from .errors import LabelMismatch, ParseError

#: significant digits used when printing floats to CSV; fixed so that
#: reruns with identical inputs produce byte-identical files.
FLOAT_FORMAT = "%.9g"


def format_float(x: float) -> str:
    return FLOAT_FORMAT % float(x)


@dataclass(frozen=True)
class DistanceMatrix:
    """Square symmetric non-negative matrix over labeled items.

    Symmetry and the zero diagonal are exact (bitwise), not approximate;
    constructors are expected to mirror one computed triangle.
    """

    labels: tuple
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        n = len(labels)
        if len(set(labels)) != n:
            raise LabelMismatch("duplicate labels")
        if values.shape != (n, n):
            raise LabelMismatch(
                f"matrix shape {values.shape} does not match {n} labels"
            )
        if not np.isfinite(values).all():
            raise ValueError("non-finite distance value")
        if (values < 0).any():
            raise ValueError("negative distance value")
        if (np.diag(values) != 0.0).any():
            raise ValueError("diagonal must be exactly zero")
        if not (values == values.T).all():
            raise ValueError("matrix must be exactly symmetric")

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LabelMismatch(f"unknown label {label!r}") from None

    def get(self, a: str, b: str) -> float:
        return float(self.values[self.index(a), self.index(b)])

    def row(self, label: str) -> np.ndarray:
        """Distances from one item to all items, in label order."""
        return self.values[self.index(label)].copy()

    def off_diagonal(self) -> np.ndarray:
        """Upper-triangle entries (excluding the diagonal), row-major."""
        iu = np.triu_indices(self.size, k=1)
        return self.values[iu]

    def reordered(self, labels) -> "DistanceMatrix":
        """Same matrix with rows/columns permuted into the given label order."""
        labels = tuple(labels)
        if set(labels) != set(self.labels) or len(labels) != self.size:
            missing = sorted(set(labels) ^ set(self.labels))
            raise LabelMismatch(f"label sets differ: {', '.join(missing)}")
        idx = np.array([self.index(l) for l in labels])
        return DistanceMatrix(labels, self.values[np.ix_(idx, idx)])

    def restricted(self, labels) -> "DistanceMatrix":
        """Submatrix over a subset of labels, in the given order."""
        idx = np.array([self.index(l) for l in labels])
        return DistanceMatrix(tuple(labels), self.values[np.ix_(idx, idx)])


def from_condensed(labels, condensed) -> DistanceMatrix:
    """Build a DistanceMatrix from upper-triangle values (row-major)."""
    labels = tuple(labels)
    n = len(labels)
    values = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    values[iu] = condensed
    values = values + values.T
    return DistanceMatrix(labels, values)


def write_matrix_csv(matrix: DistanceMatrix, path, header_comments=()) -> None:
    """Write as CSV: optional '#' comment lines, a header row of labels,
    then one labeled row per item."""
    lines = [f"# {c}" for c in header_comments]
    lines.append("," + ",".join(matrix.labels))
    for i, label in enumerate(matrix.labels):
        row = ",".join(format_float(v) for v in matrix.values[i])
        lines.append(f"{label},{row}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_matrix_csv(path) -> DistanceMatrix:
    with open(path, encoding="utf-8") as fh:
        rows = [
            line.rstrip("\n")
            for line in fh
            if line.strip() and not line.startswith("#")
        ]
    if not rows:
        raise ParseError("empty distance-matrix file", line=1)
    header = rows[0].split(",")
    labels = tuple(header[1:])
    n = len(labels)
    if len(rows) - 1 != n:
        raise ParseError(f"expected {n} data rows, found {len(rows) - 1}")
    values = np.zeros((n, n))
    for i, row in enumerate(rows[1:]):
        cells = row.split(",")
        if len(cells) != n + 1 or cells[0] != labels[i]:
            raise ParseError(f"malformed row for label {labels[i]!r}", line=i + 2)
        values[i] = [float(c) for c in cells[1:]]
    # printed values are symmetric strings, so equality survives the round trip
    return DistanceMatrix(labels, values)
