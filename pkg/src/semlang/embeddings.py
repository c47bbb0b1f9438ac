"""Vocabularies, dense embedding matrices, and similarity queries.

The on-disk interchange format is the common text format: a ``count dim``
header line followed by one ``word v1 ... v_dim`` line per word.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DuplicateWord,
    EmptyVocabulary,
    HeaderMismatch,
    IoFailure,
    NonFiniteValue,
    OutOfVocabulary,
    ZeroVector,
)

JOINT = "JOINT"
CCA = "CCA"
METHODS = (JOINT, CCA)


@dataclass(frozen=True)
class EmbeddingSpace:
    """Vocabulary plus a dense |vocab| x dim matrix for one language.

    Immutable after construction. The vocabulary order is the canonical
    order (descending frequency, ties lexicographic) that every downstream
    module relies on for deterministic layouts.
    """

    language: str
    vocab: tuple
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        vocab = tuple(self.vocab)
        object.__setattr__(self, "vocab", vocab)
        matrix = np.ascontiguousarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", matrix)
        if not vocab:
            raise EmptyVocabulary(f"no words in space for {self.language!r}")
        if matrix.ndim != 2 or matrix.shape[0] != len(vocab):
            raise ValueError(
                f"matrix shape {matrix.shape} does not match {len(vocab)} words"
            )
        if matrix.shape[1] < 1:
            raise ValueError("embedding dimension must be >= 1")
        if len(set(vocab)) != len(vocab):
            raise DuplicateWord("vocabulary contains duplicates")
        if not np.isfinite(matrix).all():
            raise NonFiniteValue(f"non-finite vector in space for {self.language!r}")
        norms = np.linalg.norm(matrix, axis=1)
        if (norms == 0).any():
            word = vocab[int(np.argmax(norms == 0))]
            raise ZeroVector(f"zero vector for word {word!r}")
        object.__setattr__(
            self, "_index", {w: i for i, w in enumerate(vocab)}
        )

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self):
        return len(self.vocab)

    def __contains__(self, word):
        return word in self._index

    def row(self, word: str) -> int:
        try:
            return self._index[word]
        except KeyError:
            raise OutOfVocabulary(f"{word!r} not in vocabulary") from None

    def vector(self, word: str) -> np.ndarray:
        return self.matrix[self.row(word)]

    def unit_matrix(self) -> np.ndarray:
        """Row-normalized copy of the matrix."""
        return self.matrix / np.linalg.norm(self.matrix, axis=1, keepdims=True)


@dataclass(frozen=True)
class BilingualSpace:
    """Two embedding spaces sharing one coordinate system.

    ``pivot_side`` holds the language whose words will form graph nodes;
    ``second_side`` is the language it was jointly embedded with.
    """

    pivot_side: EmbeddingSpace
    second_side: EmbeddingSpace
    method: str

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.pivot_side.dim != self.second_side.dim:
            raise ValueError("the two sides must share a dimension")
        if self.pivot_side.language == self.second_side.language:
            raise ValueError("the two sides must be different languages")

    @property
    def pivot(self) -> str:
        return self.pivot_side.language

    @property
    def second(self) -> str:
        return self.second_side.language

    def swapped(self) -> "BilingualSpace":
        """The same joint space with the pivot/second roles exchanged."""
        return BilingualSpace(self.second_side, self.pivot_side, self.method)


def cosine(u, v) -> float:
    """Cosine similarity, clamped to [-1, 1] against rounding."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise ZeroVector("cosine undefined for a zero vector")
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def canonical_order(counts: dict) -> list:
    """Canonical vocabulary order: descending count, ties lexicographic."""
    return sorted(counts, key=lambda w: (-counts[w], w))


def filter_min_count(counts: dict, threshold: int) -> list:
    """Words occurring at least ``threshold`` times, in canonical order.

    The boundary is inclusive: a word with count == threshold is kept.
    """
    return [w for w in canonical_order(counts) if counts[w] >= threshold]


def nearest_neighbors(space: EmbeddingSpace, word: str, k: int):
    """The k most cosine-similar words to ``word``, excluding the word itself.

    Ties are broken by canonical vocabulary order.
    """
    if not 1 <= k < len(space):
        raise ValueError(f"k must be in [1, {len(space) - 1}], got {k}")
    query_row = space.row(word)
    unit = space.unit_matrix()
    sims = np.clip(unit @ unit[query_row], -1.0, 1.0)
    sims[query_row] = -np.inf
    # stable argsort on -sims keeps vocabulary order among ties
    order = np.argsort(-sims, kind="stable")[:k]
    return [(space.vocab[i], float(sims[i])) for i in order]


def nearest_across(
    source: EmbeddingSpace, target: EmbeddingSpace, word: str, k: int = 1
):
    """The k words of ``target`` most cosine-similar to ``word`` of ``source``.

    Both spaces must share one coordinate system (sides of a BilingualSpace).
    """
    if source.dim != target.dim:
        raise ValueError("spaces do not share a dimension")
    if not 1 <= k <= len(target):
        raise ValueError(f"k must be in [1, {len(target)}], got {k}")
    q = source.vector(word)
    q = q / np.linalg.norm(q)
    sims = np.clip(target.unit_matrix() @ q, -1.0, 1.0)
    order = np.argsort(-sims, kind="stable")[:k]
    return [(target.vocab[i], float(sims[i])) for i in order]


def save_space(space: EmbeddingSpace, path) -> None:
    """Write the text interchange format; load_space inverts it.

    Values are printed with 9 significant digits, so a round trip reproduces
    the matrix well within 1e-6.
    """
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{len(space)} {space.dim}\n")
            for word, row in zip(space.vocab, space.matrix):
                fh.write(word + " " + " ".join("%.9g" % v for v in row) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def load_space(path, language: str) -> EmbeddingSpace:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise HeaderMismatch("empty embedding file", line=1)
    header = lines[0].split()
    if len(header) != 2:
        raise HeaderMismatch(f"bad header {lines[0]!r}", line=1)
    try:
        count, dim = int(header[0]), int(header[1])
    except ValueError:
        raise HeaderMismatch(f"bad header {lines[0]!r}", line=1) from None
    body = [l for l in lines[1:] if l.strip()]
    if len(body) != count:
        raise HeaderMismatch(
            f"header promises {count} rows, file has {len(body)}", line=1
        )
    vocab = []
    matrix = np.empty((count, dim))
    seen = set()
    for i, line in enumerate(body):
        cells = line.split()
        if len(cells) != dim + 1:
            raise HeaderMismatch(
                f"row has {len(cells) - 1} values, header promises {dim}",
                line=i + 2,
            )
        word = cells[0]
        if word in seen:
            raise DuplicateWord(f"word {word!r} repeated", line=i + 2)
        seen.add(word)
        vocab.append(word)
        matrix[i] = [float(c) for c in cells[1:]]
    if not np.isfinite(matrix).all():
        raise NonFiniteValue(f"non-finite value in {path}")
    return EmbeddingSpace(language, tuple(vocab), matrix)
