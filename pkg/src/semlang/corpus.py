"""Readers, writers and validation for all external data files.

Covers sentence-aligned corpora, word-alignment links, word-similarity
datasets, structural-feature tables, and geographic distance tables. Parsers
are pure functions over immutable inputs: any line either yields a value or
raises a typed error carrying its 1-based line number.

Tokenization is whitespace splitting plus lower-casing, nothing else; all
normalization beyond that is assumed done upstream.
"""

import csv
import math
import re
from dataclasses import dataclass

from . import matrices
from .errors import (
    DuplicatePair,
    EmptyLine,
    IndexOutOfBounds,
    LabelMismatch,
    LineCountMismatch,
    MalformedLink,
    MalformedRow,
    NonFiniteScore,
    NoSharedFeatures,
    ParseError,
)

_LINK_RE = re.compile(r"^(\d+)-(\d+)$")


def tokenize(line: str) -> list:
    """Whitespace-split and lower-case one line."""
    return line.lower().split()


@dataclass(frozen=True)
class AlignedCorpus:
    """Sentence-aligned parallel corpus for one language pair."""

    lang_a: str
    lang_b: str
    sentence_pairs: tuple  # of (tuple of tokens, tuple of tokens)

    def __post_init__(self):
        if self.lang_a == self.lang_b:
            raise ValueError("the two language codes must differ")
        pairs = tuple(
            (tuple(a), tuple(b)) for a, b in self.sentence_pairs
        )
        object.__setattr__(self, "sentence_pairs", pairs)
        if not pairs:
            raise ValueError("aligned corpus must contain at least one pair")
        for a, b in pairs:
            if not a or not b:
                raise ValueError("both sides of every pair must be non-empty")

    def __len__(self):
        return len(self.sentence_pairs)


@dataclass(frozen=True)
class AlignmentLinks:
    """Per sentence pair, a set of (index into side a, index into side b)."""

    links: tuple  # of frozenset[(int, int)]

    def __post_init__(self):
        object.__setattr__(
            self, "links", tuple(frozenset(l) for l in self.links)
        )

    def __len__(self):
        return len(self.links)

    def __getitem__(self, i):
        return self.links[i]


@dataclass(frozen=True)
class SimilarityDataset:
    """Word pairs with human gold similarity scores for one language."""

    name: str
    language: str
    pairs: tuple  # of (word, word, float)

    def __post_init__(self):
        object.__setattr__(
            self,
            "pairs",
            tuple((w1, w2, float(s)) for w1, w2, s in self.pairs),
        )
        if len(self.pairs) < 2:
            raise ValueError("similarity dataset needs at least 2 pairs")
        seen = set()
        for w1, w2, score in self.pairs:
            if not math.isfinite(score):
                raise ValueError(f"non-finite gold score for ({w1}, {w2})")
            key = (w1, w2)
            if key in seen:
                raise ValueError(f"duplicate pair ({w1}, {w2})")
            seen.add(key)

    def __len__(self):
        return len(self.pairs)


@dataclass(frozen=True)
class FeatureTable:
    """Categorical structural features per language; absent values omitted."""

    languages: tuple
    features: dict  # language -> {feature id -> value}

    def __post_init__(self):
        object.__setattr__(self, "languages", tuple(self.languages))
        for lang in self.languages:
            if not self.features.get(lang):
                raise ValueError(f"language {lang!r} has no features")


@dataclass(frozen=True)
class GeoTable:
    """Symmetric geographic distances in km between language locations."""

    distances: dict  # frozenset-like sorted (l1, l2) tuple -> km

    def get(self, l1: str, l2: str) -> float:
        if l1 == l2:
            return 0.0
        key = (min(l1, l2), max(l1, l2))
        try:
            return self.distances[key]
        except KeyError:
            raise LabelMismatch(f"no geographic distance for {l1}-{l2}") from None

    def languages(self):
        langs = set()
        for l1, l2 in self.distances:
            langs.update((l1, l2))
        return sorted(langs)


def parse_aligned_corpus(path_a, path_b, lang_a: str, lang_b: str) -> AlignedCorpus:
    """Parse two line-aligned text files into sentence pairs.

    Line i of each file becomes pair i; tokens are whitespace-split and
    lower-cased. A pair with an empty side is an error, not a skip: dropping
    lines would desynchronize the indices used by the alignment-links file.
    """
    with open(path_a, encoding="utf-8") as fh:
        lines_a = fh.read().splitlines()
    with open(path_b, encoding="utf-8") as fh:
        lines_b = fh.read().splitlines()
    if len(lines_a) != len(lines_b):
        raise LineCountMismatch(
            f"{path_a} has {len(lines_a)} lines but {path_b} has {len(lines_b)}"
        )
    pairs = []
    for i, (la, lb) in enumerate(zip(lines_a, lines_b), start=1):
        ta, tb = tokenize(la), tokenize(lb)
        if not ta or not tb:
            raise EmptyLine("sentence pair with an empty side", line=i)
        pairs.append((ta, tb))
    if not pairs:
        raise LineCountMismatch("aligned corpus files are empty")
    return AlignedCorpus(lang_a, lang_b, tuple(pairs))


def write_aligned_corpus(corpus: AlignedCorpus, path_a, path_b) -> None:
    with open(path_a, "w", encoding="utf-8") as fa:
        fa.writelines(" ".join(a) + "\n" for a, _ in corpus.sentence_pairs)
    with open(path_b, "w", encoding="utf-8") as fb:
        fb.writelines(" ".join(b) + "\n" for _, b in corpus.sentence_pairs)


def parse_alignment_links(path, corpus: AlignedCorpus) -> AlignmentLinks:
    """Parse one line of space-separated "i-j" links per sentence pair.

    Indices are 0-based; i indexes side a. Duplicate links are de-duplicated;
    an empty line means no links for that pair.
    """
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if len(lines) != len(corpus):
        raise LineCountMismatch(
            f"{len(lines)} link lines for {len(corpus)} sentence pairs"
        )
    all_links = []
    for i, (line, (sent_a, sent_b)) in enumerate(
        zip(lines, corpus.sentence_pairs), start=1
    ):
        links = set()
        for token in line.split():
            m = _LINK_RE.match(token)
            if not m:
                raise MalformedLink(f"bad link token {token!r}", line=i)
            ia, ib = int(m.group(1)), int(m.group(2))
            if ia >= len(sent_a) or ib >= len(sent_b):
                raise IndexOutOfBounds(
                    f"link {ia}-{ib} exceeds sentence lengths "
                    f"{len(sent_a)}/{len(sent_b)}",
                    line=i,
                )
            links.add((ia, ib))
        all_links.append(frozenset(links))
    return AlignmentLinks(tuple(all_links))


def write_alignment_links(links: AlignmentLinks, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for link_set in links.links:
            fh.write(" ".join(f"{a}-{b}" for a, b in sorted(link_set)) + "\n")


def parse_similarity_dataset(path, language: str, name=None) -> SimilarityDataset:
    """Parse a 3-column word1/word2/score file (TSV or CSV, '#' comments)."""
    if name is None:
        name = str(path).rsplit("/", 1)[-1].rsplit(".", 1)[0]
    pairs = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for i, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cells = line.split("\t") if "\t" in line else line.split(",")
            if len(cells) != 3:
                raise MalformedRow(
                    f"expected 3 columns, found {len(cells)}", line=i
                )
            w1, w2 = cells[0].strip().lower(), cells[1].strip().lower()
            if not w1 or not w2:
                raise MalformedRow("empty word", line=i)
            try:
                score = float(cells[2])
            except ValueError:
                raise MalformedRow(f"bad score {cells[2]!r}", line=i) from None
            if not math.isfinite(score):
                raise NonFiniteScore(f"score {cells[2]!r}", line=i)
            if (w1, w2) in seen:
                raise DuplicatePair(f"pair ({w1}, {w2}) repeated", line=i)
            seen.add((w1, w2))
            pairs.append((w1, w2, score))
    if len(pairs) < 2:
        raise MalformedRow(f"dataset {name!r} has fewer than 2 usable rows")
    return SimilarityDataset(name, language, tuple(pairs))


def write_similarity_dataset(dataset: SimilarityDataset, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for w1, w2, score in dataset.pairs:
            fh.write(f"{w1}\t{w2}\t{matrices.format_float(score)}\n")


def parse_feature_table(path) -> FeatureTable:
    """Parse a CSV of structural features.

    First row: ``lang,<feature id>,...``; following rows: language code then
    one cell per feature, empty cell meaning the feature is absent.
    """
    with open(path, encoding="utf-8") as fh:
        reader = csv.reader(fh)
        rows = [r for r in reader if r and not r[0].startswith("#")]
    if len(rows) < 2:
        raise ParseError("feature table needs a header and at least one row", line=1)
    feature_ids = [c.strip() for c in rows[0][1:]]
    if any(not f for f in feature_ids):
        raise ParseError("empty feature id in header", line=1)
    languages = []
    features = {}
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(feature_ids) + 1:
            raise MalformedRow(
                f"expected {len(feature_ids) + 1} cells, found {len(row)}", line=i
            )
        lang = row[0].strip()
        if lang in features:
            raise MalformedRow(f"language {lang!r} listed twice", line=i)
        present = {
            fid: cell.strip()
            for fid, cell in zip(feature_ids, row[1:])
            if cell.strip()
        }
        if not present:
            raise MalformedRow(f"language {lang!r} has no features", line=i)
        languages.append(lang)
        features[lang] = present
    return FeatureTable(tuple(languages), features)


def write_feature_table(table: FeatureTable, path) -> None:
    feature_ids = sorted({f for m in table.features.values() for f in m})
    with open(path, "w", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["lang"] + feature_ids)
        for lang in table.languages:
            row = [table.features[lang].get(f, "") for f in feature_ids]
            writer.writerow([lang] + row)


def structural_distance(table: FeatureTable, l1: str, l2: str) -> float:
    """1 minus the fraction of agreeing features among features present in
    both languages. Symmetric; zero for identical feature maps."""
    try:
        f1, f2 = table.features[l1], table.features[l2]
    except KeyError as exc:
        raise LabelMismatch(f"unknown language {exc.args[0]!r}") from None
    shared = set(f1) & set(f2)
    if not shared:
        raise NoSharedFeatures(f"{l1} and {l2} share no features")
    agreeing = sum(1 for f in shared if f1[f] == f2[f])
    return 1.0 - agreeing / len(shared)


def feature_distance_matrix(table: FeatureTable, languages) -> matrices.DistanceMatrix:
    """Pairwise structural distances over the given languages."""
    missing = sorted(set(languages) - set(table.languages))
    if missing:
        raise LabelMismatch(
            "languages missing from feature table: " + ", ".join(missing)
        )
    condensed = []
    langs = list(languages)
    for i, l1 in enumerate(langs):
        for l2 in langs[i + 1:]:
            condensed.append(structural_distance(table, l1, l2))
    return matrices.from_condensed(langs, condensed)


def parse_geo_table(path) -> GeoTable:
    """Parse CSV rows ``lang1,lang2,km`` ('#' comments allowed)."""
    distances = {}
    with open(path, encoding="utf-8") as fh:
        for i, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            cells = line.split(",")
            if len(cells) != 3:
                raise MalformedRow(f"expected 3 columns, found {len(cells)}", line=i)
            l1, l2 = cells[0].strip(), cells[1].strip()
            try:
                km = float(cells[2])
            except ValueError:
                raise MalformedRow(f"bad distance {cells[2]!r}", line=i) from None
            if not math.isfinite(km) or km < 0:
                raise MalformedRow(f"distance must be finite and >= 0", line=i)
            if l1 == l2:
                if km != 0:
                    raise MalformedRow("self-distance must be zero", line=i)
                continue
            key = (min(l1, l2), max(l1, l2))
            if key in distances and distances[key] != km:
                raise MalformedRow(
                    f"conflicting distances for {key[0]}-{key[1]}", line=i
                )
            distances[key] = km
    if not distances:
        raise ParseError("geo table is empty", line=1)
    return GeoTable(distances)


def write_geo_table(table: GeoTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for (l1, l2), km in sorted(table.distances.items()):
            fh.write(f"{l1},{l2},{matrices.format_float(km)}\n")


def geo_distance_matrix(table: GeoTable, languages) -> matrices.DistanceMatrix:
    """Pairwise geographic distances over the given languages."""
    available = set(table.languages())
    missing = sorted(set(languages) - available)
    if missing:
        raise LabelMismatch(
            "languages missing from geo table: " + ", ".join(missing)
        )
    langs = list(languages)
    condensed = []
    for i, l1 in enumerate(langs):
        for l2 in langs[i + 1:]:
            condensed.append(table.get(l1, l2))
    return matrices.from_condensed(langs, condensed)


def load_sentences(path) -> list:
    """Read a monolingual corpus: one sentence per line, tokenized."""
    with open(path, encoding="utf-8") as fh:
        return [tokenize(line) for line in fh if line.strip()]
