"""Exception types raised across the toolkit.

Every parser error carries the 1-based line number of the offending input
line so that callers can report file positions.
"""


class SemlangError(Exception):
    """Base class for all toolkit errors."""


class ParseError(SemlangError):
    """Malformed input; ``line`` is the 1-based line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


# corpus parsing

class LineCountMismatch(SemlangError):
    pass


class EmptyLine(ParseError):
    pass


class MalformedLink(ParseError):
    pass


class IndexOutOfBounds(ParseError):
    pass


class MalformedRow(ParseError):
    pass


class DuplicatePair(ParseError):
    pass


class NonFiniteScore(ParseError):
    pass


class NoSharedFeatures(SemlangError):
    pass


# embedding spaces

class HeaderMismatch(ParseError):
    pass


class DuplicateWord(ParseError):
    pass


class NonFiniteValue(SemlangError):
    pass


class ZeroVector(SemlangError):
    pass


class OutOfVocabulary(SemlangError):
    pass


class IoFailure(SemlangError):
    pass


# training

class EmptyVocabulary(SemlangError):
    pass


class NoUsableAlignedPairs(SemlangError):
    pass


class EmptyAfterFiltering(SemlangError):
    pass


# translation lexica and CCA

class EmptyLexicon(SemlangError):
    pass


class TooFewPairs(SemlangError):
    pass


class SingularCovariance(SemlangError):
    pass


class DimMismatch(SemlangError):
    pass


# pivot graphs

class EmptyIntersection(SemlangError):
    pass


class MissingWord(SemlangError):
    pass


class NodeSetMismatch(SemlangError):
    pass


class MissingGraph(SemlangError):
    pass


# evaluation and statistics

class DegenerateInput(SemlangError):
    pass


class TooFewUsablePairs(SemlangError):
    pass


class KeyMismatch(SemlangError):
    pass


class LabelMismatch(SemlangError):
    pass


class DegenerateMatrix(SemlangError):
    pass


class KTooLarge(SemlangError):
    pass


# pipeline

class ConfigError(SemlangError):
    pass


class ManifestMismatch(SemlangError):
    pass
