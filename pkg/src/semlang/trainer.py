"""Skip-gram negative-sampling training, monolingual and joint bilingual.

The joint trainer minimizes the sum of the two monolingual skip-gram losses
plus a weighted cross-lingual penalty that pulls the bag-of-words means of
aligned sentence pairs together. Updates are plain minibatch SGD: the
monolingual streams of the two languages are interleaved, and one aligned
pair is stepped after every monolingual minibatch, cycling the aligned
corpus.

The reference trainer is single-threaded and bit-deterministic for a given
seed. Each side of a joint run draws from its own generator seeded with
``derived_seed(seed, "side:a"|"side:b")``, so a monolingual run with that
same derived seed reproduces a joint side exactly when the cross-lingual
weight is zero.
"""

from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .corpus import AlignedCorpus
from .embeddings import BilingualSpace, EmbeddingSpace, JOINT, filter_min_count
from .errors import (
    EmptyAfterFiltering,
    EmptyVocabulary,
    NoUsableAlignedPairs,
)
from .seeding import derived_seed

#: scores are clamped here before exponentiation; beyond it sigmoid is
#: saturated to ~1e-13 and the exact gradient of the clamped loss is zero.
SCORE_CLAMP = 30.0

NOISE_POWER = 0.75
MIN_LR_FRACTION = 0.01


@dataclass
class TrainState:
    """Mutable per-language parameters: input matrix, context matrix, noise."""

    vectors: np.ndarray
    context: np.ndarray
    noise: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.vectors.shape != self.context.shape:
            raise ValueError("input and context matrices must share a shape")
        if self.noise is not None:
            if len(self.noise) != len(self.vectors):
                raise ValueError("noise distribution length != vocabulary size")
            if abs(float(self.noise.sum()) - 1.0) > 1e-9:
                raise ValueError("noise distribution must sum to 1")


def _sigmoid(x):
    x = np.clip(x, -SCORE_CLAMP, SCORE_CLAMP)
    return 1.0 / (1.0 + np.exp(-x))


def _log_sigmoid(x):
    # -log sigma(x) == logaddexp(0, -x); evaluated on the clamped score
    return -np.logaddexp(0.0, -np.clip(x, -SCORE_CLAMP, SCORE_CLAMP))


def sgns_loss(center: int, context_word: int, negatives, state: TrainState) -> float:
    """Negative-sampling loss for one (center, context) pair.

    ``-log sigma(u_c . v_o) - sum_n log sigma(-u_c . v_n)`` where ``u`` rows
    come from the input matrix and ``v`` rows from the context matrix.
    """
    u = state.vectors[center]
    pos = float(_log_sigmoid(u @ state.context[context_word]))
    neg = sum(float(_log_sigmoid(-(u @ state.context[n]))) for n in negatives)
    return -(pos + neg)


def sgns_gradient(center: int, context_word: int, negatives, state: TrainState):
    """Exact gradient of sgns_loss for the touched rows.

    Returns ``(input_grads, context_grads)`` as dicts mapping row index to
    gradient vector; rows not touched are absent (zero gradient). Scores past
    the clamp contribute zero, matching the clamped loss exactly.
    """
    u = state.vectors[center]
    dim = len(u)
    input_grads = {center: np.zeros(dim)}
    context_grads = {}

    def add_ctx(row, vec):
        context_grads[row] = context_grads.get(row, np.zeros(dim)) + vec

    s = float(u @ state.context[context_word])
    if abs(s) <= SCORE_CLAMP:
        g = _sigmoid(s) - 1.0
        input_grads[center] += g * state.context[context_word]
        add_ctx(context_word, g * u)
    for n in negatives:
        sn = float(u @ state.context[n])
        if abs(sn) <= SCORE_CLAMP:
            gn = _sigmoid(sn)
            input_grads[center] += gn * state.context[n]
            add_ctx(n, gn * u)
    return input_grads, context_grads


def crosslingual_loss(ids_a, ids_b, state_a: TrainState, state_b: TrainState) -> float:
    """Squared distance between the two sentence bag-of-words means.

    ``ids_a``/``ids_b`` are the in-vocabulary token rows of an aligned
    sentence pair, duplicates counted per occurrence.
    """
    if len(ids_a) == 0 or len(ids_b) == 0:
        raise EmptyAfterFiltering("aligned pair has an all-out-of-vocabulary side")
    mean_a = state_a.vectors[np.asarray(ids_a)].mean(axis=0)
    mean_b = state_b.vectors[np.asarray(ids_b)].mean(axis=0)
    diff = mean_a - mean_b
    return float(diff @ diff)


def crosslingual_gradient(ids_a, ids_b, state_a: TrainState, state_b: TrainState):
    """Exact gradient of crosslingual_loss for the touched input rows.

    Returns ``(grads_a, grads_b)`` dicts mapping row index to gradient vector.
    """
    if len(ids_a) == 0 or len(ids_b) == 0:
        raise EmptyAfterFiltering("aligned pair has an all-out-of-vocabulary side")
    ids_a = np.asarray(ids_a)
    ids_b = np.asarray(ids_b)
    diff = state_a.vectors[ids_a].mean(axis=0) - state_b.vectors[ids_b].mean(axis=0)
    step_a = 2.0 * diff / len(ids_a)
    step_b = -2.0 * diff / len(ids_b)
    grads_a, grads_b = {}, {}
    for i in ids_a:
        grads_a[int(i)] = grads_a.get(int(i), 0) + step_a
    for i in ids_b:
        grads_b[int(i)] = grads_b.get(int(i), 0) + step_b
    return grads_a, grads_b


class _SgnsEngine:
    """Streams seeded skip-gram minibatches for one language and applies them.

    Owns the vocabulary, the parameter matrices and a private generator; the
    joint trainer interleaves two engines without sharing any random state.
    """

    def __init__(self, sentences, dim, window, negatives, learning_rate,
                 epochs, min_count, batch_size, seed):
        counts = Counter(tok for sent in sentences for tok in sent)
        vocab = filter_min_count(counts, min_count)
        if not vocab:
            raise EmptyVocabulary(
                f"no word reaches min_count={min_count} "
                f"({len(counts)} distinct tokens)"
            )
        self.vocab = tuple(vocab)
        self.counts = {w: counts[w] for w in vocab}
        self.index = {w: i for i, w in enumerate(vocab)}
        self.sentences = []
        for sent in sentences:
            ids = np.array(
                [self.index[t] for t in sent if t in self.index], dtype=np.int64
            )
            if len(ids):
                self.sentences.append(ids)

        self.dim = dim
        self.window = window
        self.negatives = negatives
        self.lr0 = learning_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.rng = np.random.default_rng(seed)

        freqs = np.array([self.counts[w] for w in self.vocab], dtype=float)
        noise = freqs ** NOISE_POWER
        noise /= noise.sum()
        vectors = self.rng.uniform(-0.5 / dim, 0.5 / dim, size=(len(vocab), dim))
        self.state = TrainState(vectors, np.zeros((len(vocab), dim)), noise)

        self.tokens_total = self.epochs * sum(len(s) for s in self.sentences)
        self.tokens_seen = 0
        self._batches = self._batch_stream()

    def learning_rate(self) -> float:
        if self.tokens_total == 0:
            return self.lr0
        frac = self.tokens_seen / self.tokens_total
        return max(self.lr0 * (1.0 - frac), self.lr0 * MIN_LR_FRACTION)

    def _batch_stream(self):
        centers, contexts = [], []
        for _ in range(self.epochs):
            for sent in self.sentences:
                n = len(sent)
                if n >= 2:
                    # word2vec-style reduced windows, one draw per position
                    widths = self.rng.integers(1, self.window + 1, size=n)
                    for t in range(n):
                        lo = max(0, t - int(widths[t]))
                        hi = min(n, t + int(widths[t]) + 1)
                        for j in range(lo, hi):
                            if j == t:
                                continue
                            centers.append(sent[t])
                            contexts.append(sent[j])
                            if len(centers) == self.batch_size:
                                yield (
                                    np.array(centers, dtype=np.int64),
                                    np.array(contexts, dtype=np.int64),
                                )
                                centers, contexts = [], []
                        self.tokens_seen += 1
                else:
                    self.tokens_seen += len(sent)
            self._check_finite()
        if centers:
            yield np.array(centers, dtype=np.int64), np.array(contexts, dtype=np.int64)

    def _check_finite(self):
        if not (
            np.isfinite(self.state.vectors).all()
            and np.isfinite(self.state.context).all()
        ):
            raise FloatingPointError("training diverged: non-finite parameters")

    def step(self) -> bool:
        """Consume one minibatch; False once the epoch budget is exhausted."""
        batch = next(self._batches, None)
        if batch is None:
            return False
        centers, contexts = batch
        lr = self.learning_rate()
        self._apply_batch(centers, contexts, lr)
        return True

    def _apply_batch(self, centers, contexts, lr):
        state = self.state
        negatives = self.rng.choice(
            len(self.vocab), size=(len(centers), self.negatives), p=state.noise
        )
        u = state.vectors[centers]
        v = state.context[contexts]
        vn = state.context[negatives]
        s_pos = np.einsum("bd,bd->b", u, v)
        s_neg = np.einsum("bd,bkd->bk", u, vn)
        # zero factor outside the clamp: the clamped loss is flat there
        g_pos = np.where(np.abs(s_pos) <= SCORE_CLAMP, _sigmoid(s_pos) - 1.0, 0.0)
        g_neg = np.where(np.abs(s_neg) <= SCORE_CLAMP, _sigmoid(s_neg), 0.0)
        grad_u = g_pos[:, None] * v + np.einsum("bk,bkd->bd", g_neg, vn)
        np.add.at(state.vectors, centers, -lr * grad_u)
        np.add.at(state.context, contexts, -lr * g_pos[:, None] * u)
        np.add.at(
            state.context,
            negatives.reshape(-1),
            (-lr * g_neg[..., None] * u[:, None, :]).reshape(-1, self.dim),
        )

    def encode(self, tokens) -> np.ndarray:
        return np.array(
            [self.index[t] for t in tokens if t in self.index], dtype=np.int64
        )

    def embedding_space(self, language) -> EmbeddingSpace:
        return EmbeddingSpace(language, self.vocab, self.state.vectors.copy())


def _validate_config(dim, window, negatives, learning_rate, epochs,
                     min_count, batch_size, cross_weight=0.0):
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if window < 1:
        raise ValueError("window must be >= 1")
    if negatives < 1:
        raise ValueError("negatives must be >= 1")
    if learning_rate <= 0:
        raise ValueError("learning_rate must be > 0")
    if epochs < 0:
        raise ValueError("epochs must be >= 0")
    if min_count < 0:
        raise ValueError("min_count must be >= 0")
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    if cross_weight < 0:
        raise ValueError("cross_weight must be >= 0")


class SkipGramTrainer(BaseEstimator):
    """Monolingual skip-gram embeddings with negative sampling.

    Parameters mirror the usual word2vec knobs; the learning rate decays
    linearly with processed tokens down to one hundredth of its start value.
    Fitting is deterministic for a given seed.
    """

    def __init__(self, dim=200, window=5, negatives=5, learning_rate=0.025,
                 epochs=5, min_count=100, batch_size=128, seed=0):
        self.dim = dim
        self.window = window
        self.negatives = negatives
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.min_count = min_count
        self.batch_size = batch_size
        self.seed = seed

    def fit(self, sentences, language="und"):
        """Train on an iterable of token lists (one list per sentence)."""
        _validate_config(self.dim, self.window, self.negatives,
                         self.learning_rate, self.epochs, self.min_count,
                         self.batch_size)
        engine = _SgnsEngine(
            list(sentences), self.dim, self.window, self.negatives,
            self.learning_rate, self.epochs, self.min_count,
            self.batch_size, self.seed,
        )
        while engine.step():
            pass
        engine._check_finite()
        self.language_ = language
        self.vocab_ = engine.vocab
        self.counts_ = dict(engine.counts)
        self.vectors_ = engine.state.vectors
        self.context_vectors_ = engine.state.context
        self.noise_ = engine.state.noise
        return self

    def embedding_space(self) -> EmbeddingSpace:
        check_is_fitted(self, "vectors_")
        return EmbeddingSpace(self.language_, self.vocab_, self.vectors_.copy())


class JointBilingualTrainer(BaseEstimator):
    """Jointly trained bilingual embeddings.

    Interleaves skip-gram minibatches of the two monolingual corpora and,
    after every minibatch, applies one SGD step on the sentence-mean
    cross-lingual penalty of the next aligned pair (weighted by
    ``cross_weight``). With ``cross_weight=0`` each side reproduces the
    monolingual trainer run with seed ``derived_seed(seed, "side:a"|"side:b")``
    bit for bit.
    """

    def __init__(self, dim=200, window=5, negatives=5, learning_rate=0.025,
                 epochs=5, min_count=100, cross_weight=1.0, batch_size=128,
                 seed=0):
        self.dim = dim
        self.window = window
        self.negatives = negatives
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.min_count = min_count
        self.cross_weight = cross_weight
        self.batch_size = batch_size
        self.seed = seed

    def fit(self, sentences_a, sentences_b, aligned: AlignedCorpus):
        """Train on two monolingual corpora plus their aligned corpus.

        ``sentences_a`` must be in ``aligned.lang_a`` and ``sentences_b`` in
        ``aligned.lang_b``.
        """
        _validate_config(self.dim, self.window, self.negatives,
                         self.learning_rate, self.epochs, self.min_count,
                         self.batch_size, self.cross_weight)
        common = dict(
            dim=self.dim, window=self.window, negatives=self.negatives,
            learning_rate=self.learning_rate, epochs=self.epochs,
            min_count=self.min_count, batch_size=self.batch_size,
        )
        engine_a = _SgnsEngine(
            list(sentences_a), seed=derived_seed(self.seed, "side:a"), **common
        )
        engine_b = _SgnsEngine(
            list(sentences_b), seed=derived_seed(self.seed, "side:b"), **common
        )

        pairs = []
        for sent_a, sent_b in aligned.sentence_pairs:
            ids_a = engine_a.encode(sent_a)
            ids_b = engine_b.encode(sent_b)
            if len(ids_a) and len(ids_b):
                pairs.append((ids_a, ids_b))
        if not pairs:
            raise NoUsableAlignedPairs(
                "every aligned pair lost a full side to vocabulary filtering"
            )
        self.aligned_pairs_ = pairs
        self.initial_cross_loss_ = self._mean_cross_loss(engine_a, engine_b)

        cursor = 0
        exhausted_a = exhausted_b = False
        while not (exhausted_a and exhausted_b):
            for engine in (engine_a, engine_b):
                if engine is engine_a and exhausted_a:
                    continue
                if engine is engine_b and exhausted_b:
                    continue
                stepped = engine.step()
                if not stepped:
                    if engine is engine_a:
                        exhausted_a = True
                    else:
                        exhausted_b = True
                    continue
                if self.cross_weight > 0:
                    ids_a, ids_b = pairs[cursor % len(pairs)]
                    cursor += 1
                    self._cross_step(
                        engine_a, engine_b, ids_a, ids_b, engine.learning_rate()
                    )
        engine_a._check_finite()
        engine_b._check_finite()

        self.languages_ = (aligned.lang_a, aligned.lang_b)
        self.space_a_ = engine_a.embedding_space(aligned.lang_a)
        self.space_b_ = engine_b.embedding_space(aligned.lang_b)
        self.final_cross_loss_ = self._mean_cross_loss(engine_a, engine_b)
        self._engines = (engine_a, engine_b)
        return self

    def _cross_step(self, engine_a, engine_b, ids_a, ids_b, lr):
        va, vb = engine_a.state.vectors, engine_b.state.vectors
        diff = va[ids_a].mean(axis=0) - vb[ids_b].mean(axis=0)
        scale = lr * self.cross_weight * 2.0
        np.add.at(va, ids_a, -scale / len(ids_a) * diff)
        np.add.at(vb, ids_b, scale / len(ids_b) * diff)

    def _mean_cross_loss(self, engine_a, engine_b) -> float:
        total = 0.0
        for ids_a, ids_b in self.aligned_pairs_:
            total += crosslingual_loss(ids_a, ids_b, engine_a.state, engine_b.state)
        return total / len(self.aligned_pairs_)

    def mean_cross_loss(self) -> float:
        """Mean cross-lingual loss over usable aligned pairs, current state."""
        check_is_fitted(self, "space_a_")
        return self._mean_cross_loss(*self._engines)

    def bilingual_space(self, pivot_language: str) -> BilingualSpace:
        """The trained joint space tagged with the requested pivot side."""
        check_is_fitted(self, "space_a_")
        lang_a, lang_b = self.languages_
        if pivot_language == lang_a:
            return BilingualSpace(self.space_a_, self.space_b_, JOINT)
        if pivot_language == lang_b:
            return BilingualSpace(self.space_b_, self.space_a_, JOINT)
        raise ValueError(f"{pivot_language!r} is not a side of this model")
