# Copyright (c) 2025, Ahmad Hussnain and contributors
# For license information, please see license.txt

import json
import struct
import threading
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

import needstack
from needstack import _
from needstack.exceptions import (
    EmptyCorpusError,
    InputFileError,
    ModelFormatError,
    ValidationError,
    VocabularyError,
)
from needstack.needstack.corpus.corpus import TokenSentence
from needstack.needstack.embeddings.embeddings_helpers import (
    REAL,
    SigmoidTable,
    batch_sentences,
    keep_probabilities,
    make_negative_table,
    sgns_batch_update,
    skipgram_pairs,
)

logger = needstack.logger(__name__)

MODEL_MAGIC = b"NSTK"
MODEL_VERSION = 1
MAX_SEED = 2 ** 64 - 1


@dataclass
class Vocabulary:
    terms: list
    counts: list
    index: dict = field(init=False, repr=False)

    def __post_init__(self):
        if len(self.terms) != len(self.counts):
            needstack.throw(_("Vocabulary terms and counts differ in length"), VocabularyError)
        self.index = {term: i for i, term in enumerate(self.terms)}
        if len(self.index) != len(self.terms):
            needstack.throw(_("Vocabulary contains duplicate terms"), VocabularyError)

    def __len__(self):
        return len(self.terms)

    def __contains__(self, term):
        return term in self.index


@dataclass
class TrainConfig:
    dim: int = 100
    window: int = 5
    negative: int = 5
    epochs: int = 5
    min_count: int = 5
    subsample: float = 1e-4
    initial_lr: float = 0.025
    seed: int = 1
    workers: int = 1
    batch_words: int = 256

    def validate(self):
        for name in ("dim", "window", "negative", "epochs", "min_count", "workers", "batch_words"):
            if getattr(self, name) < 1:
                needstack.throw(_("{0} must be >= 1, got {1}").format(name, getattr(self, name)), ValidationError)
        if not 0.0 < self.initial_lr < 1.0:
            needstack.throw(_("initial_lr must be in (0, 1), got {0}").format(self.initial_lr), ValidationError)
        if self.subsample < 0:
            needstack.throw(_("subsample must be >= 0, got {0}").format(self.subsample), ValidationError)
        if not 0 <= self.seed <= MAX_SEED:
            needstack.throw(_("seed must be a 64-bit unsigned integer, got {0}").format(self.seed), ValidationError)
        return self

    @property
    def min_lr(self):
        return self.initial_lr * 1e-4

    @classmethod
    def from_dict(cls, values):
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in values.items() if k in known})


@dataclass
class EmbeddingModel:
    vocab: Vocabulary
    input_vectors: np.ndarray
    output_vectors: np.ndarray
    config: TrainConfig

    def __post_init__(self):
        shape = (len(self.vocab), self.config.dim)
        for name in ("input_vectors", "output_vectors"):
            matrix = getattr(self, name)
            if matrix.shape != shape:
                needstack.throw(_("{0} has shape {1}, expected {2}").format(name, matrix.shape, shape),
                                ValidationError)
            if not np.all(np.isfinite(matrix)):
                needstack.throw(_("{0} contains non-finite values").format(name), ValidationError)

    @property
    def dim(self):
        return self.config.dim

    def __contains__(self, term):
        return term in self.vocab

    def vector(self, term):
        if term not in self.vocab:
            needstack.throw(_("{0!r} is not in the vocabulary").format(term), VocabularyError)
        return self.input_vectors[self.vocab.index[term]]

    def most_similar(self, term, k=10, filter=None):
        return nearest_neighbors(self, self.vector(term), k, filter=filter, exclude={term})

    def save(self, path):
        """Write the binary model file (magic "NSTK", little-endian)."""
        config_blob = json.dumps(asdict(self.config), sort_keys=True).encode("utf-8")
        with open(path, "wb") as f:
            f.write(MODEL_MAGIC)
            f.write(struct.pack("<III", MODEL_VERSION, self.dim, len(self.vocab)))
            for term, count in zip(self.vocab.terms, self.vocab.counts):
                f.write(term.encode("utf-8") + b"\0")
                f.write(struct.pack("<Q", int(count)))
            f.write(struct.pack("<I", len(config_blob)))
            f.write(config_blob)
            f.write(np.ascontiguousarray(self.input_vectors, dtype="<f4").tobytes())
            f.write(np.ascontiguousarray(self.output_vectors, dtype="<f4").tobytes())

    @classmethod
    def load(cls, path):
        try:
            with open(path, "rb") as f:
                data = f.read()
        except OSError as e:
            needstack.throw(_("Cannot read model file: {0}").format(e.strerror), InputFileError, path=path)
        try:
            return cls._from_bytes(data)
        except (struct.error, ValueError, UnicodeDecodeError, KeyError, TypeError) as e:
            needstack.throw(_("Corrupt model file: {0}").format(e), ModelFormatError, path=path)

    @classmethod
    def _from_bytes(cls, data):
        if data[:4] != MODEL_MAGIC:
            raise ValueError(_("bad magic bytes"))
        version, dim, size = struct.unpack_from("<III", data, 4)
        if version != MODEL_VERSION:
            raise ValueError(_("unsupported version {0}").format(version))
        offset = 16
        terms, counts = [], []
        for _i in range(size):
            end = data.index(b"\0", offset)
            terms.append(data[offset:end].decode("utf-8"))
            (count,) = struct.unpack_from("<Q", data, end + 1)
            counts.append(count)
            offset = end + 9
        (blob_len,) = struct.unpack_from("<I", data, offset)
        offset += 4
        config = TrainConfig.from_dict(json.loads(data[offset:offset + blob_len].decode("utf-8")))
        offset += blob_len
        if config.dim != dim:
            raise ValueError(_("header dim {0} does not match config dim {1}").format(dim, config.dim))
        n = size * dim
        if len(data) != offset + 8 * n:
            raise ValueError(_("expected {0} bytes of vectors, found {1}").format(8 * n, len(data) - offset))
        w_in = np.frombuffer(data, dtype="<f4", count=n, offset=offset).reshape(size, dim).astype(REAL)
        w_out = np.frombuffer(data, dtype="<f4", count=n, offset=offset + 4 * n).reshape(size, dim).astype(REAL)
        return cls(Vocabulary(terms, counts), w_in, w_out, config)

    def save_text(self, path):
        """word2vec text format: a `|V| dim` header, then `term v1 v2 ...` per line."""
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write("{0} {1}\n".format(len(self.vocab), self.dim))
            for term, row in zip(self.vocab.terms, self.input_vectors):
                f.write(term + " " + " ".join("{0:.6f}".format(x) for x in row) + "\n")

    @classmethod
    def load_text(cls, path):
        """Load word2vec text vectors; counts are unknown (set to 1), output vectors are zero."""
        terms, rows = [], []
        try:
            f = open(path, encoding="utf-8")
        except OSError as e:
            needstack.throw(_("Cannot read vector file: {0}").format(e.strerror), InputFileError, path=path)
        with f:
            header = f.readline().split()
            try:
                size, dim = int(header[0]), int(header[1])
            except (IndexError, ValueError):
                needstack.throw(_("Missing `|V| dim` header"), ModelFormatError, path=path, line_no=1)
            for line_no, line in enumerate(f, start=2):
                parts = line.rstrip("\n").split(" ")
                if len(parts) != dim + 1:
                    needstack.throw(_("Expected a term and {0} values").format(dim), ModelFormatError,
                                    path=path, line_no=line_no)
                try:
                    rows.append([float(x) for x in parts[1:]])
                except ValueError:
                    needstack.throw(_("Non-numeric vector value"), ModelFormatError, path=path, line_no=line_no)
                terms.append(parts[0])
        if len(terms) != size:
            needstack.throw(_("Header announces {0} terms, found {1}").format(size, len(terms)),
                            ModelFormatError, path=path)
        w_in = np.array(rows, dtype=REAL).reshape(size, dim)
        config = TrainConfig(dim=dim, min_count=1)
        return cls(Vocabulary(terms, [1] * size), w_in, np.zeros_like(w_in), config)


def _token_lists(sentences):
    for sent in sentences:
        yield sent.tokens if isinstance(sent, TokenSentence) else sent


def build_vocab(sentences, min_count=5):
    """
        Count tokens and keep those seen at least `min_count` times.
        Ordered by descending count, ties broken lexicographically.
    """
    counts = Counter()
    n_sentences = 0
    for tokens in _token_lists(sentences):
        counts.update(tokens)
        n_sentences += 1
    if not n_sentences:
        needstack.throw(_("empty corpus"), EmptyCorpusError)
    kept = sorted(((t, c) for t, c in counts.items() if c >= min_count), key=lambda tc: (-tc[1], tc[0]))
    if not kept:
        needstack.throw(_("vocabulary empty: no token occurs {0} times or more").format(min_count), VocabularyError)
    logger.info("vocabulary: %s of %s token types kept (min_count=%s)", len(kept), len(counts), min_count)
    return Vocabulary([t for t, _c in kept], [c for _t, c in kept])


def train_sgns(sentences, config=None):
    """
        Train skip-gram embeddings with negative sampling.
        Learning rate decays linearly from `initial_lr` to `initial_lr / 1e4` over all epochs.
        With workers=1 the result is fully determined by the corpus and `seed`; with more
        workers the threads update the shared matrices without locks and runs differ.
        Args:
            sentences (iterable): Token lists or TokenSentences; read into memory once.
            config (TrainConfig): Hyperparameters.
        Returns:
            EmbeddingModel
    """
    config = (config or TrainConfig()).validate()
    corpus = [list(tokens) for tokens in _token_lists(sentences)]
    vocab = build_vocab(corpus, config.min_count)
    index = vocab.index
    encoded = [np.fromiter((index[t] for t in tokens if t in index), dtype=np.int32) for tokens in corpus]
    del corpus

    seed_seq = np.random.SeedSequence(config.seed)
    init_rng = np.random.default_rng(seed_seq)
    worker_rngs = [np.random.default_rng(s) for s in seed_seq.spawn(config.workers)]

    size, dim = len(vocab), config.dim
    w_in = ((init_rng.random((size, dim), dtype=REAL) - REAL(0.5)) / REAL(dim)).astype(REAL)
    w_out = np.zeros((size, dim), dtype=REAL)

    trainer = _Trainer(config, w_in, w_out, vocab.counts, encoded)
    started = time.monotonic()
    if config.workers == 1:
        trainer.run(0, worker_rngs[0])
    else:
        with ThreadPoolExecutor(max_workers=config.workers, thread_name_prefix="sgns") as pool:
            for future in [pool.submit(trainer.run, w, worker_rngs[w]) for w in range(config.workers)]:
                future.result()
    elapsed = time.monotonic() - started
    logger.info("trained %s epochs over %s words in %.1fs (%.0f words/s)", config.epochs, trainer.total_words,
                elapsed, trainer.total_words / elapsed if elapsed else 0.0)
    return EmbeddingModel(vocab, w_in, w_out, config)


class _Trainer:
    def __init__(self, config, w_in, w_out, counts, encoded):
        self.config = config
        self.w_in = w_in
        self.w_out = w_out
        self.negative_table = make_negative_table(counts)
        self.keep_prob = keep_probabilities(counts, config.subsample) if config.subsample else None
        self.sigmoid = SigmoidTable()
        self.batches = list(batch_sentences(encoded, config.batch_words))
        self.total_words = sum(n for _b, n in self.batches) * config.epochs
        self.done_words = 0
        self._lock = threading.Lock()

    def next_lr(self, n_words):
        with self._lock:
            done = self.done_words
            self.done_words += n_words
        progress = done / self.total_words if self.total_words else 1.0
        return self.config.initial_lr - (self.config.initial_lr - self.config.min_lr) * progress

    def run(self, worker, rng):
        config = self.config
        for epoch in range(config.epochs):
            for b in range(worker, len(self.batches), config.workers):
                batch, n_words = self.batches[b]
                lr = self.next_lr(n_words)
                centers, contexts = skipgram_pairs(batch, config.window, rng, self.keep_prob)
                if not len(centers):
                    continue
                draws = rng.integers(0, len(self.negative_table), size=(len(centers), config.negative))
                negatives = self.negative_table[draws]
                sgns_batch_update(self.w_in, self.w_out, centers, contexts, negatives, lr, sigmoid=self.sigmoid)
            if worker == 0:
                logger.info("epoch %s/%s done, lr %.6f", epoch + 1, config.epochs, lr if self.batches else 0.0)


def cosine(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    denom = np.linalg.norm(a) * np.linalg.norm(b)
    if denom == 0.0:
        return 0.0
    return float(np.dot(a, b) / denom)


def cosine_scores(matrix, seed_vector):
    """Cosine of every row against the seed, computed in float64; zero rows score 0."""
    matrix = np.asarray(matrix, dtype=np.float64)
    seed = np.asarray(seed_vector, dtype=np.float64)
    norms = np.linalg.norm(matrix, axis=1) * np.linalg.norm(seed)
    dots = np.einsum("ij,j->i", matrix, seed)
    return np.divide(dots, norms, out=np.zeros_like(dots), where=norms > 0)


def nearest_neighbors(model, seed_vector, k, filter=None, exclude=()):
    """
        Exact top-k search by cosine over the input vectors.
        Args:
            model (EmbeddingModel): A trained model.
            seed_vector (array): Query vector of length dim with non-zero norm.
            k (int): Number of results; None for every passing term.
            filter (callable): term -> bool; terms failing it are skipped.
            exclude (set): Terms never returned.
        Returns:
            list: (term, cosine) tuples, cosine descending, ties by vocabulary index.
    """
    seed = np.asarray(seed_vector, dtype=np.float64)
    if seed.shape != (model.dim,):
        needstack.throw(_("seed vector has shape {0}, expected ({1},)").format(seed.shape, model.dim))
    if k is not None and k < 0:
        needstack.throw(_("k must be >= 0, got {0}").format(k))
    norm = np.linalg.norm(seed)
    if not np.isfinite(norm) or norm == 0.0:
        needstack.throw(_("degenerate seed: the seed vector has zero norm"))
    if k == 0:
        return []

    scores = cosine_scores(model.input_vectors, seed)
    order = np.lexsort((np.arange(len(scores)), -scores))
    terms = model.vocab.terms
    result = []
    for i in order:
        term = terms[i]
        if term in exclude or (filter is not None and not filter(term)):
            continue
        result.append((term, float(scores[i])))
        if k is not None and len(result) == k:
            break
    return result
