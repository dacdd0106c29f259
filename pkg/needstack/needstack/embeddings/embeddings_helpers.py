import numpy as np

REAL = np.float32

MAX_EXP = 6.0
EXP_TABLE_SIZE = 512
NEGATIVE_TABLE_SIZE = 10 ** 7


def exact_sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


class SigmoidTable:
    """
        Sigmoid looked up in a precomputed table over [-MAX_EXP, MAX_EXP];
        clamped to 0 / 1 outside the range.
    """

    def __init__(self, size=EXP_TABLE_SIZE, max_exp=MAX_EXP):
        self.size = size
        self.max_exp = max_exp
        grid = (np.arange(size, dtype=np.float64) / size * 2.0 - 1.0) * max_exp
        self.table = exact_sigmoid(grid).astype(REAL)
        self._scale = size / max_exp / 2.0

    def __call__(self, x):
        idx = ((x + self.max_exp) * self._scale).astype(np.int64)
        out = self.table[np.clip(idx, 0, self.size - 1)]
        out = np.where(x >= self.max_exp, REAL(1.0), out)
        return np.where(x <= -self.max_exp, REAL(0.0), out)


def make_negative_table(counts, power=0.75, size=NEGATIVE_TABLE_SIZE):
    """
        Unigram^power sampling table: a word index appears in proportion to count**power.
        Args:
            counts (array): Per-term corpus counts in vocabulary order.
            power (float): Exponent applied to the counts.
            size (int): Table length.
        Returns:
            np.ndarray: int32 table of vocabulary indices.
    """
    weights = np.asarray(counts, dtype=np.float64) ** power
    cumulative = np.cumsum(weights / weights.sum())
    cumulative[-1] = 1.0
    slots = (np.arange(size, dtype=np.float64) + 0.5) / size
    return np.searchsorted(cumulative, slots, side="left").astype(np.int32)


def keep_probabilities(counts, sample):
    """Probability of keeping each term under frequent-word subsampling: min(1, sqrt(sample / f))."""
    counts = np.asarray(counts, dtype=np.float64)
    if not sample:
        return np.ones(len(counts))
    freq = counts / counts.sum()
    return np.minimum(1.0, np.sqrt(sample / freq))


def sgns_objective(v_w, u_c, u_negs):
    """log s(u_c.v_w) + sum_i log s(-u_n_i.v_w), the quantity a training step ascends."""
    pos = np.dot(u_c, v_w)
    neg = u_negs @ v_w
    return -np.logaddexp(0.0, -pos) - np.sum(np.logaddexp(0.0, neg))


def sgns_gradients(v_w, u_c, u_negs):
    """
        Closed-form gradient of sgns_objective.
        Returns:
            tuple: (d/dv_w, d/du_c, d/du_negs)
    """
    g_pos = 1.0 - exact_sigmoid(np.dot(u_c, v_w))
    g_neg = -exact_sigmoid(u_negs @ v_w)
    d_v = g_pos * u_c + g_neg @ u_negs
    d_u = g_pos * v_w
    d_negs = g_neg[:, None] * v_w[None, :]
    return d_v, d_u, d_negs


def sgns_batch_update(w_in, w_out, centers, contexts, negatives, lr, sigmoid=exact_sigmoid):
    """
        One stochastic ascent step on a batch of (center, context, negatives) examples.
        All gradients are computed from the weights as they were before the batch, then
        accumulated in place. A negative that equals its example's context is ignored.
        Args:
            w_in (np.ndarray): |V| x dim input vectors, updated in place.
            w_out (np.ndarray): |V| x dim output vectors, updated in place.
            centers (np.ndarray): (n,) center word indices.
            contexts (np.ndarray): (n,) context word indices.
            negatives (np.ndarray): (n, k) negative word indices.
            lr (float): Learning rate.
            sigmoid (callable): Sigmoid implementation (exact or table lookup).
    """
    dtype = w_in.dtype
    lr = dtype.type(lr)
    v = w_in[centers]
    u = w_out[contexts]
    u_negs = w_out[negatives]

    g_pos = (1.0 - sigmoid(np.einsum("nd,nd->n", u, v))).astype(dtype) * lr
    g_neg = -sigmoid(np.einsum("nkd,nd->nk", u_negs, v)).astype(dtype) * lr
    g_neg[negatives == contexts[:, None]] = 0.0

    d_v = g_pos[:, None] * u + np.einsum("nk,nkd->nd", g_neg, u_negs)
    d_u = g_pos[:, None] * v
    d_negs = g_neg[:, :, None] * v[:, None, :]

    np.add.at(w_out, contexts, d_u)
    np.add.at(w_out, negatives.ravel(), d_negs.reshape(-1, w_out.shape[1]))
    np.add.at(w_in, centers, d_v)


def skipgram_pairs(sentences, window, rng, keep_prob=None):
    """
        Build (center, context) index pairs for a batch of encoded sentences.
        Frequent words are subsampled first; each center position then draws its
        own window radius uniformly from [1, window].
        Args:
            sentences (list): int32 arrays of vocabulary indices.
            window (int): Maximum window radius.
            rng (np.random.Generator): Random source.
            keep_prob (np.ndarray): Per-term keep probability, or None for no subsampling.
        Returns:
            tuple: (centers, contexts) int arrays of equal length.
    """
    kept = []
    for sent in sentences:
        if keep_prob is not None:
            sent = sent[rng.random(len(sent)) < keep_prob[sent]]
        if len(sent) > 1:
            kept.append(sent)
    if not kept:
        empty = np.empty(0, dtype=np.int32)
        return empty, empty

    flat = np.concatenate(kept)
    sent_ids = np.repeat(np.arange(len(kept)), [len(s) for s in kept])
    radius = rng.integers(1, window + 1, size=len(flat))

    centers, contexts = [], []
    for d in range(1, window + 1):
        if d >= len(flat):
            break
        same = sent_ids[:-d] == sent_ids[d:]
        right = same & (radius[:-d] >= d)
        centers.append(flat[:-d][right])
        contexts.append(flat[d:][right])
        left = same & (radius[d:] >= d)
        centers.append(flat[d:][left])
        contexts.append(flat[:-d][left])
    return np.concatenate(centers), np.concatenate(contexts)


def batch_sentences(encoded, batch_words):
    """Group encoded sentences into consecutive batches of about `batch_words` words."""
    batch, words = [], 0
    for sent in encoded:
        batch.append(sent)
        words += len(sent)
        if words >= batch_words:
            yield batch, words
            batch, words = [], 0
    if batch:
        yield batch, words
