from collections import Counter
from math import log


class PairCounts:
    """
        Adjacent-pair statistics of a (partial) corpus. Shards merge with `+`;
        the merge is associative and commutative.
    """

    __slots__ = ("pairs", "left", "right", "total")

    def __init__(self, pairs=None, left=None, right=None, total=0):
        self.pairs = pairs if pairs is not None else Counter()
        self.left = left if left is not None else Counter()
        self.right = right if right is not None else Counter()
        self.total = total

    @classmethod
    def from_sentences(cls, sentences):
        counts = cls()
        for tokens in sentences:
            counts.update(tokens)
        return counts

    def update(self, tokens):
        for x, y in zip(tokens, tokens[1:]):
            self.pairs[(x, y)] += 1
            self.left[x] += 1
            self.right[y] += 1
        self.total += max(len(tokens) - 1, 0)

    def __add__(self, other):
        return PairCounts(
            self.pairs + other.pairs,
            self.left + other.left,
            self.right + other.right,
            self.total + other.total,
        )

    def __eq__(self, other):
        return (isinstance(other, PairCounts) and self.total == other.total and self.pairs == other.pairs
                and self.left == other.left and self.right == other.right)


def npmi(pair_count, left_count, right_count, total):
    """
        Normalized PMI of an adjacent pair, probabilities taken from pair counts.
        npmi = ln(p(x,y) / (p(x) p(y))) / -ln p(x,y), computed on counts to stay exact.
        Returns:
            float: in [-1, 1]; 1.0 when the pair is the only pair observed.
    """
    if pair_count >= total:
        return 1.0
    return log(pair_count * total / (left_count * right_count)) / log(total / pair_count)


def rescaled_npmi(pair_count, left_count, right_count, total):
    score = (npmi(pair_count, left_count, right_count, total) + 1.0) / 2.0
    return min(max(score, 0.0), 1.0)


def merge_pairs(tokens, accepted):
    """Greedy left-to-right merge of accepted adjacent pairs of component tuples."""
    out = []
    i = 0
    n = len(tokens)
    while i < n:
        if i + 1 < n and (tokens[i], tokens[i + 1]) in accepted:
            out.append(tokens[i] + tokens[i + 1])
            i += 2
        else:
            out.append(tokens[i])
            i += 1
    return out
