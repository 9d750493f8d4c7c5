import random
from fractions import Fraction

import pytest

from funcflow.embedding import embedding_weight, enumerate_embeddings


def brute_min_weight(net, tree, lengths, cap=5000):
    """Independent oracle: minimum weight by exhaustive enumeration."""
    best = None
    for emb in enumerate_embeddings(net, tree, cap=cap):
        w = embedding_weight(net, emb, lengths)
        if best is None or w < best:
            best = w
    return best


@pytest.fixture
def rng():
    return random.Random(20260810)


def frac(x) -> Fraction:
    return Fraction(x)
