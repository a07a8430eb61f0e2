"""Deterministic synthetic corpora for tests."""

import csv
import random
from itertools import accumulate

SYLLABLES = ["ba", "ca", "da", "ga", "ha", "ja", "la", "ma", "na", "ra", "sa", "ta", "wa", "ya",
             "bu", "du", "gu", "lu", "mu", "nu", "ru", "su", "tu", "bo", "do", "lo", "ro", "so"]


def make_words(count, seed=0):
    rng = random.Random(seed)
    words = set()
    while len(words) < count:
        words.add("".join(rng.choice(SYLLABLES) for _ in range(rng.randint(2, 4))))
    return sorted(words)


def zipf_token_lists(n_docs, vocab_size, seed=0, doc_len=(10, 60), exponent=1.0, cover_vocab=True):
    """Documents drawn from a Zipf-weighted vocabulary of pseudo-words.

    With ``cover_vocab`` every word is used at least once, so the vocabulary
    built from the result has exactly ``vocab_size`` entries.
    """
    rng = random.Random(seed)
    words = make_words(vocab_size, seed)
    rng.shuffle(words)
    cum = list(accumulate(1.0 / (r + 1) ** exponent for r in range(vocab_size)))
    docs = []
    for _ in range(n_docs):
        k = rng.randint(*doc_len)
        docs.append(rng.choices(words, cum_weights=cum, k=k))
    if cover_vocab:
        used = set().union(*docs)
        for j, w in enumerate(w for w in words if w not in used):
            docs[j % n_docs].append(w)
    return docs


def write_corpus_csv(path, token_lists, seed=0):
    rng = random.Random(seed)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["No", "BAB", "Hadist", "Len"])
        for i, tokens in enumerate(token_lists, start=1):
            text = " ".join(t.capitalize() if rng.random() < 0.1 else t for t in tokens)
            text = text + rng.choice([".", "!", ", 2 kali.", ""])
            w.writerow([i, 1 + i // 50, text, len(text)])


def random_transactions(rng, n_max=50, v_max=12):
    """Small random 0/1 matrix as item-id rows, with row density varied per corpus."""
    n = rng.randint(1, n_max)
    v = rng.randint(1, v_max)
    density = rng.uniform(0.1, 0.9)
    return [tuple(i for i in range(v) if rng.random() < density) for _ in range(n)], v
