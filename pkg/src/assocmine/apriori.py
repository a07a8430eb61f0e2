"""Levelwise Apriori over a :class:`TransactionSet`.

Candidates of size k+1 come from joining frequent k-itemsets that share
their first k-1 items, are pruned when any k-subset is infrequent, and are
counted by ANDing the cached bit vector of their k-prefix with the column of
their last item.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import groupby
from typing import Iterable, Iterator, Sequence

from assocmine.errors import ParameterError
from assocmine.transactions import TransactionSet, Vocabulary

log = logging.getLogger(__name__)

Itemset = tuple[int, ...]


@dataclass(frozen=True)
class MiningParams:
    min_support: float = 0.02
    max_itemset_size: int | None = None

    def __post_init__(self):
        ms = self.min_support
        if isinstance(ms, bool) or not isinstance(ms, (int, float, Fraction)) or not 0 < ms <= 1:
            raise ParameterError(f"min_support must be in (0, 1], got {ms!r}")
        if self.max_itemset_size is not None and (
            isinstance(self.max_itemset_size, bool)
            or not isinstance(self.max_itemset_size, int)
            or self.max_itemset_size < 1
        ):
            raise ParameterError(f"max_itemset_size must be a positive integer, got {self.max_itemset_size!r}")

    def min_count(self, n: int) -> int:
        """Smallest absolute count that is frequent: ``ceil(min_support * n)``, at least 1.

        The threshold is taken as the decimal the user wrote (``0.1`` is 1/10,
        not the nearest double), so ``0.1 * 30`` gives 3 rather than 4.
        """
        exact = Fraction(repr(self.min_support)) if isinstance(self.min_support, float) else Fraction(self.min_support)
        return max(1, math.ceil(exact * n))


@dataclass(frozen=True, order=True)
class FrequentItemset:
    items: Itemset
    count: int
    rel_support: float = field(compare=False)

    @property
    def size(self) -> int:
        return len(self.items)


@dataclass(frozen=True)
class FrequentItemsetTable:
    by_size: dict[int, tuple[FrequentItemset, ...]]
    params: MiningParams
    n: int
    _counts: dict[Itemset, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(
            self, "_counts", {f.items: f.count for level in self.by_size.values() for f in level}
        )

    def __iter__(self) -> Iterator[FrequentItemset]:
        for k in sorted(self.by_size):
            yield from self.by_size[k]

    def __len__(self) -> int:
        return len(self._counts)

    def __contains__(self, items) -> bool:
        return tuple(items) in self._counts

    def count(self, items: Iterable[int]) -> int | None:
        return self._counts.get(tuple(items))

    def as_dict(self) -> dict[Itemset, int]:
        return dict(self._counts)

    @property
    def max_size(self) -> int:
        return max(self.by_size, default=0)

    def level_sizes(self) -> dict[int, int]:
        return {k: len(v) for k, v in sorted(self.by_size.items())}


def frequent_1_itemsets(tset: TransactionSet, params: MiningParams) -> list[FrequentItemset]:
    if not isinstance(params, MiningParams):
        raise ParameterError("params must be MiningParams")
    threshold = params.min_count(tset.n)
    return [
        FrequentItemset((i,), c, c / tset.n)
        for i, c in enumerate(tset.item_counts())
        if c >= threshold
    ]


def candidate_join(freq_k: Sequence[Itemset]) -> list[Itemset]:
    """F_k join F_k: pairs that agree on all but their last item.

    ``freq_k`` must be sorted lexicographically; the output is then sorted
    and duplicate free without further work.
    """
    out = []
    for prefix, group in groupby(freq_k, key=lambda s: s[:-1]):
        tails = [s[-1] for s in group]
        for a in range(len(tails)):
            for b in range(a + 1, len(tails)):
                out.append(prefix + (tails[a], tails[b]))
    return out


def candidate_prune(candidates: Iterable[Itemset], freq_k) -> list[Itemset]:
    """Keep candidates all of whose k-subsets are in ``freq_k`` (any container)."""
    kept = []
    for cand in candidates:
        if all(cand[:i] + cand[i + 1:] in freq_k for i in range(len(cand))):
            kept.append(cand)
    return kept


def _count_chunk(chunk, prefix_bits, columns):
    return [(prefix_bits[c[:-1]] & columns[c[-1]]) for c in chunk]


def _split(seq: list, parts: int) -> list[list]:
    size = math.ceil(len(seq) / parts) if seq else 0
    return [seq[i:i + size] for i in range(0, len(seq), size)] if size else []


def mine_frequent_itemsets(tset: TransactionSet, params: MiningParams, threads: int = 1) -> FrequentItemsetTable:
    """Run Apriori to completion (or to ``params.max_itemset_size``).

    ``threads`` splits each level's candidate counting into contiguous
    chunks; results are stitched back in candidate order, so the table does
    not depend on it.
    """
    if threads < 1:
        raise ParameterError(f"threads must be >= 1, got {threads}")
    n = tset.n
    threshold = params.min_count(n)
    cap = params.max_itemset_size

    level = frequent_1_itemsets(tset, params)
    by_size: dict[int, tuple[FrequentItemset, ...]] = {}
    if level:
        by_size[1] = tuple(level)
    log.info("level 1: candidates=%d frequent=%d (n=%d v=%d min_count=%d)",
             tset.v, len(level), n, tset.v, threshold)

    columns = tset.column_index
    bits = {f.items: columns[f.items[0]] for f in level}
    k = 1
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while level and (cap is None or k < cap):
            keys = [f.items for f in level]
            candidates = candidate_prune(candidate_join(keys), bits)
            if pool is not None and len(candidates) > threads:
                chunks = _split(candidates, threads)
                vectors = [b for part in pool.map(_count_chunk, chunks, [bits] * len(chunks), [columns] * len(chunks)) for b in part]
            else:
                vectors = _count_chunk(candidates, bits, columns)
            k += 1
            level, next_bits = [], {}
            for cand, vec in zip(candidates, vectors):
                c = vec.bit_count()
                if c >= threshold:
                    level.append(FrequentItemset(cand, c, c / n))
                    next_bits[cand] = vec
            bits = next_bits
            log.info("level %d: candidates=%d frequent=%d (n=%d v=%d)", k, len(candidates), len(level), n, tset.v)
            if level:
                by_size[k] = tuple(level)
    finally:
        if pool is not None:
            pool.shutdown()
    return FrequentItemsetTable(by_size, params, n)


def write_itemsets_csv(fh, table: FrequentItemsetTable, vocab: Vocabulary) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["size", "items", "count", "rel_support"])
    for f in table:
        w.writerow([f.size, " ".join(vocab.tokens(f.items)), f.count, f"{f.rel_support:.6f}"])
