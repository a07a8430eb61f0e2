"""Vocabulary indexing and the binary document-by-word transaction matrix.

Rows keep each document's sorted item ids; columns keep, per item, a Python
int used as a bit vector over documents (bit ``i`` set when row ``i`` holds
the item). Support counting is AND + popcount over columns.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from assocmine.errors import EncodingError


@dataclass(frozen=True)
class Vocabulary:
    id_to_token: tuple[str, ...]
    token_to_id: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "token_to_id", {t: i for i, t in enumerate(self.id_to_token)})

    def __len__(self) -> int:
        return len(self.id_to_token)

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_id

    def tokens(self, items: Iterable[int]) -> tuple[str, ...]:
        return tuple(self.id_to_token[i] for i in items)

    def ids(self, tokens: Iterable[str]) -> tuple[int, ...]:
        return tuple(sorted(self.token_to_id[t] for t in tokens))


def build_vocabulary(token_lists: Iterable[Sequence[str]]) -> Vocabulary:
    """Distinct tokens, ids assigned in lexicographic token order."""
    distinct = set()
    for tokens in token_lists:
        distinct.update(tokens)
    return Vocabulary(tuple(sorted(distinct)))


def _column_bits(rows: Sequence[tuple[int, ...]], v: int) -> tuple[int, ...]:
    n = len(rows)
    width = (n + 7) // 8
    buffers = [None] * v
    for r, items in enumerate(rows):
        byte, mask = r >> 3, 1 << (r & 7)
        for item in items:
            buf = buffers[item]
            if buf is None:
                buf = buffers[item] = bytearray(width)
            buf[byte] |= mask
    return tuple(0 if b is None else int.from_bytes(b, "little") for b in buffers)


@dataclass(frozen=True)
class TransactionSet:
    rows: tuple[tuple[int, ...], ...]
    v: int
    column_index: tuple[int, ...] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.column_index is None:
            object.__setattr__(self, "column_index", _column_bits(self.rows, self.v))

    @property
    def n(self) -> int:
        return len(self.rows)

    def _check(self, itemset: Iterable[int]) -> list[int]:
        items = list(itemset)
        for i in items:
            if not 0 <= i < self.v:
                raise IndexError(f"item id {i} out of range for vocabulary of size {self.v}")
        return items

    def bits(self, itemset: Iterable[int]) -> int:
        """Bit vector of the rows containing every item of ``itemset``."""
        items = self._check(itemset)
        acc = (1 << self.n) - 1
        for i in items:
            acc &= self.column_index[i]
        return acc

    def support_count(self, itemset: Iterable[int]) -> int:
        return self.bits(itemset).bit_count()

    def relative_support(self, itemset: Iterable[int]) -> float:
        if self.n == 0:
            return 0.0
        return self.support_count(itemset) / self.n

    def item_counts(self) -> list[int]:
        return [c.bit_count() for c in self.column_index]

    @property
    def empty_rows(self) -> int:
        return sum(1 for r in self.rows if not r)

    def one_hot(self) -> list[list[int]]:
        """Dense 0/1 matrix, rows = documents, columns = item ids. For small sets only."""
        out = []
        for items in self.rows:
            row = [0] * self.v
            for i in items:
                row[i] = 1
            out.append(row)
        return out


def encode(token_lists: Sequence[Sequence[str]], vocab: Vocabulary) -> TransactionSet:
    rows = []
    lookup = vocab.token_to_id
    for r, tokens in enumerate(token_lists):
        ids = set()
        for t in tokens:
            try:
                ids.add(lookup[t])
            except KeyError:
                raise EncodingError(t, r) from None
        rows.append(tuple(sorted(ids)))
    return TransactionSet(tuple(rows), len(vocab))


def dump_tokens_jsonl(fh, row_ids: Sequence[int], token_lists: Sequence[Sequence[str]]) -> None:
    """Write one ``{"row_id", "tokens"}`` object per document."""
    for row_id, tokens in zip(row_ids, token_lists):
        fh.write(json.dumps({"row_id": row_id, "tokens": list(tokens)}, ensure_ascii=False))
        fh.write("\n")
