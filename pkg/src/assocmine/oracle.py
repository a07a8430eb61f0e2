"""Brute-force reference miner for tests.

Nothing here touches the bit-vector columns or the Apriori candidate
machinery: itemsets are enumerated exhaustively and counted by scanning rows.
"""

from __future__ import annotations

import math
from decimal import Decimal
from itertools import combinations

from assocmine.apriori import FrequentItemset, FrequentItemsetTable, MiningParams
from assocmine.errors import OracleRefusal, ParameterError
from assocmine.rules import AssociationRule, RuleFilter
from assocmine.transactions import TransactionSet

MAX_ORACLE_VOCAB = 20


def brute_force_itemsets(tset: TransactionSet, min_support: float, max_size: int | None = None) -> FrequentItemsetTable:
    if not 0 < min_support <= 1:
        raise ParameterError(f"min_support must be in (0, 1], got {min_support}")
    if tset.v > MAX_ORACLE_VOCAB:
        raise OracleRefusal(f"vocabulary of {tset.v} items exceeds oracle limit {MAX_ORACLE_VOCAB}")
    n = len(tset.rows)
    need = max(1, math.ceil(Decimal(repr(float(min_support))) * n))
    row_sets = [set(r) for r in tset.rows]
    top = tset.v if max_size is None else min(max_size, tset.v)

    by_size = {}
    for k in range(1, top + 1):
        found = []
        for items in combinations(range(tset.v), k):
            count = 0
            for row in row_sets:
                if all(i in row for i in items):
                    count += 1
            if count >= need:
                found.append(FrequentItemset(items, count, count / n))
        if found:
            by_size[k] = tuple(found)
    return FrequentItemsetTable(by_size, MiningParams(min_support, max_size), n)


def brute_force_rules(table: FrequentItemsetTable, rule_filter: RuleFilter | None = None) -> list[AssociationRule]:
    rule_filter = rule_filter or RuleFilter()
    counts = {f.items: f.count for f in table}
    n = table.n
    found = []
    for items, total in counts.items():
        k = len(items)
        # every non-empty proper subset as antecedent, via bitmask
        for mask in range(1, 2 ** k - 1):
            ante = tuple(items[i] for i in range(k) if mask >> i & 1)
            cons = tuple(items[i] for i in range(k) if not mask >> i & 1)
            if len(ante) > rule_filter.max_antecedent_size or len(cons) > rule_filter.max_consequent_size:
                continue
            s_a = counts[ante] / n
            s_c = counts[cons] / n
            s = total / n
            conf = s / s_a
            lift = conf / s_c
            if conf >= rule_filter.min_confidence and lift >= rule_filter.min_lift:
                found.append((-conf, -lift, ante, cons, AssociationRule(ante, cons, counts[ante], counts[cons], total, n)))
    found.sort(key=lambda t: t[:4])
    rules = [t[-1] for t in found]
    if rule_filter.top_n is not None:
        rules = rules[: rule_filter.top_n]
    return rules
