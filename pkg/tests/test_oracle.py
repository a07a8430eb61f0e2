import pytest

from assocmine.errors import OracleRefusal, ParameterError
from assocmine.oracle import brute_force_itemsets, brute_force_rules
from assocmine.rules import RuleFilter
from assocmine.transactions import TransactionSet


def test_toy_itemsets(toy):
    vocab, tset = toy
    table = brute_force_itemsets(tset, 0.5, 3)
    got = {vocab.tokens(f.items): f.count for f in table}
    assert got == {("a",): 3, ("b",): 3, ("c",): 2, ("a", "b"): 2, ("a", "c"): 2}


def test_parameter_checks(toy):
    _, tset = toy
    with pytest.raises(ParameterError):
        brute_force_itemsets(tset, 1.5, 2)
    with pytest.raises(OracleRefusal):
        brute_force_itemsets(TransactionSet(((0,),), 21), 0.5, 2)


def test_single_transaction():
    table = brute_force_itemsets(TransactionSet(((0,),), 1), 1.0, 1)
    assert table.as_dict() == {(0,): 1}


def test_toy_rules(toy):
    vocab, tset = toy
    rules = brute_force_rules(brute_force_itemsets(tset, 0.5, 3), RuleFilter(min_lift=0))
    pairs = {(vocab.tokens(r.antecedent), vocab.tokens(r.consequent)): r for r in rules}
    ab, ba = pairs[("a",), ("b",)], pairs[("b",), ("a",)]
    assert ab.support == ba.support == 0.5
    assert ab.lift == ba.lift == pytest.approx(8 / 9, abs=1e-12)
    assert len(brute_force_rules(brute_force_itemsets(tset, 0.5, 3), RuleFilter(min_lift=0, top_n=1))) == 1
    assert brute_force_rules(brute_force_itemsets(tset, 0.5, 3), RuleFilter(min_lift=0, top_n=1))[0].confidence == 1.0


def test_empty_table(toy):
    _, tset = toy
    assert brute_force_rules(brute_force_itemsets(tset, 1.0, 3)) == []
