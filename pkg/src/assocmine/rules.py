"""Association rules: generation from frequent itemsets, ranking, output,
and a consistency checker for published rule tables."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

from assocmine.apriori import FrequentItemsetTable
from assocmine.errors import ConsistencyError, ParameterError, ParseError
from assocmine.transactions import Vocabulary

RULE_COLUMNS = (
    "no",
    "antecedents",
    "consequents",
    "antecedent_support",
    "consequent_support",
    "support",
    "confidence",
    "lift",
)
METRIC_COLUMNS = RULE_COLUMNS[3:]


@dataclass(frozen=True)
class AssociationRule:
    """Rule ``antecedent -> consequent`` backed by absolute counts.

    The fractional metrics are derived on access so the confidence and lift
    identities hold by construction.
    """

    antecedent: tuple
    consequent: tuple
    antecedent_count: int
    consequent_count: int
    count: int
    n: int

    @property
    def antecedent_support(self) -> float:
        return self.antecedent_count / self.n

    @property
    def consequent_support(self) -> float:
        return self.consequent_count / self.n

    @property
    def support(self) -> float:
        return self.count / self.n

    @property
    def confidence(self) -> float:
        return self.support / self.antecedent_support

    @property
    def lift(self) -> float:
        return self.confidence / self.consequent_support

    @property
    def association(self) -> str:
        lift = self.lift
        if lift > 1:
            return "positive"
        if lift < 1:
            return "negative"
        return "independent"

    def metrics(self) -> tuple[float, float, float, float, float]:
        return (self.antecedent_support, self.consequent_support, self.support, self.confidence, self.lift)


@dataclass(frozen=True)
class RuleFilter:
    min_confidence: float = 0.0
    min_lift: float = 0.6
    max_antecedent_size: int = 1
    max_consequent_size: int = 1
    top_n: int | None = None

    def __post_init__(self):
        if not 0 <= self.min_confidence <= 1:
            raise ParameterError(f"min_confidence must be in [0, 1], got {self.min_confidence}")
        if self.min_lift < 0:
            raise ParameterError(f"min_lift must be >= 0, got {self.min_lift}")
        for name in ("max_antecedent_size", "max_consequent_size"):
            val = getattr(self, name)
            if not isinstance(val, int) or val < 1:
                raise ParameterError(f"{name} must be a positive integer, got {val!r}")
        if self.top_n is not None and (not isinstance(self.top_n, int) or self.top_n < 1):
            raise ParameterError(f"top_n must be a positive integer, got {self.top_n!r}")

    def accepts(self, rule) -> bool:
        return rule.confidence >= self.min_confidence and rule.lift >= self.min_lift


def rank_key(rule):
    return (-rule.confidence, -rule.lift, tuple(rule.antecedent), tuple(rule.consequent))


def rank_rules(rules: Iterable) -> list:
    """Confidence desc, then lift desc, then antecedent, then consequent.

    Works for anything exposing ``confidence``, ``lift``, ``antecedent`` and
    ``consequent``. Item ids sort the same as their tokens because the
    vocabulary assigns ids in token order.
    """
    return sorted(rules, key=rank_key)


def generate_rules(table: FrequentItemsetTable, rule_filter: RuleFilter | None = None) -> list[AssociationRule]:
    """All filtered rules from every frequent itemset of size >= 2, ranked.

    ``rule_filter.top_n`` truncates after ranking.
    """
    rule_filter = rule_filter or RuleFilter()
    n = table.n
    out = []
    for fis in table:
        z = fis.items
        if len(z) < 2:
            continue
        max_a = min(rule_filter.max_antecedent_size, len(z) - 1)
        for a_size in range(1, max_a + 1):
            if len(z) - a_size > rule_filter.max_consequent_size:
                continue
            for ante in combinations(z, a_size):
                cons = tuple(i for i in z if i not in ante)
                a_count = table.count(ante)
                c_count = table.count(cons)
                if a_count is None or c_count is None:
                    missing = ante if a_count is None else cons
                    raise ConsistencyError(
                        f"subset {missing} of frequent itemset {z} has no recorded support"
                    )
                rule = AssociationRule(ante, cons, a_count, c_count, fis.count, n)
                if rule_filter.accepts(rule):
                    out.append(rule)
    ranked = rank_rules(out)
    if rule_filter.top_n is not None:
        ranked = ranked[: rule_filter.top_n]
    return ranked


# ---------------------------------------------------------------- output


def rule_records(rules: Sequence[AssociationRule], vocab: Vocabulary | None = None) -> list[dict]:
    def words(items):
        return " ".join(vocab.tokens(items) if vocab is not None else map(str, items))

    return [
        {
            "no": i,
            "antecedents": words(r.antecedent),
            "consequents": words(r.consequent),
            "antecedent_support": r.antecedent_support,
            "consequent_support": r.consequent_support,
            "support": r.support,
            "confidence": r.confidence,
            "lift": r.lift,
            "association": r.association,
        }
        for i, r in enumerate(rules, start=1)
    ]


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def format_rules(rules: Sequence[AssociationRule], vocab: Vocabulary | None, fmt: str = "csv") -> str:
    records = rule_records(rules, vocab)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(RULE_COLUMNS)
        for rec in records:
            w.writerow([rec["no"], rec["antecedents"], rec["consequents"], *(_fmt(rec[c]) for c in METRIC_COLUMNS)])
        return buf.getvalue()
    if fmt == "json":
        rows = [
            {**{c: rec[c] for c in RULE_COLUMNS[:3]}, **{c: round(rec[c], 6) for c in METRIC_COLUMNS}}
            for rec in records
        ]
        return json.dumps(rows, indent=2, ensure_ascii=False) + "\n"
    if fmt == "table":
        header = ["No", "Antecedents", "Consequents", "Antecedent Support", "Consequent Support",
                  "Support", "Confidence", "Lift", ""]
        body = [
            [str(rec["no"]), rec["antecedents"], rec["consequents"], *(_fmt(rec[c]) for c in METRIC_COLUMNS),
             "negative association" if rec["association"] == "negative" else ""]
            for rec in records
        ]
        widths = [max(len(row[i]) for row in [header, *body]) for i in range(len(header))]
        lines = []
        for row in [header, *body]:
            cells = [c.ljust(w) if i in (1, 2, 8) else c.rjust(w) for i, (c, w) in enumerate(zip(row, widths))]
            lines.append("  ".join(cells).rstrip())
        lines.insert(1, "  ".join("-" * w for w in widths[:-1]))
        return "\n".join(lines) + "\n"
    raise ParameterError(f"unknown output format {fmt!r}")


# ---------------------------------------------------------------- validation


@dataclass(frozen=True)
class ReportedRule:
    """One row of a published rule table, values as printed."""

    no: int
    antecedent: tuple[str, ...]
    consequent: tuple[str, ...]
    antecedent_support: float
    consequent_support: float
    support: float
    confidence: float
    lift: float
    expected_flags: frozenset[str] = frozenset()


def parse_rule_table(text: str, source: str = "<table>") -> list[ReportedRule]:
    """Parse the rule CSV layout. An optional ``expected_flags`` column lists
    cells (space separated) the table is known to get wrong."""
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise ParseError(f"{source}: empty table")
    missing = [c for c in RULE_COLUMNS if c not in reader.fieldnames]
    if missing:
        raise ParseError(f"{source}: missing column(s) {', '.join(missing)}")
    rows = []
    for rec in reader:
        where = f"{source} row {len(rows) + 1}"
        try:
            no = int(rec["no"])
            metrics = [float(rec[c]) for c in METRIC_COLUMNS]
        except (TypeError, ValueError):
            raise ParseError(f"{where}: non-numeric value") from None
        ante = tuple(str(rec["antecedents"] or "").split())
        cons = tuple(str(rec["consequents"] or "").split())
        if not ante or not cons:
            raise ParseError(f"{where}: empty antecedent or consequent")
        flags = frozenset((rec.get("expected_flags") or "").split())
        unknown = flags - set(METRIC_COLUMNS)
        if unknown:
            raise ParseError(f"{where}: unknown expected flag(s) {sorted(unknown)}")
        rows.append(ReportedRule(no, ante, cons, *metrics, expected_flags=flags))
    return rows


def read_rule_table(path: str | Path) -> list[ReportedRule]:
    path = Path(path)
    return parse_rule_table(path.read_text(encoding="utf-8"), str(path))


@dataclass(frozen=True)
class CellFlag:
    row: int
    field: str
    reported: float
    recomputed: float
    rel_deviation: float
    expected: bool


@dataclass(frozen=True)
class SymmetryCheck:
    rows: tuple[int, int]
    support_ok: bool
    lift_ok: bool

    @property
    def ok(self) -> bool:
        return self.support_ok and self.lift_ok


@dataclass
class ValidationReport:
    rel_tolerance: float
    rows: list[ReportedRule]
    flags: list[CellFlag] = field(default_factory=list)
    symmetry: list[SymmetryCheck] = field(default_factory=list)

    @property
    def unexpected_flags(self) -> list[CellFlag]:
        return [f for f in self.flags if not f.expected]

    @property
    def ok(self) -> bool:
        return not self.unexpected_flags and all(s.ok for s in self.symmetry)

    def flagged_cells(self) -> list[tuple[int, str]]:
        return [(f.row, f.field) for f in self.flags]

    def lines(self) -> list[str]:
        out = []
        by_row: dict[int, list[CellFlag]] = {}
        for f in self.flags:
            by_row.setdefault(f.row, []).append(f)
        for r in self.rows:
            label = f"row {r.no:>3} {' '.join(r.antecedent)} -> {' '.join(r.consequent)}"
            row_flags = by_row.get(r.no, [])
            if not row_flags:
                out.append(f"{label}: consistent")
            for f in row_flags:
                tag = "expected" if f.expected else "FLAG"
                out.append(
                    f"{label}: {tag} {f.field} reported {f.reported:.6f}, "
                    f"recomputed {f.recomputed:.6f} (rel dev {f.rel_deviation:.2e})"
                )
        for s in self.symmetry:
            status = "ok" if s.ok else "FAIL"
            out.append(f"symmetry rows {s.rows[0]},{s.rows[1]}: support {'ok' if s.support_ok else 'differs'}, "
                       f"lift {'ok' if s.lift_ok else 'differs'} -> {status}")
        out.append(f"{len(self.flags)} flag(s), {len(self.unexpected_flags)} unexpected; "
                   f"tolerance {self.rel_tolerance:g}: {'PASS' if self.ok else 'FAIL'}")
        return out


def _rel_dev(reported: float, recomputed: float) -> float:
    if reported == recomputed:
        return 0.0
    scale = abs(reported) if reported else abs(recomputed)
    return abs(reported - recomputed) / scale


def _marginals(rows: Sequence[ReportedRule]) -> dict[tuple[str, ...], list[tuple[int, float]]]:
    """Every printed support for each item set, keyed to the row that printed it."""
    seen: dict[tuple[str, ...], list[tuple[int, float]]] = {}
    for r in rows:
        seen.setdefault(r.antecedent, []).append((r.no, r.antecedent_support))
        seen.setdefault(r.consequent, []).append((r.no, r.consequent_support))
    return seen


def validate_rule_table(rows: Sequence[ReportedRule], rel_tolerance: float = 5e-4) -> ValidationReport:
    """Recompute confidence and lift from each row's own supports.

    When a recomputation disagrees, the blame goes to the support cell if a
    value printed for the same item set elsewhere in the table makes the row
    consistent again; otherwise the derived cell (confidence or lift) is
    flagged. Rows with swapped antecedent and consequent must agree on
    support and lift.
    """
    if rel_tolerance < 0:
        raise ParameterError("rel_tolerance must be >= 0")
    report = ValidationReport(rel_tolerance, list(rows))
    marginals = _marginals(rows)

    def alternatives(items, row_no, own):
        return [v for r, v in marginals.get(items, []) if r != row_no and _rel_dev(own, v) > rel_tolerance]

    def flag(r, name, reported, recomputed):
        report.flags.append(
            CellFlag(r.no, name, reported, recomputed, _rel_dev(reported, recomputed), name in r.expected_flags)
        )

    for r in rows:
        if r.antecedent_support <= 0 or r.consequent_support <= 0 or r.lift <= 0:
            raise ParseError(f"row {r.no}: supports and lift must be positive")
        conf = r.support / r.antecedent_support
        if _rel_dev(r.confidence, conf) > rel_tolerance:
            fixes = [v for v in alternatives(r.antecedent, r.no, r.antecedent_support)
                     if _rel_dev(r.confidence, r.support / v) <= rel_tolerance]
            if fixes:
                flag(r, "antecedent_support", r.antecedent_support, fixes[0])
            else:
                flag(r, "confidence", r.confidence, conf)
        lift = r.confidence / r.consequent_support
        if _rel_dev(r.lift, lift) > rel_tolerance:
            fixes = [v for v in alternatives(r.consequent, r.no, r.consequent_support)
                     if _rel_dev(r.lift, r.confidence / v) <= rel_tolerance]
            if fixes:
                flag(r, "consequent_support", r.consequent_support, fixes[0])
            else:
                flag(r, "lift", r.lift, lift)

    for i, a in enumerate(rows):
        for b in rows[i + 1:]:
            if a.antecedent == b.consequent and a.consequent == b.antecedent:
                report.symmetry.append(
                    SymmetryCheck(
                        (a.no, b.no),
                        _rel_dev(a.support, b.support) <= rel_tolerance,
                        _rel_dev(a.lift, b.lift) <= rel_tolerance,
                    )
                )
    return report
