"""Command line entry point: ``assocmine mine | preprocess | validate-table``.

Exit codes: 0 success, 1 validation/parameter error, 2 I/O error,
3 internal consistency error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
import time
from dataclasses import asdict, dataclass, fields
from importlib import resources
from pathlib import Path

from assocmine import __version__
from assocmine.apriori import MiningParams, mine_frequent_itemsets, write_itemsets_csv
from assocmine.corpus import Corpus, load_corpus
from assocmine.errors import AssocMineError, CorpusValidationError, ParameterError
from assocmine.rules import RuleFilter, format_rules, generate_rules, read_rule_table, validate_rule_table
from assocmine.textprep import (
    PipelineConfig,
    default_extra_stopwords,
    default_stopwords,
    preprocess_corpus,
    read_wordlist,
)
from assocmine.transactions import build_vocabulary, dump_tokens_jsonl, encode

log = logging.getLogger("assocmine")

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_INTERNAL = 0, 1, 2, 3


@dataclass
class RunConfig:
    input: str | None = None
    format: str = "csv"
    tsv: bool = False
    skip_invalid: bool = False
    col_no: str | None = None
    col_bab: str | None = None
    col_text: str | None = None
    col_len: str | None = None
    no_case_fold: bool = False
    no_punct_strip: bool = False
    no_stopwords: bool = False
    stopwords: str | None = None
    extra_stopwords: str | None = None
    stemmer: str = "affix"
    min_support: float = 0.02
    max_itemset_size: int | None = None
    min_confidence: float = 0.0
    min_lift: float = 0.6
    max_antecedent: int = 1
    max_consequent: int = 1
    top: int | None = None
    threads: int = 1
    out: str | None = None
    out_format: str = "csv"
    manifest: str | None = None
    dump_itemsets: str | None = None
    dump_tokens: str | None = None

    @classmethod
    def from_sources(cls, config_file: str | None, flags: dict) -> "RunConfig":
        """Defaults, then the config file, then explicit flags."""
        values = {}
        if config_file:
            with open(config_file, encoding="utf-8") as fh:
                data = json.load(fh)
            if "config" in data and isinstance(data["config"], dict):
                data = data["config"]  # accept a run manifest directly
            known = {f.name for f in fields(cls)}
            unknown = set(data) - known
            if unknown:
                raise ParameterError(f"{config_file}: unknown config key(s) {', '.join(sorted(unknown))}")
            values.update(data)
        values.update(flags)
        return cls(**values)

    def column_map(self) -> dict[str, str]:
        pairs = {"no": self.col_no, "bab": self.col_bab, "text": self.col_text, "len": self.col_len}
        return {k: v for k, v in pairs.items() if v is not None}

    def pipeline(self) -> PipelineConfig:
        stemmer = {"affix": "affix_strip", "affix_strip": "affix_strip", "none": "none"}.get(self.stemmer)
        if stemmer is None:
            raise ParameterError(f"unknown stemmer {self.stemmer!r}")
        base = read_wordlist(self.stopwords) if self.stopwords else default_stopwords()
        extra = read_wordlist(self.extra_stopwords) if self.extra_stopwords else default_extra_stopwords()
        return PipelineConfig(
            enable_case_fold=not self.no_case_fold,
            enable_punct_strip=not self.no_punct_strip,
            enable_stopwords=not self.no_stopwords,
            enable_stemming=stemmer != "none",
            base_stopword_list=base,
            extra_stopword_list=extra,
            stemmer=stemmer,
        )

    def mining_params(self) -> MiningParams:
        return MiningParams(self.min_support, self.max_itemset_size)

    def rule_filter(self) -> RuleFilter:
        return RuleFilter(self.min_confidence, self.min_lift, self.max_antecedent, self.max_consequent, self.top)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _input_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("input")
    g.add_argument("--config", help="JSON config file (or a previous run manifest); flags override it")
    g.add_argument("--input", help="corpus file")
    g.add_argument("--format", choices=["csv", "tsv", "jsonl"])
    g.add_argument("--tsv", action="store_true", help="tab-delimited CSV")
    g.add_argument("--skip-invalid", action="store_true", help="skip and count bad rows instead of failing")
    g.add_argument("--col-no")
    g.add_argument("--col-bab")
    g.add_argument("--col-text")
    g.add_argument("--col-len")
    g = p.add_argument_group("preprocessing")
    g.add_argument("--no-case-fold", action="store_true")
    g.add_argument("--no-punct-strip", action="store_true")
    g.add_argument("--no-stopwords", action="store_true")
    g.add_argument("--stopwords", metavar="FILE", help="replace the bundled base stopword list")
    g.add_argument("--extra-stopwords", metavar="FILE", help="replace the default extra stopword list")
    g.add_argument("--stemmer", choices=["none", "affix", "affix_strip"])
    g.add_argument("--dump-tokens", metavar="FILE", help="write {row_id, tokens} JSONL")
    p.add_argument("-q", "--quiet", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="assocmine", description="Association rule mining over a text corpus.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    S = argparse.SUPPRESS

    mine = sub.add_parser("mine", help="preprocess, mine frequent itemsets and emit ranked rules", argument_default=S)
    _input_args(mine)
    g = mine.add_argument_group("mining")
    g.add_argument("--min-support", type=float)
    g.add_argument("--max-itemset-size", type=int)
    g.add_argument("--min-confidence", type=float)
    g.add_argument("--min-lift", type=float)
    g.add_argument("--max-antecedent", type=int)
    g.add_argument("--max-consequent", type=int)
    g.add_argument("--top", type=int)
    g.add_argument("--threads", type=int)
    g = mine.add_argument_group("output")
    g.add_argument("--out", help="rule table path (stdout if omitted)")
    g.add_argument("--out-format", choices=["csv", "json", "table"])
    g.add_argument("--manifest", help="run manifest path (default: <out>.manifest.json)")
    g.add_argument("--dump-itemsets", metavar="FILE")

    prep = sub.add_parser("preprocess", help="run ingestion and preprocessing only", argument_default=S)
    _input_args(prep)

    val = sub.add_parser("validate-table", help="check a published rule table for internal consistency")
    val.add_argument("fixture", nargs="?", help="rule table CSV (default: bundled reference table)")
    val.add_argument("--tol", type=float, default=5e-4, help="relative tolerance (default 5e-4)")
    return parser


def _run_config(ns: argparse.Namespace) -> RunConfig:
    flags = {k: v for k, v in vars(ns).items() if k not in ("command", "config", "quiet", "fixture", "tol")}
    return RunConfig.from_sources(getattr(ns, "config", None), flags)


class _Outputs:
    """Collects output files and writes them only once the whole run succeeded."""

    def __init__(self):
        self.pending: list[tuple[Path, str]] = []

    def add(self, path: str | None, content: str) -> None:
        if path:
            self.pending.append((Path(path), content))

    def commit(self) -> None:
        staged = []
        try:
            for path, content in self.pending:
                fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
                staged.append((tmp, path))
                with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                    fh.write(content)
            for tmp, path in staged:
                os.replace(tmp, path)
        except BaseException:
            for tmp, _ in staged:
                if os.path.exists(tmp):
                    os.unlink(tmp)
            raise


def _load(cfg: RunConfig) -> Corpus:
    if not cfg.input:
        raise ParameterError("--input is required")
    fmt = "tsv" if cfg.tsv and cfg.format == "csv" else cfg.format
    corpus = load_corpus(cfg.input, fmt, cfg.column_map(), cfg.skip_invalid)
    if len(corpus) == 0:
        raise CorpusValidationError(f"{cfg.input}: empty corpus (0 accepted rows, {corpus.ingest_report.skipped} skipped)")
    return corpus


def _token_dump(corpus: Corpus, token_lists) -> str:
    import io

    buf = io.StringIO()
    dump_tokens_jsonl(buf, [d.row_id for d in corpus], token_lists)
    return buf.getvalue()


def cmd_preprocess(cfg: RunConfig) -> int:
    corpus = _load(cfg)
    token_lists = preprocess_corpus(corpus.texts, cfg.pipeline())
    dump = _token_dump(corpus, token_lists)
    if cfg.dump_tokens:
        out = _Outputs()
        out.add(cfg.dump_tokens, dump)
        out.commit()
    else:
        sys.stdout.write(dump)
    return EXIT_OK


def cmd_mine(cfg: RunConfig) -> int:
    started = time.perf_counter()
    params = cfg.mining_params()
    rule_filter = cfg.rule_filter()
    pipeline = cfg.pipeline()
    if cfg.threads < 1:
        raise ParameterError("--threads must be >= 1")

    corpus = _load(cfg)
    token_lists = preprocess_corpus(corpus.texts, pipeline)
    vocab = build_vocabulary(token_lists)
    tset = encode(token_lists, vocab)
    log.info("transactions: n=%d v=%d empty=%d", tset.n, tset.v, tset.empty_rows)

    table = mine_frequent_itemsets(tset, params, threads=cfg.threads)
    rules = generate_rules(table, rule_filter)
    log.info("rules: %d (n=%d v=%d)", len(rules), tset.n, tset.v)
    rendered = format_rules(rules, vocab, cfg.out_format)

    out = _Outputs()
    out.add(cfg.out, rendered)
    if cfg.dump_itemsets:
        import io

        buf = io.StringIO()
        write_itemsets_csv(buf, table, vocab)
        out.add(cfg.dump_itemsets, buf.getvalue())
    if cfg.dump_tokens:
        out.add(cfg.dump_tokens, _token_dump(corpus, token_lists))
    manifest_path = cfg.manifest or (f"{cfg.out}.manifest.json" if cfg.out else None)
    if manifest_path:
        manifest = {
            "version": __version__,
            "config": asdict(cfg),
            "corpus": {
                "source": corpus.source_path,
                "rows": corpus.ingest_report.total,
                "accepted": corpus.ingest_report.accepted,
                "skipped": corpus.ingest_report.skipped,
            },
            "n": tset.n,
            "v": tset.v,
            "empty_transactions": tset.empty_rows,
            "min_support": params.min_support,
            "min_count": params.min_count(tset.n),
            "min_lift": rule_filter.min_lift,
            "min_confidence": rule_filter.min_confidence,
            "itemsets_per_level": {str(k): c for k, c in table.level_sizes().items()},
            "rules": len(rules),
            "pipeline": pipeline.describe(),
            "wall_time_s": round(time.perf_counter() - started, 3),
        }
        out.add(manifest_path, json.dumps(manifest, indent=2, ensure_ascii=False) + "\n")
    out.commit()
    if not cfg.out:
        sys.stdout.write(rendered)
    return EXIT_OK


def cmd_validate_table(fixture: str | None, rel_tolerance: float) -> int:
    if fixture is None:
        with resources.as_file(resources.files("assocmine").joinpath("data", "table2.csv")) as p:
            rows = read_rule_table(p)
    else:
        rows = read_rule_table(fixture)
    report = validate_rule_table(rows, rel_tolerance)
    for line in report.lines():
        print(line)
    return EXIT_OK if report.ok else EXIT_INVALID


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if getattr(ns, "quiet", False) else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        if ns.command == "validate-table":
            return cmd_validate_table(ns.fixture, ns.tol)
        cfg = _run_config(ns)
        if ns.command == "mine":
            return cmd_mine(cfg)
        return cmd_preprocess(cfg)
    except AssocMineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO if isinstance(exc, OSError) else EXIT_INVALID
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
