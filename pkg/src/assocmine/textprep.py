"""Text preprocessing: case folding, non-letter stripping, tokenizing,
stopword removal and affix-stripping stemming, in that fixed order."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable

MIN_STEM_LENGTH = 3

STEMMERS = ("none", "affix_strip")


def case_fold(text: str) -> str:
    return text.lower()


def strip_nonletters(text: str) -> str:
    """Replace every character that is neither a letter nor whitespace with a space.

    Digits count as non-letters. Whitespace runs are left for :func:`tokenize`.
    """
    return "".join(ch if ch.isalpha() or ch.isspace() else " " for ch in text)


def tokenize(text: str) -> list[str]:
    return text.split()


def remove_stopwords(tokens: Iterable[str], base: Iterable[str] = (), extra: Iterable[str] = ()) -> list[str]:
    stop = set(base) | set(extra)
    if not stop:
        return list(tokens)
    return [t for t in tokens if t not in stop]


def read_wordlist(path: str | Path) -> frozenset[str]:
    """One entry per line, ``#`` starts a comment. Entries are lowercased."""
    with open(path, encoding="utf-8") as fh:
        return _parse_wordlist(fh.read())


def _parse_wordlist(text: str) -> frozenset[str]:
    words = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            words.add(line.lower())
    return frozenset(words)


def _data_text(name: str) -> str:
    return resources.files("assocmine").joinpath("data", name).read_text(encoding="utf-8")


def default_stopwords() -> frozenset[str]:
    return _parse_wordlist(_data_text("stopwords_id.txt"))


def default_extra_stopwords() -> frozenset[str]:
    return _parse_wordlist(_data_text("stopwords_extra.txt"))


def wordlist_digest(words: Iterable[str]) -> str:
    """Order-independent sha256 of a word set, for run manifests."""
    blob = "\n".join(sorted(words)).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


@dataclass(frozen=True)
class AffixRule:
    kind: str  # "prefix" or "suffix"
    affix: str


class AffixStemmer:
    """Dictionary-free Indonesian affix stripper driven by a rule table.

    The table is a list of sections (affix classes). One pass walks the
    sections in order; in each section the first affix that matches the
    current word is removed if at least ``MIN_STEM_LENGTH`` letters remain,
    otherwise the section is a no-op. Passes repeat until nothing changes,
    which makes ``stem`` idempotent.
    """

    def __init__(self, sections: list[tuple[str, list[AffixRule]]], source: str = ""):
        self.sections = sections
        self.version = "affix_strip/" + hashlib.sha256(source.encode("utf-8")).hexdigest()[:12]
        self._cache: dict[str, str] = {}

    @classmethod
    def parse(cls, text: str) -> "AffixStemmer":
        sections: list[tuple[str, list[AffixRule]]] = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                sections.append((line[1:-1].strip(), []))
                continue
            parts = line.split()
            if len(parts) != 2 or parts[0] not in ("prefix", "suffix"):
                raise ValueError(f"affix rules line {lineno}: expected 'prefix xx-' or 'suffix -xx', got {raw!r}")
            kind, affix = parts
            if kind == "prefix" and affix.endswith("-"):
                affix = affix[:-1]
            elif kind == "suffix" and affix.startswith("-"):
                affix = affix[1:]
            else:
                raise ValueError(f"affix rules line {lineno}: hyphen on the wrong side in {affix!r}")
            if not affix.isalpha():
                raise ValueError(f"affix rules line {lineno}: affix must be letters, got {affix!r}")
            if not sections:
                sections.append(("default", []))
            sections[-1][1].append(AffixRule(kind, affix.lower()))
        return cls(sections, source=text)

    @classmethod
    def from_file(cls, path: str | Path) -> "AffixStemmer":
        return cls.parse(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def default(cls) -> "AffixStemmer":
        return cls.parse(_data_text("affix_rules.txt"))

    def _pass(self, word: str) -> str:
        for _, rules in self.sections:
            for rule in rules:
                if rule.kind == "suffix" and word.endswith(rule.affix):
                    if len(word) - len(rule.affix) >= MIN_STEM_LENGTH:
                        word = word[: -len(rule.affix)]
                    break
                if rule.kind == "prefix" and word.startswith(rule.affix):
                    if len(word) - len(rule.affix) >= MIN_STEM_LENGTH:
                        word = word[len(rule.affix):]
                    break
        return word

    def stem(self, token: str) -> str:
        hit = self._cache.get(token)
        if hit is not None:
            return hit
        word = token
        while True:
            nxt = self._pass(word)
            if nxt == word:
                break
            word = nxt
        self._cache[token] = word
        return word


_default_stemmer: AffixStemmer | None = None


def get_default_stemmer() -> AffixStemmer:
    global _default_stemmer
    if _default_stemmer is None:
        _default_stemmer = AffixStemmer.default()
    return _default_stemmer


def stem_token(token: str, stemmer: str = "affix_strip") -> str:
    if stemmer == "none":
        return token
    if stemmer == "affix_strip":
        return get_default_stemmer().stem(token)
    raise ValueError(f"unknown stemmer {stemmer!r}; expected one of {STEMMERS}")


@dataclass(frozen=True)
class PipelineConfig:
    enable_case_fold: bool = True
    enable_punct_strip: bool = True
    enable_stopwords: bool = True
    enable_stemming: bool = True
    base_stopword_list: frozenset[str] = field(default_factory=frozenset)
    extra_stopword_list: frozenset[str] = field(default_factory=frozenset)
    stemmer: str = "affix_strip"

    def __post_init__(self):
        if self.stemmer not in STEMMERS:
            raise ValueError(f"unknown stemmer {self.stemmer!r}; expected one of {STEMMERS}")
        for name in ("base_stopword_list", "extra_stopword_list"):
            words = frozenset(getattr(self, name))
            bad = sorted(w for w in words if w != w.lower())
            if bad:
                raise ValueError(f"{name} has non-lowercase entries: {bad[:5]}")
            object.__setattr__(self, name, words)

    @classmethod
    def default(cls) -> "PipelineConfig":
        return cls(base_stopword_list=default_stopwords(), extra_stopword_list=default_extra_stopwords())

    @property
    def stemmer_version(self) -> str:
        if not self.enable_stemming or self.stemmer == "none":
            return "none"
        return get_default_stemmer().version

    def describe(self) -> dict:
        return {
            "case_fold": self.enable_case_fold,
            "punct_strip": self.enable_punct_strip,
            "stopwords": self.enable_stopwords,
            "stemming": self.enable_stemming,
            "stemmer": self.stemmer,
            "stemmer_version": self.stemmer_version,
            "base_stopwords_count": len(self.base_stopword_list),
            "base_stopwords_sha256": wordlist_digest(self.base_stopword_list),
            "extra_stopwords": sorted(self.extra_stopword_list),
            "extra_stopwords_sha256": wordlist_digest(self.extra_stopword_list),
        }


def preprocess_document(text: str, config: PipelineConfig) -> list[str]:
    if config.enable_case_fold:
        text = case_fold(text)
    if config.enable_punct_strip:
        text = strip_nonletters(text)
    tokens = tokenize(text)
    if config.enable_stopwords:
        tokens = remove_stopwords(tokens, config.base_stopword_list, config.extra_stopword_list)
    if config.enable_stemming and config.stemmer != "none":
        tokens = [stem_token(t, config.stemmer) for t in tokens]
    return tokens


def preprocess_corpus(texts: Iterable[str], config: PipelineConfig) -> list[list[str]]:
    return [preprocess_document(t, config) for t in texts]
