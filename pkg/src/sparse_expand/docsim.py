"""Related-concept suggestion by document similarity.

Each corpus document stands for one concept (its title). Documents are
compared through their n most important words, where importance is the
TF*IDF weight used by the index module, and

    sim(d1, d2) = |top_n(d1) & top_n(d2)| / n

a set-overlap variant of the Jaccard coefficient with a fixed
denominator. Scores are exact rationals.
"""

from __future__ import annotations

import urllib.parse
from collections import Counter
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .analysis import chain_for
from .errors import DataError, SeedNotFoundError
from .index import idf_weight
from .suggestions import SuggestionSet, make_suggestion_set


class SimCorpus:
    """Immutable (title, body) collection with cached important-word sets."""

    def __init__(self, documents: Iterable[tuple[str, str]], lang: str = "en"):
        self.lang = lang
        self._chain = chain_for(lang)
        self._term_counts: dict[str, Counter] = {}
        for title, body in documents:
            if title in self._term_counts:
                raise DataError(f"duplicate document title {title!r}")
            self._term_counts[title] = Counter(self._chain.run(body))
        if not self._term_counts:
            raise DataError("similarity corpus is empty")
        self._df = Counter()
        for counts in self._term_counts.values():
            self._df.update(counts.keys())
        self._important: dict[tuple[str, int], frozenset[str]] = {}

    @classmethod
    def from_dir(cls, path: str | Path, lang: str = "en") -> "SimCorpus":
        """Load `<percent-encoded-title>.txt` files from a directory."""
        docs = [
            (urllib.parse.unquote(file.stem), file.read_text(encoding="utf-8"))
            for file in sorted(Path(path).glob("*.txt"))
        ]
        return cls(docs, lang=lang)

    @property
    def titles(self) -> list[str]:
        return sorted(self._term_counts)

    @property
    def n_docs(self) -> int:
        return len(self._term_counts)

    def __contains__(self, title: str) -> bool:
        return title in self._term_counts

    def important_words(self, title: str, n: int) -> frozenset[str]:
        """The n highest tf*idf terms of a document.

        Ties prefer the lexicographically smaller term; documents with
        fewer than n distinct terms contribute all of them.
        """
        if n < 1:
            raise ValueError("n must be >= 1")
        if title not in self._term_counts:
            raise SeedNotFoundError(f"document not in corpus: {title!r}")
        key = (title, n)
        cached = self._important.get(key)
        if cached is not None:
            return cached
        counts = self._term_counts[title]
        ranked = sorted(
            counts,
            key=lambda term: (-counts[term] * idf_weight(self.n_docs, self._df[term]), term),
        )
        words = frozenset(ranked[:n])
        self._important[key] = words
        return words

    def sim(self, title1: str, title2: str, n: int) -> Fraction:
        """Important-word overlap of two documents, in [0, 1]."""
        words1 = self.important_words(title1, n)
        words2 = self.important_words(title2, n)
        return Fraction(len(words1 & words2), n)


def suggest_docsim(
    corpus: SimCorpus,
    seed_title: str,
    k: int = 10,
    n: int = 50,
    source: str = "WIKI_SIM",
    topic_id: str = "",
) -> SuggestionSet:
    """Titles of the documents most similar to the seed document.

    The seed itself is excluded and zero-score documents are omitted,
    so fewer than k suggestions may come back.
    """
    if seed_title not in corpus:
        raise SeedNotFoundError(f"seed not found: {seed_title!r}")
    scored: list[tuple[str, Fraction]] = []
    for title in corpus.titles:
        if title == seed_title:
            continue
        score = corpus.sim(seed_title, title, n)
        if score > 0:
            scored.append((title, score))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return make_suggestion_set(topic_id, source, scored[:k])
