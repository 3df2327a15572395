"""Encyclopedia lead-section concept extraction.

Three parts: a markup stripper that removes comments, templates,
media/category links and tables from wikitext (plain [[...]] links are
kept); a lead extractor that collects link targets above the first
heading, in appearance order; and a title matcher that resolves a topic
to an article through four fallback stages.

The stripper is defensive, never raises, and runs its stage pipeline to
a fixpoint, so stripping is idempotent even on pathological nesting.
Unbalanced openers swallow text to the end of the input and set the
`truncated` flag.
"""

from __future__ import annotations

import itertools
import re
import urllib.parse
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple

from .analysis import chain_for, query_tokens, tokenize
from .corpus import Document, Topic
from .errors import DataError
from .index import Index, Phrase, Query, Term, build_index
from .suggestions import SuggestionSet, make_suggestion_set

_COMMENT_RE = re.compile(r"<!--.*?-->", re.S)
_MEDIA_LINK_RE = re.compile(r"\[\[\s*:?\s*(?:file|image|category)\s*:", re.I)
_LINK_RE = re.compile(r"\[\[(.*?)\]\]", re.S)
_INTERLANGUAGE_RE = re.compile(r"^[a-z]{2,3}(?:-[a-z0-9]+)*:")

MAX_PERMUTATION_TOKENS = 6
DEFAULT_MIN_LINKS = 3


class StripResult(NamedTuple):
    text: str
    truncated: bool


def _strip_comments(text: str) -> tuple[str, bool]:
    out = _COMMENT_RE.sub("", text)
    start = out.find("<!--")
    if start != -1:
        return out[:start], True
    return out, False


def _strip_pairs(text: str, open_tok: str, close_tok: str) -> tuple[str, bool]:
    """Drop balanced, possibly nested open..close regions.

    An opener that never closes drops everything to the end of the text.
    Stray closers are ordinary text.
    """
    out: list[str] = []
    i = 0
    depth = 0
    n = len(text)
    while i < n:
        if text.startswith(open_tok, i):
            depth += 1
            i += len(open_tok)
        elif depth and text.startswith(close_tok, i):
            depth -= 1
            i += len(close_tok)
        elif depth == 0:
            out.append(text[i])
            i += 1
        else:
            i += 1
    return "".join(out), depth > 0


def _strip_media_links(text: str) -> tuple[str, bool]:
    out: list[str] = []
    i = 0
    n = len(text)
    truncated = False
    while i < n:
        match = _MEDIA_LINK_RE.match(text, i)
        if match is None:
            out.append(text[i])
            i += 1
            continue
        depth = 1
        j = match.end()
        while j < n and depth:
            if text.startswith("[[", j):
                depth += 1
                j += 2
            elif text.startswith("]]", j):
                depth -= 1
                j += 2
            else:
                j += 1
        if depth:
            truncated = True
            break
        i = j
    return "".join(out), truncated


def strip_markup(wikitext: str) -> StripResult:
    """Clean wikitext down to prose plus plain [[...]] links."""
    text = wikitext
    truncated = False
    while True:
        stage_text = text
        for stage in (
            _strip_comments,
            lambda t: _strip_pairs(t, "{{", "}}"),
            _strip_media_links,
            lambda t: _strip_pairs(t, "{|", "|}"),
        ):
            stage_text, flag = stage(stage_text)
            truncated |= flag
        if stage_text == text:
            return StripResult(text, truncated)
        text = stage_text


def _link_targets(text: str) -> list[str]:
    """Targets of plain links, first occurrence order, deduplicated."""
    targets: list[str] = []
    seen: set[str] = set()
    for match in _LINK_RE.finditer(text):
        target = match.group(1).split("|", 1)[0]
        target = target.split("#", 1)[0]
        target = " ".join(target.split())
        if not target or _INTERLANGUAGE_RE.match(target):
            continue
        if target not in seen:
            seen.add(target)
            targets.append(target)
    return targets


@dataclass(frozen=True)
class LeadExtract:
    lead: str
    links: tuple[str, ...]
    used_full_article: bool


def extract_lead(wikitext: str, min_links: int = DEFAULT_MIN_LINKS) -> LeadExtract:
    """Links of the section above the first heading.

    Falls back to the whole cleaned article when the lead yields fewer
    than `min_links` links (short articles).
    """
    cleaned = strip_markup(wikitext).text
    lead_lines: list[str] = []
    for line in cleaned.splitlines():
        if line.startswith("=="):
            break
        lead_lines.append(line)
    lead = "\n".join(lead_lines)
    links = _link_targets(lead)
    used_full_article = False
    if len(links) < min_links:
        full = _link_targets(cleaned)
        if len(full) > len(links):
            links = full
            used_full_article = True
    return LeadExtract(lead=lead, links=tuple(links), used_full_article=used_full_article)


@dataclass(frozen=True)
class MatchResult:
    title: str
    stage: str
    score: float


class ArticleStore:
    """Immutable set of (title, wikitext) articles with a title matcher.

    Titles are indexed twice: once with the language's standard chain
    and once with stopwords kept, so that a query carrying function
    words only matches a title that carries them too.
    """

    def __init__(self, articles: dict[str, str], lang: str = "en"):
        self.lang = lang
        self._articles = dict(articles)
        docs = [
            Document(doc_id=title, lang=lang, fields={"title": (title,)})
            for title in sorted(self._articles)
        ]
        if not docs:
            raise DataError("article store is empty")
        self._chain = chain_for(lang)
        self._title_field = f"title-{lang}"
        self._index = build_index(docs, {lang: self._chain}, schema=("title",))
        self._index_exact = build_index(
            docs, {lang: chain_for(lang, keep_stopwords=True)}, schema=("title",)
        )

    @classmethod
    def from_dir(cls, path: str | Path, lang: str = "en") -> "ArticleStore":
        """Load `<percent-encoded-title>.wiki` files from a directory."""
        articles: dict[str, str] = {}
        for file in sorted(Path(path).glob("*.wiki")):
            title = urllib.parse.unquote(file.stem)
            if title in articles:
                raise DataError(f"duplicate article title {title!r}")
            articles[title] = file.read_text(encoding="utf-8")
        return cls(articles, lang=lang)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, str]], lang: str = "en") -> "ArticleStore":
        articles: dict[str, str] = {}
        for title, wikitext in pairs:
            if title in articles:
                raise DataError(f"duplicate article title {title!r}")
            articles[title] = wikitext
        return cls(articles, lang=lang)

    @property
    def titles(self) -> list[str]:
        return sorted(self._articles)

    def wikitext(self, title: str) -> str:
        return self._articles[title]

    def _best(self, index: Index, query: Query) -> tuple[str, float] | None:
        hits = index.search(query, k=len(self._articles))
        if not hits:
            return None
        best = min(hits, key=lambda h: (-h.score, len(h.doc_id), h.doc_id))
        return best.doc_id, best.score

    def match(self, topic_title: str) -> MatchResult | None:
        """Resolve a topic title through four stages.

        (a) the words as given, in order; (b) the stopword-free words in
        order; (c) every ordering of the stopword-free word set; (d) the
        best single word. The first stage with a hit wins; within a
        stage the highest score wins, ties broken by shorter then
        lexicographically smaller title.
        """
        field = self._title_field
        surface = tokenize(topic_title)
        if not surface:
            return None

        hit = self._best(self._index_exact, Query((Phrase(field, tuple(surface)),)))
        if hit:
            return MatchResult(hit[0], "original", hit[1])

        tokens = query_tokens(self._chain, topic_title)
        if tokens:
            hit = self._best(self._index, Query((Phrase(field, tuple(tokens)),)))
            if hit:
                return MatchResult(hit[0], "stopword_free", hit[1])

        def best_of(hits: list[tuple[str, float]]) -> tuple[str, float] | None:
            if not hits:
                return None
            return min(hits, key=lambda h: (-h[1], len(h[0]), h[0]))

        token_set = sorted(set(tokens))
        if 2 <= len(token_set) <= MAX_PERMUTATION_TOKENS:
            hits = [
                hit
                for ordering in itertools.permutations(token_set)
                if (hit := self._best(self._index, Query((Phrase(field, ordering),))))
            ]
            winner = best_of(hits)
            if winner:
                return MatchResult(winner[0], "permutation", winner[1])

        hits = [
            hit
            for token in tokens
            if (hit := self._best(self._index, Query((Term(field, token),))))
        ]
        winner = best_of(hits)
        if winner:
            return MatchResult(winner[0], "single_word", winner[1])
        return None


def suggest_wiki_lead(
    store: ArticleStore,
    topic: Topic,
    k: int = 10,
    min_links: int = DEFAULT_MIN_LINKS,
) -> SuggestionSet:
    """Lead-section link targets of the matched article, ranked by
    appearance order with a synthetic 1/rank score."""
    match = store.match(topic.title)
    if match is None:
        return make_suggestion_set(topic.topic_id, "WIKI_ENTITY", [])
    lead = extract_lead(store.wikitext(match.title), min_links=min_links)
    pairs = [(link, 1.0 / (i + 1)) for i, link in enumerate(lead.links[:k])]
    return make_suggestion_set(topic.topic_id, "WIKI_ENTITY", pairs)
