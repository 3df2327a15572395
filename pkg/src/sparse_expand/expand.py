"""Expanded-query construction and the cross-system suggestion merge.

A topic title becomes one boosted term clause per stopword-free word;
each suggested concept becomes an unboosted clause on the same field, a
phrase when it analyzes to several tokens. Clause text keeps its surface
form: analysis happens again at query time, so `"The Great American
Novel"` stays readable in the serialized query.

Serialized queries group consecutive clauses sharing field and boost:

    chic_all-en:(moby OR dick)^2 OR chic_all-en:("Herman Melville" OR literature)

Parsing inverts serialization exactly.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .analysis import AnalyzerChain, chain_for, query_tokens
from .corpus import Topic
from .errors import DataError, EmptyQueryError
from .index import ALL_FIELD, Clause, Phrase, Query, Term
from .suggestions import ConceptSuggestion, SuggestionSet

logger = logging.getLogger(__name__)

_SYSTEM_ORDER = {name: i for i, name in enumerate(("WIKI_ENTITY", "WIKI_SIM", "WIKI_BACK", "STR"))}


@dataclass(frozen=True)
class ExpansionConfig:
    title_boost: float = 2.0
    max_concepts: int = 10
    target_field: str | None = None  # default: chic_all-<topic lang>

    def __post_init__(self):
        if self.title_boost <= 0:
            raise ValueError("title_boost must be positive")
        if self.max_concepts < 0:
            raise ValueError("max_concepts must be >= 0")


def build_query(
    topic: Topic,
    suggestions: SuggestionSet | None = None,
    cfg: ExpansionConfig | None = None,
    chain: AnalyzerChain | None = None,
) -> Query:
    """OR together boosted title words and suggested concepts."""
    cfg = cfg or ExpansionConfig()
    chain = chain or chain_for(topic.lang)
    field = cfg.target_field or f"{ALL_FIELD}-{topic.lang}"

    title_tokens = query_tokens(chain, topic.title)
    if not title_tokens:
        raise EmptyQueryError(f"empty title: topic {topic.topic_id!r}")
    clauses: list[Clause] = [Term(field, tok, cfg.title_boost) for tok in title_tokens]

    seen: set[str] = set()
    texts = suggestions.texts()[: cfg.max_concepts] if suggestions else []
    for text in texts:
        if text.lower() in seen:
            continue
        seen.add(text.lower())
        words = query_tokens(chain, text)
        if not words:
            logger.warning(
                "dropping suggestion %r for topic %s: analyzes to no tokens",
                text,
                topic.topic_id,
            )
            continue
        if len(words) == 1:
            clauses.append(Term(field, words[0], 1.0))
        else:
            clauses.append(Phrase(field, tuple(text.split()), 1.0))
    return Query(tuple(clauses))


def combo_merge(sets: Sequence[SuggestionSet], max_concepts: int = 10) -> SuggestionSet:
    """Round-robin merge by rank across systems, in a fixed system order.

    Texts are deduplicated case-insensitively keeping the first
    occurrence; merged suggestions get synthetic 1/rank scores since the
    source scores are not comparable across systems.
    """
    if not sets:
        raise DataError("combo needs at least one input suggestion set")
    topic_ids = {s.topic_id for s in sets}
    if len(topic_ids) != 1:
        raise DataError(f"combo inputs disagree on topic: {sorted(topic_ids)}")
    ordered = sorted(
        range(len(sets)), key=lambda i: (_SYSTEM_ORDER.get(sets[i].system, len(_SYSTEM_ORDER)), i)
    )
    merged: list[str] = []
    seen: set[str] = set()
    depth = max((len(s.suggestions) for s in sets), default=0)
    for rank in range(depth):
        for i in ordered:
            suggestions = sets[i].suggestions
            if rank < len(suggestions):
                text = suggestions[rank].text
                if text.lower() not in seen:
                    seen.add(text.lower())
                    merged.append(text)
    merged = merged[:max_concepts]
    return SuggestionSet(
        topic_id=sets[0].topic_id,
        system="COMBO",
        suggestions=tuple(
            ConceptSuggestion(text=t, score=1.0 / (i + 1), rank=i + 1, source="COMBO")
            for i, t in enumerate(merged)
        ),
    )


# -- query surface syntax ---------------------------------------------


def _format_boost(boost: float) -> str:
    return "" if boost == 1 else f"^{boost:g}"


def _format_clause(clause: Clause) -> str:
    if isinstance(clause, Phrase):
        return '"%s"' % " ".join(clause.terms).replace('"', "")
    return clause.text


def serialize_query(query: Query) -> str:
    """Render a query, grouping runs of clauses with equal field and boost."""
    groups: list[tuple[str, float, list[Clause]]] = []
    for clause in query.clauses:
        if groups and groups[-1][0] == clause.field and groups[-1][1] == clause.boost:
            groups[-1][2].append(clause)
        else:
            groups.append((clause.field, clause.boost, [clause]))
    rendered = [
        f"{field}:({' OR '.join(_format_clause(c) for c in clauses)}){_format_boost(boost)}"
        for field, boost, clauses in groups
    ]
    return " OR ".join(rendered)


_FIELD_RE = re.compile(r'([^\s()"]+):\(')
_BARE_RE = re.compile(r'[^\s()"]+')
_BOOST_RE = re.compile(r"\^(\d+(?:\.\d+)?)")


def parse_query(expression: str) -> Query:
    """Parse the surface syntax back into a Query."""
    clauses: list[Clause] = []
    pos = 0
    text = expression.strip()

    def syntax_error(what: str) -> DataError:
        return DataError(f"bad query expression at offset {pos}: {what}: {text!r}")

    while pos < len(text):
        match = _FIELD_RE.match(text, pos)
        if not match:
            raise syntax_error("expected field:(...)")
        field = match.group(1)
        pos = match.end()
        items: list[Clause] = []
        while True:
            while pos < len(text) and text[pos] == " ":
                pos += 1
            if pos >= len(text):
                raise syntax_error("unterminated group")
            if text[pos] == '"':
                end = text.find('"', pos + 1)
                if end == -1:
                    raise syntax_error("unterminated phrase quote")
                words = text[pos + 1 : end].split()
                if not words:
                    raise syntax_error("empty phrase")
                items.append(Phrase(field, tuple(words)))
                pos = end + 1
            else:
                word = _BARE_RE.match(text, pos)
                if not word:
                    raise syntax_error("expected a term")
                items.append(Term(field, word.group(0)))
                pos = word.end()
            while pos < len(text) and text[pos] == " ":
                pos += 1
            if pos < len(text) and text[pos] == ")":
                pos += 1
                break
            if text.startswith("OR", pos):
                pos += 2
                continue
            raise syntax_error("expected OR or )")
        boost = 1.0
        boost_match = _BOOST_RE.match(text, pos)
        if boost_match:
            boost = float(boost_match.group(1))
            pos = boost_match.end()
        clauses.extend(
            Term(field, c.text, boost) if isinstance(c, Term) else Phrase(field, c.terms, boost)
            for c in items
        )
        while pos < len(text) and text[pos] == " ":
            pos += 1
        if pos < len(text):
            if text.startswith("OR", pos):
                pos += 2
                while pos < len(text) and text[pos] == " ":
                    pos += 1
            else:
                raise syntax_error("expected OR between groups")
    if not clauses:
        raise DataError(f"empty query expression: {expression!r}")
    return Query(tuple(clauses))


def write_query_file(path: str | Path, queries: Iterable[tuple[str, Query]]) -> None:
    """One `topic_id <TAB> expression` line per query."""
    lines = [f"{topic_id}\t{serialize_query(query)}" for topic_id, query in queries]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def read_query_file(path: str | Path) -> list[tuple[str, Query]]:
    out: list[tuple[str, Query]] = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        topic_id, sep, expression = line.partition("\t")
        if not sep or not topic_id.strip():
            raise DataError(f"{path}:{lineno}: expected 'topic_id<TAB>expression'")
        out.append((topic_id.strip(), parse_query(expression)))
    return out
