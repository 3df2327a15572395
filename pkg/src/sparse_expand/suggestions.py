"""Concept suggestions and their tab-separated file format.

A suggestion file holds one line per suggestion, sorted by topic then
rank:

    topic_id <TAB> rank <TAB> concept_text <TAB> score <TAB> system
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DataError

SYSTEMS = ("WIKI_ENTITY", "WIKI_SIM", "WIKI_BACK", "STR", "COMBO")


@dataclass(frozen=True)
class ConceptSuggestion:
    text: str
    score: float | Fraction
    rank: int
    source: str


@dataclass(frozen=True)
class SuggestionSet:
    topic_id: str
    system: str
    suggestions: tuple[ConceptSuggestion, ...]

    def __post_init__(self):
        object.__setattr__(self, "suggestions", tuple(self.suggestions))
        ranks = [s.rank for s in self.suggestions]
        if ranks != list(range(1, len(ranks) + 1)):
            raise DataError(
                f"suggestion ranks for topic {self.topic_id!r} must be 1..k, got {ranks}"
            )
        scores = [float(s.score) for s in self.suggestions]
        if any(a < b for a, b in zip(scores, scores[1:])):
            raise DataError(f"suggestion scores for topic {self.topic_id!r} increase with rank")
        texts = [s.text for s in self.suggestions]
        if len(set(texts)) != len(texts):
            raise DataError(f"duplicate suggestion text for topic {self.topic_id!r}")

    def texts(self) -> list[str]:
        return [s.text for s in self.suggestions]


def make_suggestion_set(
    topic_id: str, system: str, texts_scores: Sequence[tuple[str, float | Fraction]]
) -> SuggestionSet:
    """Build a set from (text, score) pairs already in rank order."""
    return SuggestionSet(
        topic_id=topic_id,
        system=system,
        suggestions=tuple(
            ConceptSuggestion(text=t, score=s, rank=i + 1, source=system)
            for i, (t, s) in enumerate(texts_scores)
        ),
    )


def format_score(score: float | Fraction) -> str:
    return f"{float(score):.6f}"


def write_suggestion_file(path: str | Path, sets: Iterable[SuggestionSet]) -> None:
    lines = []
    for sset in sorted(sets, key=lambda s: s.topic_id):
        for sugg in sset.suggestions:
            text = sugg.text.replace("\t", " ")
            lines.append(
                f"{sset.topic_id}\t{sugg.rank}\t{text}\t{format_score(sugg.score)}\t{sset.system}"
            )
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def read_suggestion_file(path: str | Path) -> list[SuggestionSet]:
    """Parse and validate a suggestion file; one set per (topic, system)."""
    rows: dict[tuple[str, str], list[tuple[int, str, float]]] = {}
    order: list[tuple[str, str]] = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 5:
            raise DataError(f"{path}:{lineno}: expected 5 tab-separated columns")
        topic_id, rank_s, text, score_s, system = parts
        try:
            rank, score = int(rank_s), float(score_s)
        except ValueError:
            raise DataError(f"{path}:{lineno}: bad rank or score") from None
        key = (topic_id, system)
        if key not in rows:
            rows[key] = []
            order.append(key)
        rows[key].append((rank, text, score))
    sets = []
    for topic_id, system in order:
        entries = sorted(rows[(topic_id, system)])
        sets.append(
            SuggestionSet(
                topic_id=topic_id,
                system=system,
                suggestions=tuple(
                    ConceptSuggestion(text=text, score=score, rank=rank, source=system)
                    for rank, text, score in entries
                ),
            )
        )
    return sets
