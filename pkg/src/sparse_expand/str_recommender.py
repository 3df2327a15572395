"""Co-occurrence search-term recommender.

Candidate concepts are whole field values from the configured concept
fields (controlled-vocabulary surface forms, e.g. "Cinema and Theatre").
A topic's document set is built from its title tokens over the input
fields; every concept value is then scored by the Jaccard similarity of
the two document sets, computed from the set sizes

    jaccard(df_x, df_y, df_xy) = df_xy / (df_x + df_y - df_xy)

or by its logarithmic variant that dampens large size differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import log

from .analysis import query_tokens
from .corpus import Topic
from .errors import EmptyQueryError
from .index import Index
from .suggestions import SuggestionSet, make_suggestion_set


@dataclass(frozen=True)
class CooccurConfig:
    input_fields: tuple[str, ...] = ("dc:title", "dc:description")
    concept_fields: tuple[str, ...] = ("dc:subject", "enrichment:concept_label")
    similarity: str = "jaccard"  # or "log_jaccard"
    top_k: int = 10

    def __post_init__(self):
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if not self.input_fields or not self.concept_fields:
            raise ValueError("field lists must be non-empty")
        if set(self.input_fields) & set(self.concept_fields):
            raise ValueError("input and concept fields must be disjoint")
        if self.similarity not in ("jaccard", "log_jaccard"):
            raise ValueError(f"unknown similarity {self.similarity!r}")


def jaccard(df_x: int, df_y: int, df_xy: int) -> Fraction:
    """Exact rational Jaccard score from document-set sizes.

    The empty-vs-empty case (all three zero) is defined as 0.
    """
    if df_xy > min(df_x, df_y):
        raise ValueError("df_xy cannot exceed min(df_x, df_y)")
    if df_x == df_y == 0:
        return Fraction(0)
    return Fraction(df_xy, df_x + df_y - df_xy)


def log_jaccard(df_x: int, df_y: int, df_xy: int) -> float:
    """Jaccard over log-damped frequencies: ln(1+c) replaces each count."""
    if df_xy > min(df_x, df_y):
        raise ValueError("df_xy cannot exceed min(df_x, df_y)")
    if df_xy == 0:
        return 0.0
    lx, ly, lxy = log(1 + df_x), log(1 + df_y), log(1 + df_xy)
    return lxy / (lx + ly - lxy)


def _topic_doc_set(index: Index, topic: Topic, cfg: CooccurConfig) -> frozenset[int]:
    """Documents matching the topic title over the input fields.

    Per token, the doc sets of all input fields are unioned; tokens are
    then intersected. If the conjunction is empty, fall back to the
    disjunction of tokens.
    """
    chain = index.chains.get(topic.lang)
    if chain is None:
        raise EmptyQueryError(f"no analyzer for topic language {topic.lang!r}")
    tokens = query_tokens(chain, topic.title)
    if not tokens:
        raise EmptyQueryError(f"empty query: topic {topic.topic_id!r}")
    fields = [f"{name}-{topic.lang}" for name in cfg.input_fields]
    fields = [f for f in fields if index.has_field(f)]
    per_token = []
    for token in tokens:
        docs: set[int] = set()
        for field in fields:
            docs |= index.doc_set(field, [token], mode="any")
        per_token.append(docs)
    if not per_token:
        return frozenset()
    conjunction = frozenset(set.intersection(*per_token))
    if conjunction:
        return conjunction
    return frozenset(set.union(*per_token))


def suggest_str(index: Index, topic: Topic, cfg: CooccurConfig | None = None) -> SuggestionSet:
    """Rank concept-field values by co-occurrence with the topic title.

    Values never co-occurring with the topic's documents are omitted, so
    the result can be shorter than top_k (or empty).
    """
    cfg = cfg or CooccurConfig()
    ds_x = _topic_doc_set(index, topic, cfg)
    similarity = jaccard if cfg.similarity == "jaccard" else log_jaccard

    candidates: dict[str, set[int]] = {}
    for name in cfg.concept_fields:
        field = f"{name}-{topic.lang}"
        for value, docs in index.raw_values(field).items():
            candidates.setdefault(value, set()).update(docs)

    scored = []
    for value, ds_y in candidates.items():
        df_xy = len(ds_x & ds_y)
        if df_xy == 0:
            continue
        scored.append((value, similarity(len(ds_x), len(ds_y), df_xy)))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return make_suggestion_set(topic.topic_id, "STR", scored[: cfg.top_k])
