"""Independent brute-force scorers used to cross-check the real code.

Everything here recomputes results straight from raw documents (or raw
ranked lists), deliberately avoiding the index / recommender / metric
code paths under test. Only the analyzer chains are shared, since every
route needs identical tokenization.
"""

from __future__ import annotations

import math
from fractions import Fraction

from sparse_expand.corpus import DEFAULT_SCHEMA
from sparse_expand.index import Term

SEGMENT_GAP = 1


def field_token_positions(doc, chain, schema=DEFAULT_SCHEMA, all_field="chic_all"):
    """(term, position) pairs per composite field, assembled from scratch."""
    in_schema = set(schema)
    ordered = [n for n in schema if n in doc.fields] + sorted(
        n for n in doc.fields if n not in in_schema
    )
    streams = {}
    for name in ordered:
        pairs = []
        pos = 0
        for value in doc.fields[name]:
            tokens = chain.run(value)
            if not tokens:
                continue
            for i, term in enumerate(tokens):
                pairs.append((term, pos + i))
            pos += len(tokens) + SEGMENT_GAP
        streams[f"{name}-{doc.lang}"] = pairs
    pairs = []
    pos = 0
    for name in ordered:
        for value in doc.fields[name]:
            tokens = chain.run(value)
            if not tokens:
                continue
            for i, term in enumerate(tokens):
                pairs.append((term, pos + i))
            pos += len(tokens) + SEGMENT_GAP
    streams[f"{all_field}-{doc.lang}"] = pairs
    return streams


def _clause_tf(stream_pairs, tokens):
    if len(tokens) == 1:
        return sum(1 for term, _ in stream_pairs if term == tokens[0])
    positions = {}
    for term, pos in stream_pairs:
        positions.setdefault(term, set()).add(pos)
    if any(t not in positions for t in tokens):
        return 0
    return sum(
        1
        for start in positions[tokens[0]]
        if all(start + i in positions[t] for i, t in enumerate(tokens))
    )


def naive_search(documents, chains, query, k, schema=DEFAULT_SCHEMA, all_field="chic_all"):
    """Score every document against every clause; returns (doc_id, score)."""
    streams = [
        field_token_positions(doc, chains[doc.lang], schema, all_field) for doc in documents
    ]
    n_docs = len(documents)
    scores: dict[int, float] = {}
    for clause in query.clauses:
        lang = clause.field.rsplit("-", 1)[1]
        chain = chains[lang]
        text = clause.text if isinstance(clause, Term) else " ".join(clause.terms)
        tokens = chain.run(text)
        if not tokens:
            continue
        tfs = {}
        for i, stream in enumerate(streams):
            tf = _clause_tf(stream.get(clause.field, []), tokens)
            if tf:
                tfs[i] = tf
        if not tfs:
            continue
        idf = 1.0 + math.log(n_docs / (1.0 + len(tfs)))
        for i in sorted(tfs):
            scores[i] = scores.get(i, 0.0) + clause.boost * math.sqrt(tfs[i]) * idf
    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], documents[kv[0]].doc_id))
    return [(documents[i].doc_id, score) for i, score in ranked[:k]]


def naive_str_scores(documents, topic, chain, input_fields, concept_fields, log=False):
    """Suggestion scores recomputed by explicit set arithmetic."""
    from sparse_expand.analysis import query_tokens

    tokens = query_tokens(chain, topic.title)
    candidates = [d for d in documents if d.lang == topic.lang]

    # analyzed token set of the input fields, once per document
    doc_tokens = []
    for doc in candidates:
        bag = set()
        for name in input_fields:
            for value in doc.fields.get(name, ()):
                bag.update(chain.run(value))
        doc_tokens.append((doc.doc_id, bag))

    analyzed = [chain.run(t)[0] for t in tokens]
    per_token = [
        {doc_id for doc_id, bag in doc_tokens if token in bag} for token in analyzed
    ]
    ds_x = set.intersection(*per_token) if per_token else set()
    if not ds_x and per_token:
        ds_x = set.union(*per_token)

    value_docs: dict[str, set[str]] = {}
    for doc in candidates:
        for name in concept_fields:
            for value in doc.fields.get(name, ()):
                value_docs.setdefault(value.strip(), set()).add(doc.doc_id)

    scored = {}
    for value, ds_y in value_docs.items():
        inter = len(ds_x & ds_y)
        if inter == 0:
            continue
        if log:
            lx, ly, lxy = (
                math.log(1 + len(ds_x)),
                math.log(1 + len(ds_y)),
                math.log(1 + inter),
            )
            scored[value] = lxy / (lx + ly - lxy)
        else:
            scored[value] = Fraction(inter, len(ds_x) + len(ds_y) - inter)
    return scored


def naive_important_words(bodies: dict[str, str], chain, title, n):
    """Top-n tf*idf words recomputed with plain counting."""
    tokens = {t: chain.run(body) for t, body in bodies.items()}
    n_docs = len(bodies)
    df: dict[str, int] = {}
    for toks in tokens.values():
        for term in set(toks):
            df[term] = df.get(term, 0) + 1
    counts: dict[str, int] = {}
    for term in tokens[title]:
        counts[term] = counts.get(term, 0) + 1
    weight = {
        term: counts[term] * (1.0 + math.log(n_docs / (1.0 + df[term]))) for term in counts
    }
    ranked = sorted(weight, key=lambda t: (-weight[t], t))
    return set(ranked[:n])


def naive_docsim_ranking(bodies: dict[str, str], chain, seed, k, n):
    """All-pairs similarity ranking, O(corpus^2) route."""
    scores = []
    seed_words = naive_important_words(bodies, chain, seed, n)
    for title in bodies:
        if title == seed:
            continue
        words = naive_important_words(bodies, chain, title, n)
        score = Fraction(len(seed_words & words), n)
        if score > 0:
            scores.append((title, score))
    scores.sort(key=lambda pair: (-pair[1], pair[0]))
    return scores[:k]


def naive_average_precision(ranked_docs, judgments, threshold=1):
    relevant = {doc for doc, grade in judgments.items() if grade >= threshold}
    if not relevant:
        return None
    found = []
    for position in range(1, len(ranked_docs) + 1):
        if ranked_docs[position - 1] in relevant:
            top = ranked_docs[:position]
            found.append(sum(1 for d in top if d in relevant) / position)
    return sum(found) / len(relevant)


def naive_r_precision(ranked_docs, judgments, threshold=1):
    relevant = {doc for doc, grade in judgments.items() if grade >= threshold}
    if not relevant:
        return None
    r = len(relevant)
    return sum(1 for doc in ranked_docs[:r] if doc in relevant) / r


def naive_se_precision(grades_in_rank_order):
    if not grades_in_rank_order:
        return (0.0, 0.0)
    n = len(grades_in_rank_order)
    weak = sum(1 for g in grades_in_rank_order if g >= 1)
    strong = sum(1 for g in grades_in_rank_order if g == 2)
    return (weak / n, strong / n)
