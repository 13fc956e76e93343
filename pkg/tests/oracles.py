"""Brute-force evaluator for weighted agreement rates.

Everything here is written as plainly as possible (explicit loops, float
arithmetic, direct formula application) and shares no code with
goldalign.agreement; it exists so the production implementation can be checked
against an independent computation of the same definitions.
"""

from __future__ import annotations


def expand_tokens(annotations) -> list[tuple]:
    """Verse-qualified (e, f) link tokens from a list of Annotations."""
    tokens = []
    for ann in annotations:
        for g in ann.groups:
            for e in g.e_positions:
                for f in g.f_positions:
                    tok = ((ann.verse_id, e), (ann.verse_id, f))
                    if tok not in tokens:
                        tokens.append(tok)
    return tokens


def fanout_weighted(tokens):
    weights = {}
    for u, v in tokens:
        fan_u = 0
        fan_v = 0
        for uu, vv in tokens:
            if uu == u:
                fan_u += 1
            if vv == v:
                fan_v += 1
        weights[(u, v)] = 1.0 / max(fan_u, fan_v)
    return weights


def directional_weighted(tokens, source_is_f: bool):
    weights = {}
    for u, v in tokens:
        src = v if source_is_f else u
        emitted = 0
        for uu, vv in tokens:
            if (vv if source_is_f else uu) == src:
                emitted += 1
        weights[(u, v)] = 1.0 / emitted
    return weights


def size(weights) -> float:
    total = 0.0
    for w in weights.values():
        total += w
    return total


def intersection(x, y) -> float:
    total = 0.0
    for token, w in x.items():
        if token in y:
            total += min(w, y[token])
    return total


def precision(x, y) -> float:
    return intersection(x, y) / size(x)


def recall(x, y) -> float:
    return intersection(x, y) / size(y)


def dice(x, y) -> float:
    return 2.0 * intersection(x, y) / (size(x) + size(y))


def pair_agreement(anns_a, anns_b, mode: str) -> float:
    ta = expand_tokens(anns_a)
    tb = expand_tokens(anns_b)
    if mode == "fanout":
        return dice(fanout_weighted(ta), fanout_weighted(tb))
    d_fe = dice(directional_weighted(ta, True), directional_weighted(tb, True))
    d_ef = dice(directional_weighted(ta, False), directional_weighted(tb, False))
    return (d_fe + d_ef) / 2.0
