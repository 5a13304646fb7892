"""Conditional-probability retrieval over the relation graph.

All probabilities are ratios of relation weights, so every function here is
invariant to a uniform rescaling of the graph's weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .relations import RelationType
from .store import KnowledgeGraph

CO = RelationType.CO_OCCURRENCE
MAX_HOPS = 2


class UnknownEventuality(KeyError):
    pass


@dataclass
class ScoredResult:
    target: str | tuple[RelationType, ...]
    probability: float
    support: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        target = self.target if isinstance(self.target, str) else [t.value for t in self.target]
        return {"target": target, "p": self.probability, "support": list(self.support)}


def _need(g: KnowledgeGraph, *keys: str) -> None:
    for k in keys:
        if k not in g:
            raise UnknownEventuality(k)


def _normalise(pairs) -> dict[str, float]:
    total = sum(w for _, w in pairs)
    if total <= 0:
        return {}
    return {k: w / total for k, w in pairs}


def p_tail_1(g: KnowledgeGraph, head: str, r1: RelationType) -> dict[str, float]:
    """P(tail | head, r1); empty when ``head`` has no ``r1`` edge."""
    _need(g, head)
    return _normalise(g.out_neighbors(head, r1))


def p_head_1(g: KnowledgeGraph, tail: str, r1: RelationType) -> dict[str, float]:
    _need(g, tail)
    return _normalise(g.in_neighbors(tail, r1))


def _two_hop(first, step):
    out: dict[str, float] = {}
    via: dict[str, list[str]] = {}
    for mid, p1 in first.items():
        for end, p2 in step(mid).items():
            out[end] = out.get(end, 0.0) + p1 * p2
            via.setdefault(end, []).append(mid)
    return out, via


def p_tail_2(g: KnowledgeGraph, head: str, r1: RelationType, r2: RelationType) -> dict[str, float]:
    """P(tail | head, r1, r2), summing over intermediates reached by r1."""
    return p_tail_2_with_support(g, head, r1, r2)[0]


def p_tail_2_with_support(g, head, r1, r2):
    first = p_tail_1(g, head, r1)
    return _two_hop(first, lambda m: _normalise(g.out_neighbors(m, r2)))


def p_head_2_with_support(g, tail, r1, r2):
    """Heads ranked for the path head -r1-> mid -r2-> tail."""
    last = p_head_1(g, tail, r2)
    return _two_hop(last, lambda m: _normalise(g.in_neighbors(m, r1)))


def _types(weights: dict[RelationType, float], include_cooccurrence: bool):
    return {t: w for t, w in weights.items() if w > 0 and (include_cooccurrence or t is not CO)}


def p_rel_1(g: KnowledgeGraph, head: str, tail: str, include_cooccurrence: bool = True) -> dict[RelationType, float]:
    """P(R | head, tail) over the types on the direct edge."""
    _need(g, head, tail)
    w = _types(g.weights(head, tail), include_cooccurrence)
    total = sum(w.values())
    return {t: v / total for t, v in w.items()} if total > 0 else {}


def p_rel_given_head(g: KnowledgeGraph, head: str, rtype: RelationType, include_cooccurrence: bool = True) -> float:
    """Share of ``head``'s outgoing weight that carries ``rtype``."""
    _need(g, head)
    totals = _types(g.out_weights(head), include_cooccurrence)
    denom = sum(totals.values())
    return totals.get(rtype, 0.0) / denom if denom > 0 else 0.0


def p_rel_2(
    g: KnowledgeGraph,
    head: str,
    tail: str,
    r1: RelationType,
    r2: RelationType,
    include_cooccurrence: bool = True,
) -> tuple[float, list[str]]:
    """P(r1, r2 | head, tail) and the intermediates that contribute to it."""
    _need(g, head, tail)
    prior = p_rel_given_head(g, head, r1, include_cooccurrence)
    if prior == 0.0:
        return 0.0, []
    total = 0.0
    support = []
    for mid, p_mid in p_tail_1(g, head, r1).items():
        p_last = p_rel_1(g, mid, tail, include_cooccurrence).get(r2, 0.0)
        if p_last > 0:
            total += prior * p_mid * p_last
            support.append(mid)
    return total, sorted(support)


def relation_paths(
    g: KnowledgeGraph, head: str, tail: str, include_cooccurrence: bool = True
) -> list[ScoredResult]:
    """Every one- and two-hop relation list linking ``head`` to ``tail``."""
    _need(g, head, tail)
    results = [ScoredResult((t,), p) for t, p in p_rel_1(g, head, tail, include_cooccurrence).items()]
    first_types = _types(g.out_weights(head), include_cooccurrence)
    for r1 in first_types:
        r2_seen = set()
        for mid in g.successors(head):
            r2_seen.update(_types(g.weights(mid, tail), include_cooccurrence))
        for r2 in r2_seen:
            p, support = p_rel_2(g, head, tail, r1, r2, include_cooccurrence)
            if p > 0:
                results.append(ScoredResult((r1, r2), p, support))
    results.sort(key=lambda r: (-r.probability, len(r.target), [t.value for t in r.target]))
    return results


def retrieve(
    g: KnowledgeGraph,
    key: str,
    path: Sequence[RelationType],
    topk: int = 10,
    reverse: bool = False,
) -> list[ScoredResult]:
    """Top-k eventualities at the end of ``path`` from ``key``.

    With ``reverse`` the query key is the tail and heads are ranked.
    """
    if topk < 1:
        raise ValueError("topk must be >= 1")
    if not 1 <= len(path) <= MAX_HOPS:
        raise ValueError(f"relation paths of length 1..{MAX_HOPS} are supported, got {len(path)}")
    if len(path) == 1:
        probs = p_head_1(g, key, path[0]) if reverse else p_tail_1(g, key, path[0])
        via: dict[str, list[str]] = {}
    elif reverse:
        probs, via = p_head_2_with_support(g, key, path[0], path[1])
    else:
        probs, via = p_tail_2_with_support(g, key, path[0], path[1])
    ranked = sorted(probs.items(), key=lambda kv: (-kv[1], kv[0]))[:topk]
    return [ScoredResult(k, p, sorted(via.get(k, []))) for k, p in ranked]
