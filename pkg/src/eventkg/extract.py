"""Pattern matching of eventualities around center words."""

from __future__ import annotations

from .conllu import DependencyGraph, Token
from .eventuality import Eventuality
from .patterns import (
    Pattern,
    builtin_patterns,
    is_neutral_label,
    is_optional_label,
    label_matches,
)

# Adverbial connectives are left out of the eventuality so that the seed
# matcher still finds them between (or after) the two eventualities.
CONNECTIVE_ADVERBS = frozenset({
    "so", "thus", "therefore", "then", "meanwhile", "meantime", "however",
    "also", "instead", "otherwise", "once", "until", "till", "before", "after",
    "because", "although", "unless", "except", "if", "at", "for", "in", "on",
    "by", "as",
})

_PATTERNS = builtin_patterns()


def _bind_positive(graph: DependencyGraph, center: int, pattern: Pattern):
    binding = {pattern.center_slot: center}
    used = {center}
    edges = []
    for tpl in pattern.positive:
        gov = binding[tpl.governor]
        for child in graph.children(gov):
            if child.index in used or not label_matches(child.deprel, tpl.relation):
                continue
            if tpl.pos is not None and child.upos not in tpl.pos:
                continue
            binding[tpl.dependent] = child.index
            used.add(child.index)
            edges.append((gov, child.deprel, child.index))
            break
        else:
            return None
    return binding, edges


def match_pattern(graph: DependencyGraph, center: int, pattern: Pattern) -> Eventuality | None:
    """Try one pattern with ``center`` in the center slot.

    Positive edges must all be found, optional edges one hop off any bound
    word are collected, and any other non-neutral edge governed by a bound
    word disqualifies the match.
    """
    if graph.token(center).upos not in pattern.center_pos:
        return None
    bound = _bind_positive(graph, center, pattern)
    if bound is None:
        return None
    binding, edges = bound
    bound_tokens = set(binding.values())
    positive_edges = set(edges)

    collected = set(bound_tokens)
    for idx in sorted(bound_tokens):
        for child in graph.children(idx):
            edge = (idx, child.deprel, child.index)
            if edge in positive_edges:
                continue
            if is_optional_label(child.deprel):
                if child.deprel == "advmod" and child.form in CONNECTIVE_ADVERBS:
                    continue
                collected.add(child.index)
                edges.append(edge)
            elif is_neutral_label(child.deprel):
                continue
            else:
                return None
    return _make(graph, sorted(collected), edges, pattern.code, center)


def _make(graph: DependencyGraph, positions: list[int], edges, code: str, center: int) -> Eventuality:
    local = {p: i for i, p in enumerate(positions)}
    toks: list[Token] = [graph.token(p) for p in positions]
    return Eventuality(
        words=tuple(t.form for t in toks),
        upos=tuple(t.upos for t in toks),
        edges=tuple(sorted((local[g], rel, local[d]) for g, rel, d in edges)),
        pattern=code,
        positions=tuple(positions),
        center=center,
    )


def candidate_centers(graph: DependencyGraph) -> list[int]:
    """Verbs, plus adjectives and nouns that govern a copula."""
    out = []
    for t in graph.tokens:
        if t.upos == "VERB":
            out.append(t.index)
        elif t.upos in ("ADJ", "NOUN") and any(c.deprel == "cop" for c in graph.children(t.index)):
            out.append(t.index)
    return out


def matching_patterns(graph: DependencyGraph, center: int, patterns=None) -> list[Eventuality]:
    return [e for p in (patterns or _PATTERNS) if (e := match_pattern(graph, center, p)) is not None]


def extract_eventualities(graph: DependencyGraph, patterns=None) -> list[Eventuality]:
    """All eventualities of a sentence, ordered by center position.

    A center whose word is already bound inside another eventuality (the
    embedded verb of an xcomp chain) is dropped in favour of the governor.
    """
    found = []
    for center in candidate_centers(graph):
        matches = matching_patterns(graph, center, patterns)
        if matches:
            found.append(matches[0])
    claimed = set()
    for e in found:
        claimed.update(p for p in e.positions if p != e.center)
    return [e for e in found if e.center not in claimed]
