"""The fourteen eventuality patterns.

Each pattern is a list of positive edge templates anchored at a center word
(slot ``v1`` for verb patterns, ``a1`` for copular-adjective patterns), a
shared set of optional edges, and an implicit negative set: every label that
is neither positive, optional nor structurally neutral disqualifies a match
when it hangs off a bound word.
"""

from __future__ import annotations

from dataclasses import dataclass

PATTERN_SET_VERSION = "1"

OPTIONAL_LABELS = frozenset({"advmod", "amod", "nummod", "aux", "compound", "neg"})

# Edges that never disqualify a match: function words, punctuation and the
# inter-clause links that carry discourse connectives.
NEUTRAL_LABELS = frozenset({
    "det", "det:predet", "punct", "mark", "case", "cc", "cc:preconj",
    "conj", "advcl", "mwe", "fixed", "nmod:poss", "discourse",
})

# Stanford / UD v1 inventory, used to materialise each pattern's negative set.
LABEL_UNIVERSE = frozenset({
    "acl", "acl:relcl", "advcl", "advmod", "amod", "appos", "aux", "auxpass",
    "case", "cc", "cc:preconj", "ccomp", "compound", "compound:prt", "conj",
    "cop", "csubj", "csubjpass", "dep", "det", "det:predet", "discourse",
    "dislocated", "dobj", "expl", "fixed", "foreign", "goeswith", "iobj", "list",
    "mark", "mwe", "name", "neg", "nmod", "nmod:npmod", "nmod:poss",
    "nmod:tmod", "nsubj", "nsubjpass", "nummod", "parataxis", "punct",
    "remnant", "reparandum", "root", "vocative", "xcomp",
})

NOMINAL = frozenset({"NOUN", "PROPN", "PRON", "NUM"})
VERBAL = frozenset({"VERB"})
ADJECTIVAL = frozenset({"ADJ"})


def label_matches(label: str, relation: str) -> bool:
    """``nmod:in`` satisfies ``nmod``; ``auxpass`` satisfies ``aux``."""
    if label == relation or label.startswith(relation + ":"):
        return True
    return relation == "aux" and label == "auxpass"


def is_optional_label(label: str) -> bool:
    return any(label_matches(label, rel) for rel in OPTIONAL_LABELS)


def is_neutral_label(label: str) -> bool:
    return label in NEUTRAL_LABELS


@dataclass(frozen=True)
class EdgeTemplate:
    governor: str
    relation: str
    dependent: str
    pos: frozenset[str] | None = None

    def __post_init__(self):
        if not self.relation:
            raise ValueError("edge template needs a relation")


@dataclass(frozen=True)
class Pattern:
    code: str
    center_pos: frozenset[str]
    positive: tuple[EdgeTemplate, ...]
    optional: frozenset[str] = OPTIONAL_LABELS

    def __post_init__(self):
        if not self.positive:
            raise ValueError(f"pattern {self.code} has no positive edges")
        declared = {self.center_slot}
        for t in self.positive:
            if t.governor not in declared:
                raise ValueError(f"{self.code}: slot {t.governor} used before it is bound")
            declared.add(t.dependent)

    @property
    def center_slot(self) -> str:
        return self.positive[0].governor

    @property
    def slots(self) -> list[str]:
        return [self.center_slot] + [t.dependent for t in self.positive]

    @property
    def positive_labels(self) -> frozenset[str]:
        return frozenset(t.relation for t in self.positive)

    @property
    def negative(self) -> frozenset[str]:
        allowed = self.positive_labels | self.optional
        return frozenset(
            lab for lab in LABEL_UNIVERSE
            if not is_neutral_label(lab)
            and not any(label_matches(lab, rel) for rel in allowed)
        )


def _e(gov, rel, dep, pos=None):
    return EdgeTemplate(gov, rel, dep, pos)


def builtin_patterns() -> list[Pattern]:
    V, A = VERBAL, ADJECTIVAL
    subj = _e("v1", "nsubj", "n1")
    asubj = _e("a1", "nsubj", "n1")
    return [
        Pattern("s-v", V, (subj,)),
        Pattern("s-v-o", V, (subj, _e("v1", "dobj", "n2"))),
        Pattern("s-v-a", V, (subj, _e("v1", "xcomp", "a1", ADJECTIVAL))),
        Pattern("s-v-o-o", V, (subj, _e("v1", "iobj", "n2"), _e("v1", "dobj", "n3"))),
        Pattern("s-be-a", A, (asubj, _e("a1", "cop", "be"))),
        Pattern("s-v-be-a", V, (subj, _e("v1", "xcomp", "a1", ADJECTIVAL), _e("a1", "cop", "be"))),
        Pattern("s-v-be-o", V, (subj, _e("v1", "xcomp", "n2", NOMINAL), _e("n2", "cop", "be"))),
        Pattern("s-v-v-o", V, (subj, _e("v1", "xcomp", "v2", VERBAL), _e("v2", "dobj", "n2"))),
        Pattern("s-v-v", V, (subj, _e("v1", "xcomp", "v2", VERBAL))),
        Pattern("s-be-a-p-o", A, (asubj, _e("a1", "cop", "be"), _e("a1", "nmod", "n2"), _e("n2", "case", "p1"))),
        Pattern("s-v-p-o", V, (subj, _e("v1", "nmod", "n2"), _e("n2", "case", "p1"))),
        Pattern("s-v-o-p-o", V, (subj, _e("v1", "dobj", "n2"), _e("v1", "nmod", "n3"), _e("n3", "case", "p1"))),
        Pattern("spass-v", V, (_e("v1", "nsubjpass", "n1"),)),
        Pattern("spass-v-p-o", V, (_e("v1", "nsubjpass", "n1"), _e("v1", "nmod", "n2"), _e("n2", "case", "p1"))),
    ]


PATTERN_CODES = tuple(p.code for p in builtin_patterns())
